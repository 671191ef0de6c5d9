#include "escdim/annular.hpp"

#include <cmath>

namespace escdim {

ItinerarySpec ItinerarySpec::example34(double d, double kappa, double R, double s1) {
    ItinerarySpec it;
    it.skind = SKind::Example34;
    it.scheme = Scheme::Stretched;
    it.d = d;
    it.kappa = kappa;
    it.R = R;
    it.s1 = s1;
    return it;
}
ItinerarySpec ItinerarySpec::arith(double s1, double step, Scheme scheme, double R, double kappa) {
    ItinerarySpec it;
    it.skind = SKind::Arith;
    it.scheme = scheme;
    it.s1 = s1;
    it.step = step;
    it.R = R;
    it.kappa = kappa;
    return it;
}
ItinerarySpec ItinerarySpec::explicit_list(std::vector<double> s, Scheme scheme, double R,
                                           double kappa) {
    ItinerarySpec it;
    it.skind = SKind::Explicit;
    it.scheme = scheme;
    it.s_list = std::move(s);
    it.R = R;
    it.kappa = kappa;
    return it;
}
ItinerarySpec ItinerarySpec::power_rec(double q_rec, double s1, double R) {
    ItinerarySpec it;
    it.skind = SKind::PowerRec;
    it.scheme = Scheme::Power;
    it.q_rec = q_rec;
    it.s1 = s1;
    it.R = R;
    return it;
}

void ItinerarySpec::validate() const {
    if (R <= 1) throw spec_error("itinerary: R must exceed 1");
    if (scheme == Scheme::Stretched && kappa <= 1)
        throw spec_error("itinerary: kappa must exceed 1 for the stretched scheme");
    if (skind == SKind::Explicit) {
        if (s_list.empty()) throw spec_error("itinerary: explicit s-list is empty");
        for (double s : s_list)
            if (s < 1) throw spec_error("itinerary: s_n must be >= 1");
    } else if (s1 < 1) {
        throw spec_error("itinerary: seed s1 must be >= 1");
    }
    if (skind == SKind::Example34 && d < 0) throw spec_error("itinerary: d must be >= 0");
    if (skind == SKind::PowerRec && (q_rec <= 0 || q_rec >= 1))
        throw spec_error("itinerary: recurrence exponent must lie in (0,1)");
}

std::string ItinerarySpec::skind_name() const {
    switch (skind) {
        case SKind::Explicit: return "explicit";
        case SKind::Example34: return "stretched-recurrence";
        case SKind::PowerRec: return "power-recurrence";
        case SKind::Arith: return "arith";
    }
    return "?";
}
std::string ItinerarySpec::scheme_name() const {
    return scheme == Scheme::Power ? "power" : "stretched";
}

ItineraryGen::ItineraryGen(ItinerarySpec spec) : spec_(std::move(spec)) { spec_.validate(); }

LevelReal ItineraryGen::s_raw(int n) const {
    if (n < 1) throw generation_error("itinerary index must be >= 1", n);
    std::lock_guard<std::mutex> lock(mu_);
    while (static_cast<int>(raw_.size()) < n) {
        int idx = static_cast<int>(raw_.size()) + 1;
        try {
            switch (spec_.skind) {
                case ItinerarySpec::SKind::Explicit:
                    if (idx > static_cast<int>(spec_.s_list.size()))
                        throw generation_error("itinerary list exhausted", idx);
                    raw_.push_back(LevelReal(spec_.s_list[static_cast<size_t>(idx) - 1]));
                    break;
                case ItinerarySpec::SKind::Arith:
                    raw_.push_back(LevelReal(spec_.s1 + (idx - 1) * spec_.step));
                    break;
                case ItinerarySpec::SKind::Example34: {
                    if (idx == 1) {
                        raw_.push_back(LevelReal(spec_.s1));
                        break;
                    }
                    // ln s_{n+1} = (d/(kappa-1)) * s_n^kappa * ln R
                    const LevelReal& prev = raw_.back();
                    double coeff = spec_.d / (spec_.kappa - 1) * std::log(spec_.R);
                    if (coeff == 0.0) {
                        raw_.push_back(LevelReal(1.0));
                        break;
                    }
                    raw_.push_back(lr_exp(scale(lr_pow(prev, spec_.kappa), coeff)));
                    break;
                }
                case ItinerarySpec::SKind::PowerRec: {
                    if (idx == 1) {
                        raw_.push_back(LevelReal(spec_.s1));
                        break;
                    }
                    const LevelReal& prev = raw_.back();
                    LevelReal v = lr_exp(scale(prev, spec_.q_rec * std::log(spec_.R)));
                    if (v.fits_double() && v.to_double() < 9.007199254740992e15)
                        v = LevelReal(std::max(1.0, std::floor(v.to_double())));
                    raw_.push_back(v);
                    break;
                }
            }
        } catch (const level_error& e) {
            throw generation_error(std::string("itinerary overflow: ") + e.what(), idx);
        }
    }
    return raw_[static_cast<size_t>(n) - 1];
}

LevelReal ItineraryGen::s_floor(int n) const {
    LevelReal v = s_raw(n);
    if (v.fits_double() && v.to_double() < 9.007199254740992e15)
        return LevelReal(std::max(1.0, std::floor(v.to_double()))).with_flag(v.flagged());
    return v;  // beyond 2^53 the floor is not representable apart from the value itself
}

namespace {

// widths of the stretched annulus: Delta_n = ((s+1)^kappa - s^kappa) log R,
// exact in binary64 at moderate s, asymptotic kappa s^(kappa-1) log R beyond
void stretched_delta(const LevelReal& s, double kappa, double logR, LevelReal* delta,
                     LevelReal* log_delta) {
    if (s.fits_double() && s.to_double() < 1e12) {
        double sv = s.to_double();
        double w = (std::pow(sv + 1, kappa) - std::pow(sv, kappa)) * logR;
        *delta = LevelReal(w).with_flag(s.flagged());
        *log_delta = LevelReal(std::log(w)).with_flag(s.flagged());
        return;
    }
    *delta = scale(lr_pow(s, kappa - 1), kappa * logR);
    *log_delta = add(LevelReal(std::log(kappa * logR)), scale(lr_ln(s), kappa - 1));
}

}  // namespace

BandPtr itinerary_band(const ItinerarySpec& it, const LambdaSpec& lambda, int n_terms) {
    it.validate();
    ItineraryGen gen(it);
    double logR = std::log(it.R);
    std::vector<LevelReal> la, lb, deltas, log_deltas;
    for (int n = 1; n <= n_terms; ++n) {
        LevelReal s;
        try {
            s = gen.s_raw(n);
        } catch (const generation_error&) {
            break;  // compile the representable prefix
        }
        try {
            if (it.scheme == ItinerarySpec::Scheme::Power) {
                la.push_back(scale(s, logR));
                lb.push_back(scale(add(s, LevelReal(1.0)), logR));
                deltas.push_back(LevelReal(logR));
                log_deltas.push_back(LevelReal(std::log(logR)));
            } else {
                la.push_back(scale(lr_pow(s, it.kappa), logR));
                lb.push_back(scale(lr_pow(add(s, LevelReal(1.0)), it.kappa), logR));
                LevelReal d, ld;
                stretched_delta(s, it.kappa, logR, &d, &ld);
                deltas.push_back(d);
                log_deltas.push_back(ld);
            }
        } catch (const level_error&) {
            break;
        }
    }
    if (la.empty()) throw spec_error("itinerary compiles to an empty band");
    SequenceSpec a = SequenceSpec::explicit_logs_of(la);
    a.kind = SequenceSpec::Kind::FromItinerary;
    SequenceSpec b = SequenceSpec::explicit_logs_of(lb);
    b.kind = SequenceSpec::Kind::FromItinerary;
    b.itinerary_deltas = std::move(deltas);
    b.itinerary_log_deltas = std::move(log_deltas);
    return std::make_shared<EscapeBand>(std::move(a), std::move(b), lambda,
                                        "itinerary-" + it.scheme_name());
}

ItineraryAdmissReport check_itinerary_admissible(const ItinerarySpec& it, const LambdaSpec& lambda,
                                                 double q, int horizon) {
    it.validate();
    if (!(q > 0 && q < 1)) throw spec_error("itinerary admissibility: q must lie in (0,1)");
    ItineraryGen gen(it);
    double logR = std::log(it.R);
    ItineraryAdmissReport rep;
    rep.q = q;
    std::vector<bool> ok;
    ok.push_back(true);  // pad index 0
    for (int n = 1; n < horizon; ++n) {
        LevelReal s_n, s_next;
        try {
            s_n = gen.s_raw(n);
            s_next = gen.s_raw(n + 1);
        } catch (const generation_error&) {
            break;
        }
        rep.checked_through = n;
        bool good;
        if (it.scheme == ItinerarySpec::Scheme::Power) {
            // sufficient form s_{n+1} <= R^(q s_n)
            LevelReal rhs = lr_exp(scale(s_n, q * logR));
            good = cmp(s_next, rhs) != std::strong_ordering::greater;
            rep.margins.push_back(sat_sub(rhs, s_next).value);
            // exact definition form s_{n+1} <= (q R^(s_n) + log|lambda_{n+1}|)/log R
            LevelReal rhs_exact = scale(
                add(scale(lr_exp(scale(s_n, logR)), q), LevelReal(std::log(lambda.mod_at(n + 1)))),
                1.0 / logR);
            rep.margins_exact.push_back(sat_sub(rhs_exact, s_next).value);
        } else {
            // s_{n+1} <= (q/log R)^(1/kappa) R^(s_n^kappa / kappa), checked in logs
            double cterm = std::log(q / logR) / it.kappa;
            LevelReal rhs_log = add(LevelReal(cterm), scale(lr_pow(s_n, it.kappa), logR / it.kappa));
            LevelReal lhs_log = lr_ln(s_next);
            good = cmp(lhs_log, rhs_log) != std::strong_ordering::greater;
            rep.margins.push_back(sat_sub(rhs_log, lhs_log).value);
        }
        ok.push_back(good);
        if (!good && rep.first_violation == 0) rep.first_violation = n;
    }
    int first_valid = 0;
    for (int n = rep.checked_through; n >= 1; --n) {
        if (!ok[static_cast<size_t>(n)]) break;
        first_valid = n;
    }
    if (first_valid > 0) {
        rep.admissible = true;
        rep.first_valid = first_valid;
    }
    return rep;
}

namespace {

RatioSeries cesaro_series(const ItineraryGen& gen, double power, int horizon,
                          const std::string& id) {
    SeriesBuilder b(id, horizon);
    LevelReal sum;
    for (int n = 1; n <= horizon; ++n) {
        try {
            LevelReal term = power == 1.0 ? gen.s_raw(n) : lr_pow(gen.s_raw(n), power);
            sum = add(sum, term);
        } catch (const generation_error& e) {
            b.truncate(n, e.what());
            break;
        } catch (const level_error& e) {
            b.truncate(n, e.what());
            break;
        }
        b.push(n, sat_to_double(scale(sum, 1.0 / n)), sum.flagged());
    }
    return b.take();
}

bool diverging_witness(const RatioSeries& s) {
    int c = s.reliable_count();
    if (c < 3) return false;
    double last = s.pts[static_cast<size_t>(c) - 1].value;
    double first = s.pts[0].value;
    return last >= 4.0 * std::max(first, 1.0) || s.trend.kind == TrendKind::Diverging;
}

bool monotone_increasing_tail(const RatioSeries& s) {
    int c = s.reliable_count();
    if (c < 3) return false;
    for (int i = c / 2; i + 1 < c; ++i)
        if (s.pts[static_cast<size_t>(i) + 1].value < s.pts[static_cast<size_t>(i)].value - 1e-12)
            return false;
    return true;
}

}  // namespace

AnnularResult thm_annular_dims(const ItinerarySpec& it, const LambdaSpec& lambda, double q,
                               int horizon, double R_large_threshold) {
    if (it.scheme != ItinerarySpec::Scheme::Power)
        throw spec_error("thm_annular_dims applies to the power scheme");
    AnnularResult res;
    ItineraryGen gen(it);
    res.cesaro = cesaro_series(gen, 1.0, horizon, "cesaro");
    res.limsup_witness = diverging_witness(res.cesaro);
    res.lim_witness = res.limsup_witness && monotone_increasing_tail(res.cesaro);
    res.admissibility = check_itinerary_admissible(it, lambda, q, horizon);
    res.report.horizon = horizon;
    if (res.limsup_witness) {
        res.report.hausdorff.hi = {1.0, "annular-power-upper", false, 0.0};
        res.report.theorems_applied.push_back("annular-power-upper");
    }
    bool r_large = it.R >= R_large_threshold;
    if (res.lim_witness && res.admissibility.admissible && r_large) {
        res.report.hausdorff.lo = res.report.hausdorff.hi = {1.0, "annular-power", false, 0.0};
        res.report.packing.lo = res.report.packing.hi = {1.0, "annular-power", false, 0.0};
        res.report.theorems_applied.push_back("annular-power");
    } else if (res.limsup_witness && !res.lim_witness) {
        res.notes.push_back(
            "divergence witnessed only as a limsup; the equality statement needs the full limit");
    }
    if (!r_large)
        res.notes.push_back("R below the configured large-R threshold; equality not claimed");
    // cross-check on the compiled band
    try {
        BandPtr band = itinerary_band(it, lambda, horizon + 2);
        AnalysisParams p;
        p.adm.q = q;
        p.assumptions.delta_min = std::log(it.R) / 2;
        p.assumptions.a_threshold = std::min(50.0, it.R / 2);
        p.horizon = horizon;
        p.trim = 1;
        DimensionReport cls = classify_cor12(BandView(band), p);
        if (cls.classification) {
            res.report.classification = cls.classification;
            res.notes.push_back(std::string("compiled band classifies as case (") +
                                cls.classification + ")");
        }
        for (auto& s : cls.series) res.series.push_back(std::move(s));
    } catch (const std::exception& e) {
        res.notes.push_back(std::string("band cross-check unavailable: ") + e.what());
    }
    return res;
}

AnnularResult thm_annular2_dims(const ItinerarySpec& it, const LambdaSpec& lambda, double q,
                                int horizon) {
    if (it.scheme != ItinerarySpec::Scheme::Stretched)
        throw spec_error("thm_annular2_dims applies to the stretched scheme");
    if (!lambda.bounded()) throw spec_error("thm_annular2_dims needs sup |lambda_n| < inf");
    AnnularResult res;
    ItineraryGen gen(it);
    res.cesaro = cesaro_series(gen, it.kappa, horizon, "cesaro-kappa");
    res.limsup_witness = diverging_witness(res.cesaro);
    res.admissibility = check_itinerary_admissible(it, lambda, q, horizon);
    res.strict_bound = 2.0 - 1.0 / it.kappa;

    // s_n -> infinity witness
    {
        SeriesBuilder sb("s-values", horizon);
        for (int n = 1; n <= horizon; ++n) {
            try {
                sb.push(n, sat_to_double(gen.s_raw(n)), gen.s_raw(n).flagged());
            } catch (const generation_error& e) {
                sb.truncate(n, e.what());
                break;
            }
        }
        RatioSeries sv = sb.take();
        res.s_to_inf_witness = diverging_witness(sv) && monotone_increasing_tail(sv);
        res.series.push_back(std::move(sv));
    }

    // w_n = ((kappa-1)/log R) * log s_{n+1} / (s_1^kappa + ... + s_n^kappa)
    double coeff = (it.kappa - 1) / std::log(it.R);
    SeriesBuilder wb("annular-packing", horizon);
    LevelReal sum;
    for (int n = 1; n <= horizon; ++n) {
        LevelReal lns_next;
        try {
            sum = add(sum, lr_pow(gen.s_raw(n), it.kappa));
            LevelReal s_next = gen.s_raw(n + 1);
            lns_next = cmp(s_next, LevelReal(1.0)) == std::strong_ordering::greater
                           ? lr_ln(s_next)
                           : LevelReal();
        } catch (const generation_error& e) {
            wb.truncate(n, e.what());
            break;
        } catch (const level_error& e) {
            wb.truncate(n, e.what());
            break;
        }
        if (lns_next.is_zero()) {
            wb.push(n, 0.0, sum.flagged());
            continue;
        }
        SatValue r = sat_ratio(lns_next, sum);
        wb.push(n, coeff * r.value, r.tight || lns_next.flagged() || sum.flagged());
    }
    RatioSeries w = wb.take();
    res.packing_value = w.reliable_count() ? clamp01(w.limsup_estimate()) : 0.0;
    res.strict_bound_ok = 1 + res.packing_value < res.strict_bound;

    res.report.horizon = horizon;
    if (res.limsup_witness) {
        res.report.hausdorff.hi = {1.0, "annular-stretched-upper", false, 0.0};
        res.report.theorems_applied.push_back("annular-stretched-upper");
    }
    if (res.s_to_inf_witness && res.admissibility.admissible) {
        res.report.hausdorff.lo = res.report.hausdorff.hi = {1.0, "annular-stretched", false, 0.0};
        res.report.packing.lo = res.report.packing.hi = {1 + res.packing_value,
                                                         "annular-stretched", false, 0.0};
        res.report.theorems_applied.push_back("annular-stretched");
    } else {
        res.report.packing.hi = {1 + res.packing_value, "annular-stretched-series", false, 0.0};
        if (!res.s_to_inf_witness)
            res.notes.push_back("s_n -> infinity not witnessed; packing series reported without the equality claim");
    }
    res.report.packing_estimate = 1 + res.packing_value;
    res.series.push_back(std::move(w));
    return res;
}

AnnularExampleResult cor_ann_example(double d, double kappa, double R, const LambdaSpec& lambda,
                                     double q, int horizon) {
    if (kappa <= 1) throw spec_error("cor_ann_example: kappa must exceed 1");
    if (!(d >= 0 && d < 1 - 1 / kappa))
        throw spec_error("cor_ann_example: d must lie in [0, 1 - 1/kappa)");
    AnnularExampleResult res;
    res.predicted_d = d;
    ItinerarySpec it = ItinerarySpec::example34(d, kappa, R);
    res.inner = thm_annular2_dims(it, lambda, q, horizon);

    // hypothesis witness: log s_{n+1} / s_n^kappa, scaled to land on d
    ItineraryGen gen(it);
    double coeff = (kappa - 1) / std::log(R);
    SeriesBuilder db("d-witness", horizon);
    for (int n = 1; n <= horizon; ++n) {
        try {
            LevelReal s_next = gen.s_raw(n + 1);
            LevelReal lns = cmp(s_next, LevelReal(1.0)) == std::strong_ordering::greater
                                ? lr_ln(s_next)
                                : LevelReal();
            if (lns.is_zero()) {
                db.push(n, 0.0, false);
                continue;
            }
            SatValue r = sat_ratio(lns, lr_pow(gen.s_raw(n), kappa));
            db.push(n, coeff * r.value, r.tight);
        } catch (const generation_error& e) {
            db.truncate(n, e.what());
            break;
        } catch (const level_error& e) {
            db.truncate(n, e.what());
            break;
        }
    }
    res.d_witness = db.take();
    res.measured_packing = res.inner.report.packing_estimate;
    DimensionReport& rep = res.inner.report;
    // the corollary pins both dimensions once its ratio hypothesis is witnessed
    rep.hausdorff.lo = rep.hausdorff.hi = {1.0, "annular-example-family", false, 0.0};
    if (!res.inner.s_to_inf_witness)
        res.inner.notes.push_back(
            "degenerate itinerary (s_n not diverging); corollary conclusion reported from the "
            "witnessed ratio hypothesis");
    rep.theorems_applied.push_back("annular-example-family");
    return res;
}

}  // namespace escdim
