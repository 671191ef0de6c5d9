#include "escdim/dimension.hpp"

#include <algorithm>
#include <cmath>

namespace escdim {

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

namespace {

double sat_exp(double x) {
    if (x > 709.0) return kSat;
    if (x < -745.0) return 0.0;
    return std::exp(x);
}

// signed num/den with den required positive; den <= 0 marks the point flagged
SatValue guarded_ratio(const LevelReal& num, const LevelReal& den) {
    if (den.sign() <= 0) return {0.0, true};
    SatValue r = sat_ratio(num, den);
    r.tight = r.tight || num.flagged() || den.flagged();
    return r;
}

LevelReal min_lr(const LevelReal& x, const LevelReal& y) {
    return cmp(x, y) == std::strong_ordering::greater ? y : x;
}

LevelReal clamp_lr(const LevelReal& v, const LevelReal& lo, const LevelReal& hi) {
    if (cmp(v, lo) == std::strong_ordering::less) return lo;
    if (cmp(v, hi) == std::strong_ordering::greater) return hi;
    return v;
}

}  // namespace

RatioSeries thmA_series(const BandView& band, int horizon) {
    SeriesBuilder b("thmA", horizon);
    LevelReal sum_log_a;
    for (int n = 1; n <= horizon; ++n) {
        LevelReal diff;
        try {
            sum_log_a = add(sum_log_a, band.log_a(n));
            diff = scale(sub(band.terms(n + 1).log_delta, sum_log_a), 1.0 / n);
        } catch (const generation_error& e) {
            b.truncate(n, e.what());
            break;
        } catch (const level_error& e) {
            b.truncate(n, e.what());
            break;
        }
        b.push(n, sat_exp(sat_to_double(diff)), diff.flagged());
    }
    return b.take();
}

bool thmA_witnessed(const RatioSeries& s) {
    int c = s.reliable_count();
    if (c < 3) return false;
    double est = s.liminf_estimate();
    double last = s.pts[static_cast<size_t>(c) - 1].value;
    double mid = s.pts[static_cast<size_t>(c) / 2].value;
    return est < 0.25 && last <= mid + 1e-12;
}

RemAResult remA_tests(const BandView& band, int horizon) {
    RemAResult r;
    SeriesBuilder ub("remA-ratio", horizon);
    SeriesBuilder gb("geometric-mean", horizon);
    LevelReal sum_log_a;
    for (int n = 1; n <= horizon; ++n) {
        LevelReal log_delta_next;
        try {
            sum_log_a = add(sum_log_a, band.log_a(n));
            log_delta_next = band.terms(n + 1).log_delta;
        } catch (const generation_error& e) {
            ub.truncate(n, e.what());
            gb.truncate(n, e.what());
            break;
        } catch (const level_error& e) {
            ub.truncate(n, e.what());
            gb.truncate(n, e.what());
            break;
        }
        gb.push(n, sat_to_double(scale(sum_log_a, 1.0 / n)), sum_log_a.flagged());
        if (sum_log_a.sign() <= 0) continue;  // pre-asymptotic
        ub.push_sat(n, guarded_ratio(log_delta_next, sum_log_a), log_delta_next.flagged());
    }
    r.ratio = ub.take();
    r.gm = gb.take();
    r.liminf_lt_one = r.ratio.reliable_count() >= 3 && r.ratio.liminf_estimate() < 0.999;
    r.limsup_lt_one = r.ratio.reliable_count() >= 3 && r.ratio.limsup_estimate() < 0.999;
    int gc = r.gm.reliable_count();
    r.gm_diverges = gc >= 3 && r.gm.trend.kind != TrendKind::Oscillating &&
                    r.gm.pts[static_cast<size_t>(gc) - 1].value >
                        r.gm.pts[static_cast<size_t>(gc) / 2].value;
    return r;
}

RatioSeries packing_upper_series(const BandView& band, int horizon) {
    SeriesBuilder b("packing-upper", horizon);
    LevelReal sum_log_a, sum_log_delta;
    for (int n = 1; n <= horizon; ++n) {
        try {
            if (n == 1) sum_log_delta = band.terms(1).log_delta;
            sum_log_a = add(sum_log_a, band.log_a(n));
            sum_log_delta = add(sum_log_delta, band.terms(n + 1).log_delta);
        } catch (const generation_error& e) {
            b.truncate(n, e.what());
            break;
        } catch (const level_error& e) {
            b.truncate(n, e.what());
            break;
        }
        if (sum_log_a.sign() <= 0) continue;  // pre-asymptotic
        b.push_sat(n, guarded_ratio(sum_log_delta, sum_log_a));
    }
    return b.take();
}

RatioSeries hausdorff_upper_series(const BandView& band, int horizon) {
    SeriesBuilder b("hausdorff-upper", horizon);
    LevelReal sum_log_a, sum_log_delta;
    for (int n = 1; n <= horizon; ++n) {
        LevelReal den;
        try {
            sum_log_delta = add(sum_log_delta, band.terms(n).log_delta);
            if (n >= 2) sum_log_a = add(sum_log_a, band.log_a(n - 1));
            // log+(a_n / Delta_{n+1}) computed from logs, never by division
            LevelReal gap = sub(band.log_a(n), band.terms(n + 1).log_delta);
            LevelReal logplus = gap.sign() > 0 ? gap : LevelReal();
            den = add(sum_log_a, logplus.with_flag(gap.flagged()));
        } catch (const generation_error& e) {
            b.truncate(n, e.what());
            break;
        } catch (const level_error& e) {
            b.truncate(n, e.what());
            break;
        }
        if (n == 1 || den.sign() <= 0) continue;  // pre-asymptotic
        b.push_sat(n, guarded_ratio(sum_log_delta, den));
    }
    return b.take();
}

RatioSeries packing_lower_b_series(const BandView& band, int horizon) {
    SeriesBuilder b("packing-lower-b", horizon);
    LevelReal sum_log_b, sum_log_delta;
    for (int n = 1; n <= horizon; ++n) {
        try {
            if (n == 1) sum_log_delta = band.terms(1).log_delta;
            sum_log_b = add(sum_log_b, band.log_b(n));
            sum_log_delta = add(sum_log_delta, band.terms(n + 1).log_delta);
        } catch (const generation_error& e) {
            b.truncate(n, e.what());
            break;
        } catch (const level_error& e) {
            b.truncate(n, e.what());
            break;
        }
        if (sum_log_b.sign() <= 0) continue;  // pre-asymptotic
        b.push_sat(n, guarded_ratio(sum_log_delta, sum_log_b));
    }
    return b.take();
}

RatioSeries delta_log_ratio_series(const BandView& band, int horizon) {
    SeriesBuilder b("delta-log-ratio", horizon);
    for (int n = 1; n <= horizon; ++n) {
        LevelReal num, den;
        try {
            num = band.terms(n + 1).log_delta;
            den = band.log_a(n);
        } catch (const generation_error& e) {
            b.truncate(n, e.what());
            break;
        } catch (const level_error& e) {
            b.truncate(n, e.what());
            break;
        }
        if (den.sign() <= 0) continue;  // pre-asymptotic index
        b.push_sat(n, guarded_ratio(num, den));
    }
    return b.take();
}

RatioSeries delta_logb_ratio_series(const BandView& band, int horizon) {
    SeriesBuilder b("delta-logb-ratio", horizon);
    for (int n = 1; n <= horizon; ++n) {
        LevelReal num, den;
        try {
            num = band.terms(n + 1).log_delta;
            den = band.log_b(n);
        } catch (const generation_error& e) {
            b.truncate(n, e.what());
            break;
        } catch (const level_error& e) {
            b.truncate(n, e.what());
            break;
        }
        if (den.sign() <= 0) continue;
        b.push_sat(n, guarded_ratio(num, den));
    }
    return b.take();
}

RatioSeries delta_over_a_series(const BandView& band, int horizon) {
    SeriesBuilder b("delta-over-a", horizon);
    for (int n = 1; n <= horizon; ++n) {
        LevelReal num, den;
        try {
            num = band.terms(n + 1).delta;
            den = lr_exp(band.log_a(n));
        } catch (const generation_error& e) {
            b.truncate(n, e.what());
            break;
        } catch (const level_error& e) {
            b.truncate(n, e.what());
            break;
        }
        b.push_sat(n, guarded_ratio(num, den));
    }
    return b.take();
}

RatioSeries delta_over_b_series(const BandView& band, int horizon) {
    SeriesBuilder b("delta-over-b", horizon);
    for (int n = 1; n <= horizon; ++n) {
        LevelReal num, den;
        try {
            num = band.terms(n + 1).delta;
            den = lr_exp(band.log_b(n));
        } catch (const generation_error& e) {
            b.truncate(n, e.what());
            break;
        } catch (const level_error& e) {
            b.truncate(n, e.what());
            break;
        }
        b.push_sat(n, guarded_ratio(num, den));
    }
    return b.take();
}

RatioSeries logb_over_loga_series(const BandView& band, int horizon) {
    SeriesBuilder b("logb-over-loga", horizon);
    for (int n = 1; n <= horizon; ++n) {
        LevelReal num, den;
        try {
            num = band.log_b(n);
            den = band.log_a(n);
        } catch (const generation_error& e) {
            b.truncate(n, e.what());
            break;
        } catch (const level_error& e) {
            b.truncate(n, e.what());
            break;
        }
        if (den.sign() <= 0) continue;
        b.push_sat(n, guarded_ratio(num, den));
    }
    return b.take();
}

// ---- Theorem-B expressions ----

namespace {

struct PhiPsiParts {
    LevelReal num_common;   // sum_{k=1}^{n-1} min(ln Delta_{k+1}, ln x_k)
    LevelReal sum_logx;     // sum_{k=1}^{n} ln x_k
    LevelReal last_min;     // min(ln Delta_{n+1}, ln x_n)
};

PhiPsiParts phi_psi_parts(const BandView& band, std::span<const LevelReal> x_logs, int n) {
    if (n < 1 || static_cast<int>(x_logs.size()) < n)
        throw pre_asymptotic_error("phi/psi: need x_1..x_n");
    PhiPsiParts parts;
    for (int k = 1; k <= n; ++k) {
        const LevelReal& lx = x_logs[static_cast<size_t>(k) - 1];
        parts.sum_logx = add(parts.sum_logx, lx);
        LevelReal m = min_lr(band.terms(k + 1).log_delta, lx);
        if (k < n) parts.num_common = add(parts.num_common, m);
        else parts.last_min = m;
    }
    return parts;
}

}  // namespace

double phi_value(const BandView& band, std::span<const LevelReal> x_logs, int n) {
    PhiPsiParts parts = phi_psi_parts(band, x_logs, n);
    LevelReal den = sub(parts.sum_logx, parts.last_min);
    if (den.sign() <= 0)
        throw pre_asymptotic_error(
            "phi: nonpositive denominator (pre-asymptotic index); use a larger n or a trimmed prefix");
    return sat_ratio(parts.num_common, den).value;
}

double psi_value(const BandView& band, std::span<const LevelReal> x_logs, int n) {
    PhiPsiParts parts = phi_psi_parts(band, x_logs, n);
    LevelReal num = add(parts.num_common, parts.last_min);
    if (parts.sum_logx.sign() <= 0)
        throw pre_asymptotic_error(
            "psi: nonpositive denominator (pre-asymptotic index); use a larger n or a trimmed prefix");
    return sat_ratio(num, parts.sum_logx).value;
}

std::string x_strategy_name(XStrategy s) {
    switch (s) {
        case XStrategy::AtA: return "a";
        case XStrategy::AtB: return "b";
        case XStrategy::AtClampedDelta: return "delta-clamped";
    }
    return "?";
}

LevelReal x_log_at(const BandView& band, XStrategy s, int k) {
    BandTerms t = band.terms(k);
    switch (s) {
        case XStrategy::AtA: return t.log_a;
        case XStrategy::AtB: return t.log_b;
        case XStrategy::AtClampedDelta: {
            LevelReal ld = band.terms(k + 1).log_delta;
            return clamp_lr(ld, t.log_a, t.log_b).with_flag(ld.flagged());
        }
    }
    return t.log_a;
}

namespace {

RatioSeries phi_psi_series(const BandView& band, XStrategy s, int horizon, bool is_phi) {
    SeriesBuilder b((is_phi ? std::string("phi@") : std::string("psi@")) + x_strategy_name(s),
                    horizon);
    LevelReal num_common, sum_logx;
    LevelReal prev_min;
    bool have_prev = false;
    for (int n = 1; n <= horizon; ++n) {
        LevelReal num, den;
        try {
            LevelReal lx = x_log_at(band, s, n);
            sum_logx = add(sum_logx, lx);
            if (have_prev) num_common = add(num_common, prev_min);
            LevelReal last_min = min_lr(band.terms(n + 1).log_delta, lx);
            prev_min = last_min;
            have_prev = true;
            num = is_phi ? num_common : add(num_common, last_min);
            den = is_phi ? sub(sum_logx, last_min) : sum_logx;
        } catch (const generation_error& e) {
            b.truncate(n, e.what());
            break;
        } catch (const level_error& e) {
            b.truncate(n, e.what());
            break;
        }
        if (den.sign() <= 0 && !den.flagged()) continue;  // pre-asymptotic
        b.push_sat(n, guarded_ratio(num, den));
    }
    return b.take();
}

}  // namespace

RatioSeries phi_series(const BandView& band, XStrategy s, int horizon) {
    return phi_psi_series(band, s, horizon, true);
}
RatioSeries psi_series(const BandView& band, XStrategy s, int horizon) {
    return phi_psi_series(band, s, horizon, false);
}

// ---- theorem-level operations ----

namespace {

BandView make_view(const BandPtr& band, const AnalysisParams& p, int* trim_out) {
    AdmissibilityReport adm = check_admissible(BandView(band), p.adm, p.horizon + 1);
    int trim = p.trim.value_or(adm.admissible ? adm.n0 : 1);
    if (trim_out) *trim_out = trim;
    return BandView(band, trim - 1);
}

void require_assumptions(const BandView& band, const AnalysisParams& p) {
    AssumptionReport rep = check_assumptions(band, p.adm, p.assumptions);
    if (!rep.all_pass()) {
        std::string clause = rep.admissible != ClauseVerdict::Pass        ? "(a) admissibility"
                             : rep.geometric_mean != ClauseVerdict::Pass ? "(b) geometric-mean divergence"
                             : rep.moduli != ClauseVerdict::Pass         ? "(c) moduli lower bound"
                                                                         : "(d) a-sequence lower bound";
        throw spec_error("assumptions not satisfied: clause " + clause);
    }
}

}  // namespace

DimensionReport thmB_bounds(const BandView& band, const AnalysisParams& p) {
    require_assumptions(band, p);
    DimensionReport rep;
    rep.horizon = p.horizon;
    rep.theorems_applied.push_back("phi-psi-bounds");
    double phi_inf = 2, phi_sup = -1, psi_inf = 2, psi_sup = -1;
    for (XStrategy s : {XStrategy::AtA, XStrategy::AtB, XStrategy::AtClampedDelta}) {
        RatioSeries fs = phi_series(band, s, p.horizon);
        RatioSeries gs = psi_series(band, s, p.horizon);
        if (fs.reliable_count() > 0) {
            phi_inf = std::min(phi_inf, fs.liminf_estimate());
            phi_sup = std::max(phi_sup, fs.liminf_estimate());
        }
        if (gs.reliable_count() > 0) {
            psi_inf = std::min(psi_inf, gs.limsup_estimate());
            psi_sup = std::max(psi_sup, gs.limsup_estimate());
        }
        rep.series.push_back(std::move(fs));
        rep.series.push_back(std::move(gs));
    }
    if (phi_sup < phi_inf) { phi_inf = 0; phi_sup = 1; }
    if (psi_sup < psi_inf) { psi_inf = 0; psi_sup = 1; }
    rep.hausdorff.lo = {1 + clamp01(phi_inf), "phi-candidate-inf", true, 0.0};
    rep.hausdorff.hi = {1 + clamp01(phi_sup), "phi-candidate-sup", true, 0.0};
    rep.packing.lo = {1 + clamp01(psi_inf), "psi-candidate-inf", true, 0.0};
    rep.packing.hi = {1 + clamp01(psi_sup), "psi-candidate-sup", true, 0.0};
    rep.notes.push_back(
        "candidate extremizers x_k in {a_k, b_k, clamp(Delta_{k+1})}; heuristic bound tightener, "
        "sound endpoints come from the basic-bounds corollary");
    return rep;
}

DimensionReport cor_dim_bounds(const BandView& band, const AnalysisParams& p) {
    require_assumptions(band, p);
    DimensionReport rep;
    rep.horizon = p.horizon;
    rep.theorems_applied.push_back("basic-bounds");
    RatioSeries hu = hausdorff_upper_series(band, p.horizon);
    RatioSeries pu = packing_upper_series(band, p.horizon);
    RatioSeries qa = delta_over_a_series(band, p.horizon);
    RatioSeries rb = logb_over_loga_series(band, p.horizon);

    rep.hausdorff.lo = {1.0, "basic-bounds", false, 0.0};
    rep.packing.lo = {1.0, "basic-bounds", false, 0.0};
    bool bounded_direct = qa.reliable_count() >= 3 && qa.trend.kind != TrendKind::Diverging &&
                          qa.limsup_estimate() < 1e6;
    bool bounded_remark = band.lambda().bounded() && rb.reliable_count() >= 3 &&
                          rb.trend.kind != TrendKind::Diverging && rb.limsup_estimate() < 1e6;
    if (bounded_direct || bounded_remark) {
        rep.hausdorff.lo = {1.0, "bounded-width-ratio", false, 0.0};
        rep.hausdorff.hi = {1.0, "bounded-width-ratio", false,
                            hu.reliable_count() ? std::max(0.0, hu.liminf_estimate()) : 0.0};
        rep.theorems_applied.push_back(bounded_remark ? "bounded-width-ratio-via-logb-loga"
                                                      : "bounded-width-ratio");
        RatioSeries pl = packing_lower_b_series(band, p.horizon);
        if (pl.reliable_count() > 0)
            rep.packing.lo = {1 + clamp01(pl.limsup_estimate()), "packing-lower-b", false, 0.0};
        rep.series.push_back(std::move(pl));
    } else if (hu.reliable_count() > 0) {
        rep.hausdorff.hi = {1 + clamp01(hu.liminf_estimate()), "hausdorff-upper", false, 0.0};
    }
    if (pu.reliable_count() > 0)
        rep.packing.hi = {1 + clamp01(pu.limsup_estimate()), "packing-upper", false, 0.0};
    rep.packing_estimate = rep.packing.hi.value;
    rep.series.push_back(std::move(hu));
    rep.series.push_back(std::move(pu));
    rep.series.push_back(std::move(qa));
    rep.series.push_back(std::move(rb));
    return rep;
}

DimensionReport classify_cor12(const BandView& band, const AnalysisParams& p) {
    require_assumptions(band, p);
    DimensionReport rep;
    rep.horizon = p.horizon;
    RatioSeries s_ab = delta_log_ratio_series(band, p.horizon);
    RatioSeries s_bw = remA_tests(band, p.horizon).ratio;  // weaker (b): over log prod a
    RatioSeries s_cd = delta_logb_ratio_series(band, p.horizon);
    RatioSeries s_dw = delta_over_b_series(band, p.horizon);

    auto decreasing_tail = [](const RatioSeries& s) {
        int c = s.reliable_count();
        return c >= 3 && s.pts[static_cast<size_t>(c) - 1].value <=
                             s.pts[static_cast<size_t>(c) / 2].value + 1e-12;
    };
    bool tag_a = s_ab.reliable_count() >= 3 &&
                 (s_ab.limsup_estimate() <= 1e-9 ||
                  (s_ab.trend.kind == TrendKind::ConvergingTo && decreasing_tail(s_ab) &&
                   s_ab.trend.limit <= 1e-3));
    bool tag_b = (s_ab.reliable_count() >= 3 && s_ab.liminf_estimate() < 0.999) ||
                 (s_bw.reliable_count() >= 3 && s_bw.liminf_estimate() < 0.999);
    bool tag_d = (s_cd.reliable_count() >= 3 && s_cd.liminf_estimate() > 1.001) ||
                 (s_dw.reliable_count() >= 3 && s_dw.liminf_estimate() > 1e-6 &&
                  s_dw.trend.kind != TrendKind::ConvergingTo);
    bool tag_c = !tag_d && s_cd.reliable_count() >= 3 && s_cd.liminf_estimate() >= 1.0 - 1e-6;

    if (tag_d) {
        rep.classification = 'd';
        rep.hausdorff.lo = rep.hausdorff.hi = {2.0, "extremal-case-d", false, 0.0};
        rep.packing.lo = rep.packing.hi = {2.0, "extremal-case-d", false, 0.0};
    } else if (tag_a) {
        rep.classification = 'a';
        rep.hausdorff.lo = rep.hausdorff.hi = {1.0, "extremal-case-a", false,
                                               std::max(0.0, s_ab.limsup_estimate())};
        rep.packing.lo = rep.packing.hi = {1.0, "extremal-case-a", false,
                                           std::max(0.0, s_ab.limsup_estimate())};
    } else if (tag_c) {
        rep.classification = 'c';
        rep.packing.lo = rep.packing.hi = {2.0, "extremal-case-c", false, 0.0};
    } else if (tag_b) {
        rep.classification = 'b';
        rep.hausdorff.lo = rep.hausdorff.hi = {1.0, "extremal-case-b", false, 0.0};
    }
    if (rep.classification) rep.theorems_applied.push_back("extremal-cases");
    rep.series.push_back(std::move(s_ab));
    rep.series.push_back(std::move(s_bw));
    rep.series.push_back(std::move(s_cd));
    rep.series.push_back(std::move(s_dw));
    return rep;
}

ModSlowResult moderately_slow_test(const BandView& band, int horizon) {
    ModSlowResult res;
    SeriesBuilder b("modslow", horizon);
    for (int n = 1; n <= horizon; ++n) {
        LevelReal lb;
        try {
            lb = band.log_b(n);
        } catch (const generation_error& e) {
            b.truncate(n, e.what());
            break;
        } catch (const level_error& e) {
            b.truncate(n, e.what());
            break;
        }
        if (lb.sign() <= 0) {
            b.push(n, 0.0, lb.flagged());
            continue;
        }
        LevelReal w = scale(lr_ln(lb), 1.0 / n);
        b.push(n, sat_exp(sat_to_double(w)), w.flagged());
    }
    res.v = b.take();
    int c = res.v.reliable_count();
    if (c >= 3) {
        double first = res.v.pts[0].value;
        res.bounded_witness = res.v.trend.kind != TrendKind::Diverging &&
                              res.v.limsup_estimate() <= 4.0 * std::max(first, 1.0) + 10.0;
    }
    res.conclusion = res.bounded_witness
                         ? "bounded witness: hausdorff dimension 1 under assumptions (a)-(d)"
                         : "no bounded witness at this horizon";
    return res;
}

DimensionReport growth_rate_dims(const SequenceSpec& a, double c, const LambdaSpec& lambda,
                                 const AnalysisParams& p) {
    if (c <= 1) throw spec_error("growth-rate: c must exceed 1");
    auto lower = std::make_shared<SequenceSpec>(
        SequenceSpec::scalar_band(1.0 / c, std::make_shared<SequenceSpec>(a)));
    SequenceSpec upper = SequenceSpec::scalar_band(c * c, lower);
    auto band = std::make_shared<EscapeBand>(*lower, upper, lambda, "growth-rate");
    int trim = 1;
    AnalysisParams q = p;
    BandView view = make_view(band, q, &trim);
    DimensionReport rep = classify_cor12(view, q);
    rep.trim = trim;
    rep.theorems_applied.push_back("growth-rate");
    rep.notes.push_back("band [a/c, c a], width ratio 2 ln c");
    return rep;
}

ThinResult thin_formula(const BandView& band, const AnalysisParams& p) {
    require_assumptions(band, p);
    ThinResult res;
    res.thin_ratio = logb_over_loga_series(band, p.horizon);
    {
        SeriesBuilder sb("stolz-pair", p.horizon);
        LevelReal sa, sbsum;
        for (int n = 1; n <= p.horizon; ++n) {
            try {
                sa = add(sa, band.log_a(n));
                sbsum = add(sbsum, band.log_b(n));
            } catch (const generation_error& e) {
                sb.truncate(n, e.what());
                break;
            } catch (const level_error& e) {
                sb.truncate(n, e.what());
                break;
            }
            sb.push_sat(n, guarded_ratio(sbsum, sa));
        }
        res.stolz = sb.take();
    }
    const RatioSeries& t = res.thin_ratio;
    int c = t.reliable_count();
    bool monotone_down = c >= 3 && t.pts[static_cast<size_t>(c) - 1].value <=
                                       t.pts[static_cast<size_t>(c) / 2].value + 1e-9;
    res.witnessed = band.lambda().bounded() && c >= 3 &&
                    ((t.trend.kind == TrendKind::ConvergingTo && monotone_down &&
                      std::abs(t.trend.limit - 1.0) <= 0.05) ||
                     t.pts[static_cast<size_t>(c) - 1].value <= 1.02);
    if (!res.witnessed) return res;
    DimensionReport& rep = res.report;
    rep.horizon = p.horizon;
    rep.theorems_applied.push_back("thin-band-formula");
    RatioSeries pu = packing_upper_series(band, p.horizon);
    double est = pu.reliable_count() ? 1 + clamp01(pu.limsup_estimate()) : 1.0;
    rep.hausdorff.lo = rep.hausdorff.hi = {1.0, "thin-band-formula", false, 0.0};
    rep.packing.lo = rep.packing.hi = {est, "thin-band-formula", false, 0.0};
    rep.packing_estimate = est;
    rep.series.push_back(std::move(pu));
    return res;
}

Thin2Result cor_thin2(const BandView& band, const AnalysisParams& p) {
    Thin2Result res;
    ThinResult thin = thin_formula(band, p);
    res.d_series = delta_log_ratio_series(band, p.horizon);
    const RatioSeries& s = res.d_series;
    int c = s.reliable_count();
    bool small_step = false;
    if (c >= 3) {
        double last = s.pts[static_cast<size_t>(c) - 1].value;
        double prev = s.pts[static_cast<size_t>(c) - 2].value;
        small_step = std::abs(last - prev) <= 0.05 * std::max(1.0, std::abs(last));
    }
    res.converged = thin.witnessed && c >= 3 &&
                    (s.trend.kind == TrendKind::ConvergingTo || small_step);
    if (!res.converged) return res;
    res.measured_d = clamp01(s.last_reliable());
    DimensionReport& rep = res.report;
    rep.horizon = p.horizon;
    rep.theorems_applied.push_back("thin-band-limit-d");
    rep.measured_d = res.measured_d;
    rep.hausdorff.lo = rep.hausdorff.hi = {1.0, "thin-band-limit-d", false, 0.0};
    rep.packing.lo = rep.packing.hi = {1 + res.measured_d, "thin-band-limit-d", false, 0.0};
    rep.packing_estimate = 1 + res.measured_d;
    return res;
}

ConsolidatedReport analyze_band(const BandPtr& band, const AnalysisParams& p) {
    ConsolidatedReport out;
    AdmissibilityReport adm0 = check_admissible(BandView(band), p.adm, p.horizon + 1);
    out.trim = p.trim.value_or(adm0.admissible ? adm0.n0 : 1);
    BandView view(band, out.trim - 1);
    out.admissibility = adm0;
    out.assumptions = check_assumptions(view, p.adm, p.assumptions);
    out.assumptions_ok = out.assumptions.all_pass();

    DimensionReport& m = out.merged;
    m.horizon = p.horizon;
    m.trim = out.trim;

    RatioSeries tA = thmA_series(view, p.horizon);
    out.thmA_witness = thmA_witnessed(tA);
    RemAResult remA = remA_tests(view, p.horizon);
    ModSlowResult ms = moderately_slow_test(view, p.horizon);
    out.modslow_witness = ms.bounded_witness;

    double h_lo = 1.0, h_hi = 2.0, p_lo = 1.0, p_hi = 2.0;
    std::string h_lo_src = "generic", h_hi_src = "generic", p_lo_src = "generic",
                p_hi_src = "generic";
    bool h_hi_exact = false, p_hi_exact = false, h_lo_exact = false, p_lo_exact = false;

    if (out.thmA_witness) {
        h_hi = 1.0;
        h_hi_src = "upper-bound-criterion";
        m.theorems_applied.push_back("upper-bound-criterion");
    }
    if (out.assumptions_ok) {
        DimensionReport cor = cor_dim_bounds(view, p);
        if (cor.hausdorff.hi.value < h_hi) { h_hi = cor.hausdorff.hi.value; h_hi_src = cor.hausdorff.hi.provenance; }
        if (cor.packing.hi.value < p_hi) { p_hi = cor.packing.hi.value; p_hi_src = cor.packing.hi.provenance; }
        if (cor.packing.lo.value > p_lo) { p_lo = cor.packing.lo.value; p_lo_src = cor.packing.lo.provenance; }
        m.packing_estimate = cor.packing_estimate;
        for (auto& s : cor.series) m.series.push_back(std::move(s));
        for (auto& t : cor.theorems_applied) m.theorems_applied.push_back(t);

        DimensionReport cls = classify_cor12(view, p);
        m.classification = cls.classification;
        if (cls.classification == 'a') {
            h_hi = 1.0; h_hi_src = "extremal-case-a"; h_hi_exact = true;
            p_hi = 1.0; p_hi_src = "extremal-case-a"; p_hi_exact = true;
            m.packing_estimate = 1.0;
        } else if (cls.classification == 'b') {
            h_hi = 1.0; h_hi_src = "extremal-case-b"; h_hi_exact = true;
        } else if (cls.classification == 'c') {
            p_lo = 2.0; p_lo_src = "extremal-case-c"; p_lo_exact = true;
            p_hi = 2.0; p_hi_src = "extremal-case-c"; p_hi_exact = true;
        } else if (cls.classification == 'd') {
            h_lo = h_hi = 2.0; h_lo_src = h_hi_src = "extremal-case-d";
            h_lo_exact = h_hi_exact = true;
            p_lo = p_hi = 2.0; p_lo_src = p_hi_src = "extremal-case-d";
            p_lo_exact = p_hi_exact = true;
        }
        if (cls.classification == 'c' || cls.classification == 'd') m.packing_estimate = 2.0;
        for (auto& s : cls.series) m.series.push_back(std::move(s));
        for (auto& t : cls.theorems_applied) m.theorems_applied.push_back(t);

        if (ms.bounded_witness) {
            if (h_hi > 1.0) { h_hi = 1.0; h_hi_src = "moderately-slow"; }
            m.theorems_applied.push_back("moderately-slow");
        }

        ThinResult thin = thin_formula(view, p);
        out.thin_witness = thin.witnessed;
        m.series.push_back(std::move(thin.thin_ratio));
        m.series.push_back(std::move(thin.stolz));
        if (thin.witnessed) {
            if (h_hi > 1.0) { h_hi = 1.0; h_hi_src = "thin-band-formula"; }
            // exact extremal-case conclusions take precedence over the
            // finite-horizon point estimate
            bool exact_packing = m.classification == 'a' || m.classification == 'c' ||
                                 m.classification == 'd';
            if (!exact_packing) {
                m.packing_estimate = thin.report.packing_estimate;
                p_lo = p_hi = thin.report.packing_estimate;
                p_lo_src = p_hi_src = "thin-band-formula";
            }
            m.theorems_applied.push_back("thin-band-formula");
            Thin2Result t2 = cor_thin2(view, p);
            if (t2.converged) {
                m.measured_d = t2.measured_d;
                m.series.push_back(std::move(t2.d_series));
                m.theorems_applied.push_back("thin-band-limit-d");
            }
        }

        DimensionReport tb = thmB_bounds(view, p);
        m.hausdorff_heuristic = tb.hausdorff;
        m.packing_heuristic = tb.packing;
        for (auto& s : tb.series) m.series.push_back(std::move(s));
    } else {
        m.notes.push_back("assumptions failed; only the upper-bound criterion was evaluated");
        m.packing_estimate = p_hi;
    }

    m.series.push_back(std::move(tA));
    m.series.push_back(std::move(remA.ratio));
    m.series.push_back(std::move(remA.gm));
    m.series.push_back(std::move(ms.v));

    // an exact theorem conclusion overrides a conflicting numeric estimate on
    // the other endpoint; two conflicting estimates widen with a note
    if (h_lo > h_hi) {
        if (h_hi_exact && !h_lo_exact) { h_lo = h_hi; h_lo_src = h_hi_src; }
        else if (h_lo_exact && !h_hi_exact) { h_hi = h_lo; h_hi_src = h_lo_src; }
        else { m.notes.push_back("inconsistent hausdorff witnesses; interval widened"); std::swap(h_lo, h_hi); }
    }
    if (p_lo > p_hi) {
        if (p_hi_exact && !p_lo_exact) { p_lo = p_hi; p_lo_src = p_hi_src; }
        else if (p_lo_exact && !p_hi_exact) { p_hi = p_lo; p_hi_src = p_lo_src; }
        else { m.notes.push_back("inconsistent packing witnesses; interval widened"); std::swap(p_lo, p_hi); }
    }
    m.hausdorff.lo = {h_lo, h_lo_src, false, 0.0};
    m.hausdorff.hi = {h_hi, h_hi_src, false, 0.0};
    m.packing.lo = {p_lo, p_lo_src, false, 0.0};
    m.packing.hi = {p_hi, p_hi_src, false, 0.0};
    if (!out.assumptions_ok) m.packing_estimate = std::max(1.0, std::min(2.0, m.packing_estimate));
    return out;
}

}  // namespace escdim
