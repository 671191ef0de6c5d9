#include "escdim/report_json.hpp"

#include <chrono>
#include <sstream>

namespace escdim {

namespace {

const char* trend_name(TrendKind k) {
    switch (k) {
        case TrendKind::ConvergingTo: return "converging-to";
        case TrendKind::Diverging: return "diverging";
        case TrendKind::Oscillating: return "oscillating";
        case TrendKind::Inconclusive: return "inconclusive";
    }
    return "?";
}

const char* clause_name(ClauseVerdict v) {
    switch (v) {
        case ClauseVerdict::Pass: return "pass";
        case ClauseVerdict::Fail: return "fail";
        case ClauseVerdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

ordered_json endpoint_json(const IntervalEndpoint& e) {
    ordered_json j;
    j["value"] = e.value;
    j["provenance"] = e.provenance;
    if (e.heuristic) j["heuristic"] = true;
    if (e.residual != 0) j["residual"] = e.residual;
    return j;
}

ordered_json interval_json(const DimInterval& iv) {
    ordered_json j;
    j["lo"] = endpoint_json(iv.lo);
    j["hi"] = endpoint_json(iv.hi);
    return j;
}

}  // namespace

ordered_json spec_to_json(const SequenceSpec& s) {
    ordered_json j;
    j["kind"] = s.kind_name();
    switch (s.kind) {
        case SequenceSpec::Kind::Explicit:
        case SequenceSpec::Kind::FromItinerary: {
            ordered_json logs = ordered_json::array();
            for (const auto& v : s.explicit_logs) logs.push_back(v.serialize());
            j["logs"] = std::move(logs);
            break;
        }
        case SequenceSpec::Kind::Geometric:
            j["c"] = s.c;
            j["R"] = s.R;
            break;
        case SequenceSpec::Kind::LogPoly:
        case SequenceSpec::Kind::DoubleExp:
            j["p"] = s.p;
            break;
        case SequenceSpec::Kind::Tower:
            j["d"] = s.d;
            j["a1"] = s.a1;
            break;
        case SequenceSpec::Kind::TowerVar:
            j["a1"] = s.a1;
            break;
        case SequenceSpec::Kind::PowerBand:
            break;
        case SequenceSpec::Kind::ScalarBand:
            j["c"] = s.c;
            break;
        case SequenceSpec::Kind::LogSquareTower:
            j["log_b1"] = s.log_b1;
            break;
    }
    if (s.base) j["base"] = spec_to_json(*s.base);
    return j;
}

ordered_json lambda_to_json(const LambdaSpec& l) {
    ordered_json j;
    j["kind"] = l.kind_name();
    switch (l.kind) {
        case LambdaSpec::Kind::Constant:
            j["modulus"] = l.modulus;
            j["argument"] = l.argument;
            break;
        case LambdaSpec::Kind::Explicit: {
            ordered_json vals = ordered_json::array();
            for (const auto& v : l.values) vals.push_back({v.real(), v.imag()});
            j["values"] = std::move(vals);
            break;
        }
        case LambdaSpec::Kind::SeededRandom:
            j["mod_lo"] = l.mod_lo;
            j["mod_hi"] = l.mod_hi;
            j["seed"] = l.seed;
            j["prng"] = "splitmix64/v1";
            break;
    }
    return j;
}

static ordered_json params_json(const AnalysisParams& p) {
    ordered_json j;
    j["q"] = p.adm.q;
    j["delta_min"] = p.assumptions.delta_min;
    j["a_threshold"] = p.assumptions.a_threshold;
    j["horizon"] = p.horizon;
    if (p.trim) j["trim"] = *p.trim;
    return j;
}

ordered_json band_echo(const EscapeBand& band, const AnalysisParams& p) {
    ordered_json j;
    j["label"] = band.label();
    j["a"] = spec_to_json(band.a_spec());
    j["b"] = spec_to_json(band.b_spec());
    j["lambda"] = lambda_to_json(band.lambda());
    j["params"] = params_json(p);
    return j;
}

ordered_json itinerary_echo(const ItinerarySpec& it, const LambdaSpec& l,
                            const AnalysisParams& p) {
    ordered_json j;
    j["scheme"] = it.scheme_name();
    j["s_kind"] = it.skind_name();
    j["R"] = it.R;
    if (it.scheme == ItinerarySpec::Scheme::Stretched) j["kappa"] = it.kappa;
    if (it.skind == ItinerarySpec::SKind::Example34) {
        j["d"] = it.d;
        j["s1"] = it.s1;
    } else if (it.skind == ItinerarySpec::SKind::Arith) {
        j["s1"] = it.s1;
        j["step"] = it.step;
    } else if (it.skind == ItinerarySpec::SKind::Explicit) {
        j["s"] = it.s_list;
    }
    j["lambda"] = lambda_to_json(l);
    j["params"] = params_json(p);
    return j;
}

ordered_json series_to_json(const RatioSeries& s) {
    ordered_json j;
    j["expression"] = s.expression_id;
    ordered_json pts = ordered_json::array();
    for (const auto& p : s.pts) {
        ordered_json row;
        row["n"] = p.n;
        row["value"] = p.value;
        if (p.flagged) row["flagged"] = true;
        if (p.saturated) row["saturated"] = true;
        pts.push_back(std::move(row));
    }
    j["points"] = std::move(pts);
    j["trend"] = trend_name(s.trend.kind);
    if (s.trend.kind == TrendKind::ConvergingTo) j["limit_estimate"] = s.trend.limit;
    j["reliable_count"] = s.reliable_count();
    if (s.first_flagged) j["first_flagged"] = s.first_flagged;
    if (s.truncated_at) {
        j["truncated_at"] = s.truncated_at;
        j["truncation_reason"] = s.truncation_reason;
    }
    return j;
}

ordered_json report_to_json(const DimensionReport& rep) {
    ordered_json j;
    j["hausdorff"] = interval_json(rep.hausdorff);
    j["packing"] = interval_json(rep.packing);
    if (rep.hausdorff_heuristic) j["hausdorff_heuristic"] = interval_json(*rep.hausdorff_heuristic);
    if (rep.packing_heuristic) j["packing_heuristic"] = interval_json(*rep.packing_heuristic);
    if (rep.classification) j["classification"] = std::string(1, rep.classification);
    j["theorems"] = rep.theorems_applied;
    j["packing_estimate"] = rep.packing_estimate;
    if (rep.measured_d) j["measured_d"] = *rep.measured_d;
    j["horizon"] = rep.horizon;
    j["trim"] = rep.trim;
    ordered_json series = ordered_json::array();
    for (const auto& s : rep.series) series.push_back(series_to_json(s));
    j["series"] = std::move(series);
    if (!rep.notes.empty()) j["notes"] = rep.notes;
    return j;
}

static ordered_json admissibility_json(const AdmissibilityReport& a) {
    ordered_json j;
    j["admissible"] = a.admissible;
    j["q"] = a.q;
    if (a.admissible) j["n0"] = a.n0;
    j["checked_through"] = a.checked_through;
    if (!a.admissible && a.first_violation_index) {
        j["first_violation_index"] = a.first_violation_index;
        j["violation_side"] = a.violation_side;
    }
    if (a.truncated_by_overflow) j["truncated_by_overflow"] = true;
    return j;
}

static ordered_json assumptions_json(const AssumptionReport& a) {
    ordered_json j;
    j["admissible"] = clause_name(a.admissible);
    j["geometric_mean"] = clause_name(a.geometric_mean);
    j["moduli"] = clause_name(a.moduli);
    j["a_lower"] = clause_name(a.a_lower);
    j["min_delta"] = a.min_delta;
    j["reliable_delta_through"] = a.reliable_delta_through;
    j["horizon"] = a.horizon;
    if (!a.notes.empty()) j["notes"] = a.notes;
    return j;
}

ordered_json consolidated_to_json(const ConsolidatedReport& rep, ordered_json spec_echo,
                                  bool with_meta) {
    ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["tool_version"] = kToolVersion;
    j["spec"] = std::move(spec_echo);
    j["trim"] = rep.trim;
    j["admissibility"] = admissibility_json(rep.admissibility);
    j["assumptions"] = assumptions_json(rep.assumptions);
    j["assumptions_ok"] = rep.assumptions_ok;
    j["witnesses"] = {{"upper_bound_criterion", rep.thmA_witness},
                      {"moderately_slow", rep.modslow_witness},
                      {"thin_band", rep.thin_witness}};
    j["report"] = report_to_json(rep.merged);
    if (with_meta) {
        auto now = std::chrono::system_clock::now().time_since_epoch();
        j["meta"] = {{"timestamp_ms",
                      std::chrono::duration_cast<std::chrono::milliseconds>(now).count()}};
    }
    return j;
}

ordered_json annular_to_json(const AnnularResult& res, ordered_json spec_echo, bool with_meta) {
    ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["tool_version"] = kToolVersion;
    j["spec"] = std::move(spec_echo);
    ordered_json adm;
    adm["admissible"] = res.admissibility.admissible;
    if (res.admissibility.admissible) adm["first_valid"] = res.admissibility.first_valid;
    if (res.admissibility.first_violation)
        adm["first_violation"] = res.admissibility.first_violation;
    adm["checked_through"] = res.admissibility.checked_through;
    j["admissibility"] = std::move(adm);
    j["witnesses"] = {{"limsup_divergence", res.limsup_witness},
                      {"lim_divergence", res.lim_witness},
                      {"s_to_infinity", res.s_to_inf_witness}};
    j["cesaro"] = series_to_json(res.cesaro);
    j["packing_value"] = 1 + res.packing_value;
    j["strict_bound"] = res.strict_bound;
    j["strict_bound_ok"] = res.strict_bound_ok;
    j["report"] = report_to_json(res.report);
    ordered_json extra = ordered_json::array();
    for (const auto& s : res.series) extra.push_back(series_to_json(s));
    j["series"] = std::move(extra);
    if (!res.notes.empty()) j["notes"] = res.notes;
    if (with_meta) {
        auto now = std::chrono::system_clock::now().time_since_epoch();
        j["meta"] = {{"timestamp_ms",
                      std::chrono::duration_cast<std::chrono::milliseconds>(now).count()}};
    }
    return j;
}

ordered_json ledger_to_json(const ConstantsLedger& led) {
    ordered_json j;
    j["c"] = led.c;
    j["c1"] = led.c1;
    j["c1_tilde"] = led.c1_tilde;
    j["c2"] = led.c2;
    j["c3"] = led.c3;
    j["c4"] = led.c4;
    j["c3_sum"] = led.c3_sum;
    j["c7"] = led.c7;
    j["C"] = led.C_big;
    j["C_tilde"] = led.C_tilde;
    j["Q"] = led.Q;
    ordered_json prov = ordered_json::array();
    for (const auto& [k, v] : led.provenance) prov.push_back({{"constant", k}, {"origin", v}});
    j["provenance"] = std::move(prov);
    return j;
}

std::string series_to_csv(const std::vector<RatioSeries>& series) {
    std::ostringstream out;
    out << "expression-id,n,value,flag\n";
    out.precision(17);
    for (const auto& s : series)
        for (const auto& p : s.pts)
            out << s.expression_id << ',' << p.n << ',' << p.value << ','
                << (p.flagged ? 1 : 0) << '\n';
    return out.str();
}

}  // namespace escdim
