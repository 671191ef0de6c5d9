#include "escdim/presets.hpp"

#include <cmath>

namespace escdim {

namespace {

std::vector<LevelReal> build_logs(int count, const std::function<double(int)>& log_term) {
    std::vector<LevelReal> v;
    v.reserve(static_cast<size_t>(count));
    for (int n = 1; n <= count; ++n) v.emplace_back(log_term(n));
    return v;
}

BandPtr band_of(SequenceSpec a, SequenceSpec b, const std::string& label) {
    return std::make_shared<EscapeBand>(std::move(a), std::move(b),
                                        LambdaSpec::constant_polar(1.0, 0.0), label);
}

}  // namespace

std::vector<std::string> preset_names() {
    return {"sixsmith-a", "sixsmith-b",    "sixsmith-c",       "sixsmith-d",
            "tower-d",    "tower-var",     "mcmullen-band",    "annular-power",
            "annular-stretched-d"};
}

Preset make_preset(const std::string& name, std::optional<double> d_opt,
                   std::optional<double> kappa_opt) {
    Preset p;
    p.name = name;
    p.params.horizon = 40;
    if (name == "sixsmith-a") {
        p.note = "constant-ratio geometric bands; both dimensions 1";
        p.make_band = [] {
            auto a = std::make_shared<SequenceSpec>(SequenceSpec::geometric(1.0, 2.0));
            return band_of(*a, SequenceSpec::scalar_band(3.0, a), "sixsmith-a");
        };
        p.params.adm.q = 0.9;
        p.params.assumptions.delta_min = 0.5;
        p.params.assumptions.a_threshold = 1.5;
        p.expected = {'a', 1.0, 1e-9, 1.0, 1e-9, "closed-form"};
    } else if (name == "sixsmith-b") {
        p.note = "slowly superpolynomial floor under a geometric ceiling";
        p.make_band = [] {
            return band_of(SequenceSpec::log_poly(1), SequenceSpec::geometric(1.0, 2.0),
                           "sixsmith-b");
        };
        p.params.adm.q = 0.9;
        p.params.assumptions.delta_min = 0.5;
        p.params.assumptions.a_threshold = 0.9;
        p.expected = {'b', 1.0, 1e-9, {}, 1e-3, "closed-form"};
    } else if (name == "sixsmith-c") {
        p.note = "moderately slow ceiling e^(e^n) over a_n = e^(n log n)";
        p.make_band = [] {
            auto logs = build_logs(60, [](int n) { return n * std::max(std::log(n), 0.0); });
            return band_of(SequenceSpec::explicit_logs_of(std::move(logs)),
                           SequenceSpec::double_exp(1), "sixsmith-c");
        };
        p.params.adm.q = 0.9;
        p.params.trim = 2;
        p.params.assumptions.delta_min = 2.0;
        p.params.assumptions.a_threshold = 3.0;
        p.expected = {'b', 1.0, 1e-9, {}, 1e-3, "closed-form"};
    } else if (name == "sixsmith-d") {
        p.note = "a_n = e^(n^2) with a fixed-ratio ceiling";
        p.make_band = [] {
            auto a = std::make_shared<SequenceSpec>(SequenceSpec::explicit_logs_of(
                build_logs(60, [](int n) { return static_cast<double>(n) * n; })));
            return band_of(*a, SequenceSpec::scalar_band(std::exp(1.0), a), "sixsmith-d");
        };
        p.params.adm.q = 0.9;
        p.params.trim = 2;
        p.params.assumptions.delta_min = 0.5;
        p.params.assumptions.a_threshold = 50.0;
        p.expected = {'a', 1.0, 1e-9, 1.0, 1e-9, "closed-form"};
    } else if (name == "tower-d") {
        double d = d_opt.value_or(0.5);
        p.note = "tower recurrence floor with a thin power ceiling; packing 1 + d";
        p.make_band = [d] {
            auto a = std::make_shared<SequenceSpec>(SequenceSpec::tower(d, 20.0));
            return band_of(*a, SequenceSpec::power_band(a), "tower-d");
        };
        p.params.adm.q = 0.75;
        p.params.horizon = 25;
        p.params.assumptions.delta_min = 0.25;
        p.params.assumptions.a_threshold = 2.5;
        p.params.assumptions.horizon = 25;
        p.expected = {d < 1e-12 ? 'a' : 'b', 1.0, 1e-9, 1.0 + d, 1e-3, "closed-form"};
    } else if (name == "tower-var") {
        p.note = "tower recurrence with exponent (n-1)/n; packing tends to 2";
        p.make_band = [] {
            auto a = std::make_shared<SequenceSpec>(SequenceSpec::tower_var(20.0));
            return band_of(*a, SequenceSpec::power_band(a), "tower-var");
        };
        p.params.adm.q = 0.75;
        p.params.horizon = 25;
        p.params.assumptions.delta_min = 0.25;
        p.params.assumptions.a_threshold = 50.0;
        p.params.assumptions.horizon = 25;
        p.expected = {{}, 1.0, 1e-9, {}, 1e-3, "numerical-series"};
        p.expected.packing_estimate = 1.8;  // reached from below; checked as a floor
        p.expected.p_tol = 0.2001;
    } else if (name == "mcmullen-band") {
        p.note = "slow floor under a doubly iterated exponential ceiling; both dimensions 2";
        p.make_band = [] {
            return band_of(SequenceSpec::explicit_logs_of(
                               build_logs(40, [](int n) { return std::log(n + 20.0); })),
                           SequenceSpec::log_square_tower(3.0), "mcmullen-band");
        };
        p.params.adm.q = 0.9;
        p.params.trim = 2;  // b_1 = e^3 sits below a_1 = 21; the tail from 2 is a valid band
        p.params.horizon = 25;
        p.params.assumptions.delta_min = 0.5;
        p.params.assumptions.a_threshold = 20.0;
        p.params.assumptions.horizon = 25;
        p.expected = {'d', 2.0, 1e-9, 2.0, 1e-9, "constructed"};
    } else if (name == "annular-power") {
        p.note = "linear itinerary in the power radii scheme";
        p.is_itinerary = true;
        p.itinerary = ItinerarySpec::arith(1.0, 1.0, ItinerarySpec::Scheme::Power,
                                           std::exp(4.0));
        p.params.adm.q = 0.75;
        p.expected = {{}, 1.0, 1e-9, 1.0, 1e-9, "closed-form"};
    } else if (name == "annular-stretched-d") {
        double d = d_opt.value_or(0.3);
        double kappa = kappa_opt.value_or(2.0);
        p.note = "stretched radii scheme; packing 1 + d";
        p.is_itinerary = true;
        p.itinerary = ItinerarySpec::example34(d, kappa, std::exp(1.0));
        p.params.adm.q = 0.9;
        p.params.horizon = 12;
        p.expected = {{}, 1.0, 1e-9, 1.0 + d, 1e-3, "closed-form"};
    } else {
        throw spec_error("unknown preset '" + name + "'");
    }
    if (d_opt && name != "tower-d" && name != "annular-stretched-d")
        throw spec_error("preset '" + name + "' takes no d parameter");
    return p;
}

std::vector<SelfTestResult> run_preset_selftests() {
    std::vector<SelfTestResult> out;
    for (const std::string& name : preset_names()) {
        SelfTestResult r;
        r.name = name;
        try {
            Preset p = make_preset(name);
            if (!p.is_itinerary) {
                ConsolidatedReport rep = analyze_band(p.make_band(), p.params);
                bool ok = true;
                std::string why;
                if (p.expected.tag && rep.merged.classification != *p.expected.tag) {
                    ok = false;
                    why += "tag mismatch; ";
                }
                if (p.expected.hausdorff_hi &&
                    std::abs(rep.merged.hausdorff.hi.value - *p.expected.hausdorff_hi) >
                        p.expected.h_tol) {
                    ok = false;
                    why += "hausdorff upper off; ";
                }
                if (p.expected.packing_estimate &&
                    std::abs(rep.merged.packing_estimate - *p.expected.packing_estimate) >
                        p.expected.p_tol) {
                    ok = false;
                    why += "packing estimate off; ";
                }
                r.pass = ok;
                r.detail = ok ? "ok" : why;
            } else if (p.itinerary.scheme == ItinerarySpec::Scheme::Power) {
                AnnularResult res =
                    thm_annular_dims(p.itinerary, p.lambda, p.params.adm.q, p.params.horizon);
                r.pass = res.report.hausdorff.hi.value == 1.0 &&
                         res.report.packing.hi.value == 1.0 && res.admissibility.admissible;
                r.detail = r.pass ? "ok" : "power-scheme verdict off";
            } else {
                AnnularExampleResult res =
                    cor_ann_example(p.itinerary.d, p.itinerary.kappa, p.itinerary.R, p.lambda,
                                    p.params.adm.q, p.params.horizon);
                r.pass = std::abs(res.measured_packing - (1.0 + res.predicted_d)) <
                             p.expected.p_tol &&
                         res.inner.admissibility.admissible;
                r.detail = r.pass ? "ok" : "stretched-scheme packing off";
            }
        } catch (const std::exception& e) {
            r.pass = false;
            r.detail = e.what();
        }
        out.push_back(r);
    }
    return out;
}

}  // namespace escdim
