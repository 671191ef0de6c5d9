#pragma once

#include <functional>
#include <optional>

#include "escdim/annular.hpp"
#include "escdim/dimension.hpp"

namespace escdim {

// What a preset is expected to report, checked by the hidden selftest command.
struct ExpectedFragment {
    std::optional<char> tag;
    std::optional<double> hausdorff_hi;
    double h_tol = 1e-9;
    std::optional<double> packing_estimate;
    double p_tol = 1e-3;
    std::string source;  // closed-form | numerical-series | constructed
};

struct Preset {
    std::string name;
    std::string note;
    bool is_itinerary = false;
    std::function<BandPtr()> make_band;  // band presets
    AnalysisParams params;
    ItinerarySpec itinerary;  // itinerary presets
    LambdaSpec lambda = LambdaSpec::constant_polar(1.0, 0.0);
    ExpectedFragment expected;
};

std::vector<std::string> preset_names();
Preset make_preset(const std::string& name, std::optional<double> d = {},
                   std::optional<double> kappa = {});

struct SelfTestResult {
    std::string name;
    bool pass = false;
    std::string detail;
};
std::vector<SelfTestResult> run_preset_selftests();

}  // namespace escdim
