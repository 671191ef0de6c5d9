#pragma once

#include <optional>
#include <string>

#include "escdim/annular.hpp"
#include "escdim/dimension.hpp"

namespace escdim {

// Parsed band or itinerary specification file. The format is sectioned text:
//
//   [a]            [b]              [lambda]        [params]
//   kind = tower   kind = power-band  kind = constant  q = 0.75
//   d = 0.5                           modulus = 1      delta_min = 0.25
//   a1 = 20                           argument = 0     horizon = 25
//
// Itinerary files use a single [itinerary] section (scheme, R, kappa, d or an
// explicit s list) plus optional [lambda] and [params].
struct BandFile {
    BandPtr band;  // null for itinerary files
    std::optional<ItinerarySpec> itinerary;
    LambdaSpec lambda = LambdaSpec::constant_polar(1.0, 0.0);
    AnalysisParams params;
};

BandFile parse_band_text(const std::string& text, const std::string& origin = "<input>");
BandFile load_band_file(const std::string& path);

}  // namespace escdim
