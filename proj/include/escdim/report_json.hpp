#pragma once

#include <json.hpp>

#include "escdim/annular.hpp"
#include "escdim/cover.hpp"
#include "escdim/dimension.hpp"
#include "escdim/presets.hpp"

namespace escdim {

using ordered_json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kSchemaVersion = "1";

ordered_json spec_to_json(const SequenceSpec& s);
ordered_json lambda_to_json(const LambdaSpec& l);
ordered_json band_echo(const EscapeBand& band, const AnalysisParams& p);
ordered_json itinerary_echo(const ItinerarySpec& it, const LambdaSpec& l,
                            const AnalysisParams& p);

ordered_json series_to_json(const RatioSeries& s);
ordered_json report_to_json(const DimensionReport& rep);
ordered_json consolidated_to_json(const ConsolidatedReport& rep, ordered_json spec_echo,
                                  bool with_meta);
ordered_json annular_to_json(const AnnularResult& res, ordered_json spec_echo, bool with_meta);
ordered_json ledger_to_json(const ConstantsLedger& led);

// flat CSV: expression-id,n,value,flag
std::string series_to_csv(const std::vector<RatioSeries>& series);

}  // namespace escdim
