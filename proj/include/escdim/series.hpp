#pragma once

#include <string>
#include <vector>

#include "escdim/levelreal.hpp"

namespace escdim {

struct SeriesPoint {
    int n = 0;
    double value = 0.0;
    bool flagged = false;    // produced through flagged/tight level arithmetic
    bool saturated = false;  // |true value| exceeded binary64; clamped to +-kSat
};

enum class TrendKind { ConvergingTo, Diverging, Oscillating, Inconclusive };

struct TrendInfo {
    TrendKind kind = TrendKind::Inconclusive;
    double limit = 0.0;  // meaningful for ConvergingTo
    std::string detail;
};

// Finite-horizon series for one of the paper-expression ratios. Estimates are
// finite-horizon witnesses, never oracular limits: liminf/limsup are reported
// as running min/max over the tail half of the reliable prefix, the trend as a
// monotone fit on the last quarter. Points after the first flag are kept for
// inspection but excluded from estimates (truncation diagnostics).
struct RatioSeries {
    std::string expression_id;
    std::vector<SeriesPoint> pts;
    TrendInfo trend;
    int requested_horizon = 0;
    int first_flagged = 0;        // index n of the first flagged point, 0 if none
    int truncated_at = 0;         // generation stopped here (overflow), 0 if none
    std::string truncation_reason;

    int reliable_count() const;
    bool empty_reliable() const { return reliable_count() == 0; }
    double last_reliable() const;
    // running max/min over the tail half of the reliable prefix
    double limsup_estimate() const;
    double liminf_estimate() const;
    void finalize();  // computes trend on the reliable tail
};

// Helper for building series with automatic flag/saturation bookkeeping.
class SeriesBuilder {
public:
    explicit SeriesBuilder(std::string expression_id, int horizon);
    void push(int n, double value, bool flagged);
    void push_sat(int n, const SatValue& v, bool extra_flag = false);
    void truncate(int n, std::string reason);
    RatioSeries take();

private:
    RatioSeries s_;
};

TrendInfo classify_trend(const std::vector<SeriesPoint>& pts, int reliable_count);

}  // namespace escdim
