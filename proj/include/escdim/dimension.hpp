#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "escdim/sequences.hpp"
#include "escdim/series.hpp"

namespace escdim {

class pre_asymptotic_error : public std::runtime_error {
public:
    explicit pre_asymptotic_error(const std::string& what) : std::runtime_error(what) {}
};

struct IntervalEndpoint {
    double value = 1.0;
    std::string provenance;
    bool heuristic = false;
    double residual = 0.0;  // finite-horizon distance backing an exact claim
};

struct DimInterval {
    IntervalEndpoint lo{1.0, "generic", false, 0.0};
    IntervalEndpoint hi{2.0, "generic", false, 0.0};
};

struct DimensionReport {
    DimInterval hausdorff;
    DimInterval packing;
    std::optional<DimInterval> hausdorff_heuristic;  // Theorem-B candidate search
    std::optional<DimInterval> packing_heuristic;
    char classification = 0;  // 'a'..'d' from the 1-vs-2 corollary, 0 = none
    std::vector<std::string> theorems_applied;
    double packing_estimate = 1.0;
    std::optional<double> measured_d;
    int horizon = 0;
    int trim = 1;  // analyses run on the tail from this start index
    std::vector<RatioSeries> series;
    std::vector<std::string> notes;
};

// ---- individual expression series (shared so reports are bit-identical) ----

RatioSeries thmA_series(const BandView& band, int horizon);
bool thmA_witnessed(const RatioSeries& s);

struct RemAResult {
    RatioSeries ratio;  // ln Delta_{n+1} / log(a_1...a_n)
    RatioSeries gm;     // (log(a_1...a_n))^(1/n) proxy: (sum ln a_k)/n
    bool liminf_lt_one = false;
    bool limsup_lt_one = false;
    bool gm_diverges = false;
};
RemAResult remA_tests(const BandView& band, int horizon);

RatioSeries packing_upper_series(const BandView& band, int horizon);   // logProd(Delta_1..n+1)/logProd(a_1..n)
RatioSeries hausdorff_upper_series(const BandView& band, int horizon); // with the log+(a_n/Delta_{n+1}) denominator
RatioSeries packing_lower_b_series(const BandView& band, int horizon); // logProd(Delta)/logProd(b)
RatioSeries delta_log_ratio_series(const BandView& band, int horizon); // ln Delta_{n+1}/ln a_n
RatioSeries delta_over_a_series(const BandView& band, int horizon);    // Delta_{n+1}/a_n
RatioSeries delta_logb_ratio_series(const BandView& band, int horizon);// ln Delta_{n+1}/ln b_n
RatioSeries delta_over_b_series(const BandView& band, int horizon);    // Delta_{n+1}/b_n
RatioSeries logb_over_loga_series(const BandView& band, int horizon);  // ln b_n/ln a_n

// ---- Theorem-B expressions ----

// phi_n(x) = log(min(D_2,x_1)...min(D_n,x_{n-1})) / (log(x_1..x_n) - log min(D_{n+1},x_n))
// evaluated in log-space; x given by its logs (x_logs[k-1] = ln x_k).
double phi_value(const BandView& band, std::span<const LevelReal> x_logs, int n);
double psi_value(const BandView& band, std::span<const LevelReal> x_logs, int n);

enum class XStrategy { AtA, AtB, AtClampedDelta };
std::string x_strategy_name(XStrategy s);
LevelReal x_log_at(const BandView& band, XStrategy s, int k);

RatioSeries phi_series(const BandView& band, XStrategy s, int horizon);
RatioSeries psi_series(const BandView& band, XStrategy s, int horizon);

// ---- theorem-level operations ----

struct AnalysisParams {
    AdmissibilityParams adm;
    AssumptionParams assumptions;
    std::optional<int> trim;  // default: the reported admissibility start index
    int horizon = 40;
};

DimensionReport thmB_bounds(const BandView& band, const AnalysisParams& p);
DimensionReport cor_dim_bounds(const BandView& band, const AnalysisParams& p);
DimensionReport classify_cor12(const BandView& band, const AnalysisParams& p);

struct ModSlowResult {
    RatioSeries v;  // (log+ b_n)^(1/n)
    bool bounded_witness = false;
    std::string conclusion;
};
ModSlowResult moderately_slow_test(const BandView& band, int horizon);

DimensionReport growth_rate_dims(const SequenceSpec& a, double c, const LambdaSpec& lambda,
                                 const AnalysisParams& p);

struct ThinResult {
    bool witnessed = false;
    RatioSeries thin_ratio;  // ln b_n / ln a_n
    RatioSeries stolz;       // logProd(b)/logProd(a)
    DimensionReport report;  // valid when witnessed
};
ThinResult thin_formula(const BandView& band, const AnalysisParams& p);

struct Thin2Result {
    bool converged = false;
    double measured_d = 0.0;
    RatioSeries d_series;
    DimensionReport report;
};
Thin2Result cor_thin2(const BandView& band, const AnalysisParams& p);

// ---- consolidated pipeline (what the CLI `analyze` command runs) ----

struct ConsolidatedReport {
    AdmissibilityReport admissibility;
    AssumptionReport assumptions;
    bool assumptions_ok = false;
    bool thmA_witness = false;
    bool modslow_witness = false;
    bool thin_witness = false;
    DimensionReport merged;  // sound intervals with provenance + all series
    int trim = 1;
};

ConsolidatedReport analyze_band(const BandPtr& band, const AnalysisParams& p);

double clamp01(double x);

}  // namespace escdim
