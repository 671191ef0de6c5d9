#pragma once

#include <complex>
#include <optional>

#include "escdim/dimension.hpp"
#include "escdim/sequences.hpp"

namespace escdim {

class budget_error : public std::runtime_error {
public:
    explicit budget_error(const std::string& what) : std::runtime_error(what) {}
};

class depth_limit_error : public std::runtime_error {
public:
    explicit depth_limit_error(const std::string& what) : std::runtime_error(what) {}
};

struct GridParams {
    int N = 1;               // start index: analysis runs on the tail from a_N
    double delta = 0.1;      // cell width; height is pi
    double q = 0.75;
    double eps_reg = 0.1;    // regularity margin of the |A_n +- e^(j delta)| condition
    double delta_min = 0.5;  // inherited width floor
    double a_threshold = 50.0;
    double d0() const;       // sqrt(pi^2 + delta^2), diameter of a cell
    void validate() const;   // delta < min(delta_min/4, 1) and sqrt(q) e^delta < 1
};

// Concrete values for the constants the estimates only assert to exist.
// c follows the explicit branch-derivative formula; the counting constants are
// computed from the grid geometry and validated empirically by the exact
// counting mode. Everything here is implementation-chosen unless marked.
struct ConstantsLedger {
    double c = 0;        // branch derivative constant (explicit formula)
    double c1 = 0;       // upper cell-count constant
    double c1_tilde = 0; // lower cell-count constant (even sublattice)
    double c2 = 0;       // strip-width sandwich constant
    double c3 = 0;       // strip-width floor
    double c4 = 1.1;     // cover-sum outer constant
    double c3_sum = 1.05;// cover-sum inner constant
    double c7 = 1.0;     // local-dimension profile constant
    double C_big = 1e6;  // radius-window constant of the profile argument
    double C_tilde = 1e6;
    double Q = 2;        // per-step contraction floor
    std::vector<std::pair<std::string, std::string>> provenance;

    static ConstantsLedger defaults(const GridParams& gp);
};

struct StripData {
    int n = 0;
    double A = 0;      // log(a_{N+n}/|lambda_{N+n}|)
    double B = 0;      // log(b_{N+n}/|lambda_{N+n}|)
    double width() const { return B - A; }
    bool contains_re(double x) const { return A <= x && x <= B; }
};

struct JRange {
    int lo = 0, hi = -1;  // inclusive; empty when hi < lo
    bool empty() const { return hi < lo; }
    int count() const { return empty() ? 0 : hi - lo + 1; }
};

struct CountResult {
    double lower = 0;       // lower-family count (even contained cells) or ledger bound
    double upper = 0;       // upper-family count (intersecting cells) or ledger bound
    bool exact = false;
    bool regime_ok = true;  // geometry large enough for the ledger bounds to apply
    long cells_scanned = 0;
};

struct Cylinder {
    enum class Family { Upper, Lower };
    Family family = Family::Upper;
    std::vector<std::pair<int, int>> word;  // (j_m, k_m), m = 0..depth
    LevelReal log_diam_lower;               // ln of the diameter bounds
    LevelReal log_diam_upper;
    LevelReal log_mass_lower;               // ln of the measure bounds
    LevelReal log_mass_upper;
    int depth() const { return static_cast<int>(word.size()) - 1; }
};

struct ProfileRow {
    int n = 0;
    double sampled_inf = 0, sampled_sup = 0;
    double target_inf = 0, target_sup = 0;  // closed-form extremization targets
    double phi = 0, psi = 0;                // capital Phi_n / Psi_n at x_m = delta j_m
};

struct ProfileResult {
    std::vector<ProfileRow> rows;
    double final_gap_inf = 0, final_gap_sup = 0;  // |sampled - target| at the last row
};

struct RegularizedStrip {
    double A2 = 0, B2 = 0;
    std::optional<int> alpha, beta;
    bool a_sandwich_ok = true;  // e^(3 delta/2) A <= A' <= A for A < 0 (identity otherwise)
    bool b_sandwich_ok = true;  // B <= B' <= e^(3 delta/2) B for B > 0
};
RegularizedStrip regularize_interval(double A, double B, double delta);

struct PullbackStep {
    int m = 0;
    double log_margin_lo = 0;  // ln|orbit_m| - ln a_{N+m-1}
    double log_margin_hi = 0;  // ln b_{N+m-1} - ln|orbit_m|
    bool verified = false;
};

struct PullbackResult {
    std::complex<double> z;       // the pulled-back point (binary64 view)
    std::vector<PullbackStep> steps;
    bool fully_verified = false;
    int verified_depth = 0;
    int precision_bits = 0;
};

class CoverGrid {
public:
    CoverGrid(BandPtr band, GridParams gp);
    CoverGrid(BandPtr band, GridParams gp, ConstantsLedger ledger);

    const GridParams& params() const { return gp_; }
    const ConstantsLedger& ledger() const { return led_; }
    const BandPtr& band() const { return band_; }

    // S_n in binary64; throws depth_limit_error when a_{N+n} leaves range.
    StripData strip(int n) const;
    // all j with log(a_{N+n})/delta - 1 < j < log(b_{N+n})/delta
    JRange j_range(int n) const;
    // D_j^(n) = min(B_n, e^((j+1)delta)) - max(A_n, -e^((j+1)delta))
    double strip_width_D(int n, int j) const;
    // the sandwich (1/c2) min(Delta, e^(j delta)) <= D <= c2 min(Delta, e^(j delta))
    bool width_sandwich_ok(int n, int j) const;

    double lambda_log_mod(int n) const;  // of lambda_{N+n}
    double lambda_arg(int n) const;

    // inverse branch g_k^(n) in log-modulus form: w given as (ln|w|, Arg w)
    std::complex<double> inverse_branch(int n, int k, double log_mod_w, double arg_w) const;

    // counts of level-(n+1) cells against U_{j,k} intersected with S_{n+1}
    CountResult count_branches(int n, int j, int k, bool exact, long budget = 10000000) const;

    // ln of the cover-sum bound: n ln c4 + (D-1)(ln Delta_{N+n+1} - sum ln a_{N+m})
    LevelReal cover_sum_logbound(double D_exp, int n) const;
    // inner per-(j_1..j_n) bound: n ln c3 + (D-1)(ln Delta_{N+n+1} - sum_j delta)
    double cover_sum_inner_logbound(double D_exp, int n, double sum_j_delta) const;

    Cylinder root_cylinder(int j0, int k0, Cylinder::Family family) const;
    Cylinder cylinder_extend(const Cylinder& cyl, int j_next, int k_next) const;

    ProfileResult local_dimension_profile(const std::vector<std::pair<int, int>>& word,
                                          int horizon) const;

    // the canonical word: j_m = round(log a_{N+m}/delta), k_m even
    std::vector<std::pair<int, int>> canonical_word(int depth) const;

    // Psi_n along a word, for cross-checks against the packing-upper series
    RatioSeries capital_psi_series(const std::vector<std::pair<int, int>>& word) const;

    std::vector<RegularizedStrip> regularize_band(int horizon) const;

    // depth-limited high-precision pullback + forward orbit verification
    int max_verifiable_depth(int precision_bits, int max_depth = 64) const;
    PullbackResult pullback_point(const std::vector<std::pair<int, int>>& word,
                                  std::complex<double> w, int precision_bits) const;

private:
    BandTerms term(int idx_from_N) const;  // band terms at N + idx
    BandPtr band_;
    GridParams gp_;
    ConstantsLedger led_;
};

}  // namespace escdim
