#pragma once

#include <complex>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "escdim/levelreal.hpp"

namespace escdim {

class spec_error : public std::runtime_error {
public:
    explicit spec_error(const std::string& what) : std::runtime_error(what) {}
};

class generation_error : public std::runtime_error {
public:
    generation_error(const std::string& what, int index)
        : std::runtime_error(what + " at index " + std::to_string(index)), index(index) {}
    int index;
};

// Radius sequence, one of a fixed kind registry. All recurrences are defined
// and memoized on ln-values; downstream formulas consume logs only.
struct SequenceSpec {
    enum class Kind {
        Explicit,        // explicit list of ln-terms
        Geometric,       // a_n = c * R^n
        LogPoly,         // a_n = n^((log+)^p(n))
        Tower,           // a_{n+1} = e^(n * a_n^d), d in [0,1]
        TowerVar,        // a_{n+1} = e^(n * a_n^((n-1)/n))
        PowerBand,       // b_n = base_n^(1 + 1/n)
        ScalarBand,      // b_n = c * base_n (also used to scale an a-sequence)
        DoubleExp,       // b_n = e^(e^(p n))
        LogSquareTower,  // lnln b_{n+1} = (ln b_n)^2, seeded by ln b_1
        FromItinerary,   // compiled by the annular module
    };

    Kind kind = Kind::Explicit;
    std::vector<LevelReal> explicit_logs;   // Explicit / FromItinerary: ln a_n, 1-based order
    std::vector<LevelReal> itinerary_deltas;       // FromItinerary only: Delta_n
    std::vector<LevelReal> itinerary_log_deltas;   // FromItinerary only: ln Delta_n
    double c = 1.0;
    double R = 2.0;
    int p = 1;
    double d = 0.5;
    double a1 = 20.0;
    double log_b1 = 3.0;
    std::shared_ptr<const SequenceSpec> base;  // PowerBand / ScalarBand

    static SequenceSpec explicit_logs_of(std::vector<LevelReal> logs);
    static SequenceSpec geometric(double c, double R);
    static SequenceSpec log_poly(int p);
    static SequenceSpec tower(double d, double a1);
    static SequenceSpec tower_var(double a1);
    static SequenceSpec power_band(std::shared_ptr<const SequenceSpec> base);
    static SequenceSpec scalar_band(double c, std::shared_ptr<const SequenceSpec> base);
    static SequenceSpec double_exp(int p);
    static SequenceSpec log_square_tower(double log_b1);

    std::string kind_name() const;
    void validate() const;
};

// lambda_n parameters of the iteration; stored as (modulus, argument).
struct LambdaSpec {
    enum class Kind { Constant, Explicit, SeededRandom };
    Kind kind = Kind::Constant;
    double modulus = 1.0;
    double argument = 0.0;                     // in [0, 2*pi)
    std::vector<std::complex<double>> values;  // Explicit
    double mod_lo = 0.5, mod_hi = 2.0;         // SeededRandom, PRNG contract splitmix64/v1
    std::uint64_t seed = 1;

    static LambdaSpec constant(std::complex<double> lambda);
    static LambdaSpec constant_polar(double modulus, double argument);
    static LambdaSpec explicit_list(std::vector<std::complex<double>> vals);
    static LambdaSpec seeded(double mod_lo, double mod_hi, std::uint64_t seed);

    void validate() const;
    // modulus/argument of lambda_n (1-based); deterministic for all kinds
    double mod_at(int n) const;
    double arg_at(int n) const;
    bool bounded() const;         // sup |lambda_n| < inf known from the kind
    double mod_sup_hint() const;  // finite when bounded()
    std::string kind_name() const;
};

struct AdmissibilityParams {
    double q = 0.75;                        // 0 < q < 1
    std::optional<int> start_index;         // overrides the reported N0
    void validate() const;
};

struct AssumptionParams {
    double delta_min = 0.5;    // clause (c): Delta_n > delta_min
    double a_threshold = 50.0; // clause (d): min a_n > a_threshold (liminf surrogate)
    int horizon = 40;
    void validate() const;
};

struct AdmissibilityReport {
    bool admissible = false;
    int n0 = 0;                 // smallest index from which both inequalities hold
    int checked_through = 0;
    int first_violation_index = 0;   // when !admissible
    std::string violation_side;      // "a" or "b"
    double q = 0.0;
    std::vector<double> margins_a;   // log-space slack per index, saturating
    std::vector<double> margins_b;
    bool truncated_by_overflow = false;
};

enum class ClauseVerdict { Pass, Fail, Inconclusive };

struct AssumptionReport {
    ClauseVerdict admissible = ClauseVerdict::Inconclusive;      // (a)
    ClauseVerdict geometric_mean = ClauseVerdict::Inconclusive;  // (b)
    ClauseVerdict moduli = ClauseVerdict::Inconclusive;          // (c)
    ClauseVerdict a_lower = ClauseVerdict::Inconclusive;         // (d)
    AdmissibilityReport adm;
    std::vector<double> gm_series;   // g_n = (sum ln a_k)/n, saturating doubles
    double min_delta = 0.0;          // over reliable indices
    double min_a_log = 0.0;          // min ln a_n over horizon
    int horizon = 0;
    int reliable_delta_through = 0;  // last index with an unflagged Delta_n
    std::string notes;               // liminf caveat etc.
    bool all_pass() const {
        return admissible == ClauseVerdict::Pass && geometric_mean == ClauseVerdict::Pass &&
               moduli == ClauseVerdict::Pass && a_lower == ClauseVerdict::Pass;
    }
};

// Memoizing term generator; deterministic and safe for concurrent term() calls.
class SequenceGen {
public:
    explicit SequenceGen(SequenceSpec spec);

    // ln a_n, 1-based. Throws generation_error past the level cap or list end.
    LevelReal log_term(int n) const;
    // a_n itself (one level above the stored log)
    LevelReal term(int n) const;
    const SequenceSpec& spec() const { return spec_; }

private:
    LevelReal compute(int n, const std::vector<LevelReal>& memo) const;

    SequenceSpec spec_;
    std::shared_ptr<const SequenceGen> base_;
    mutable std::mutex mu_;
    mutable std::vector<LevelReal> memo_;
};

struct BandTerms {
    LevelReal log_a;
    LevelReal log_b;
    LevelReal delta;      // ln(b_n/a_n), computed one level below the terms
    LevelReal log_delta;  // ln Delta_n; flagged when delta is unresolvable
};

// The triple (a, b, lambda). Terms are produced on demand and cached.
class EscapeBand {
public:
    EscapeBand(SequenceSpec a, SequenceSpec b, LambdaSpec lambda, std::string label = "");

    BandTerms terms(int n) const;   // 1-based
    LevelReal log_a(int n) const { return a_.log_term(n); }  // independent of the b-side
    LevelReal log_b(int n) const { return b_.log_term(n); }
    double lambda_mod(int n) const { return lambda_.mod_at(n); }
    double lambda_arg(int n) const { return lambda_.arg_at(n); }
    const LambdaSpec& lambda() const { return lambda_; }
    const SequenceSpec& a_spec() const { return a_.spec(); }
    const SequenceSpec& b_spec() const { return b_.spec(); }
    const std::string& label() const { return label_; }

    // a_n < b_n over [from, horizon]; returns first violating index or 0
    int check_order(int from, int horizon) const;

private:
    BandTerms compute_terms(int n) const;

    SequenceGen a_;
    SequenceGen b_;
    LambdaSpec lambda_;
    std::string label_;
    mutable std::mutex mu_;
    mutable std::vector<BandTerms> cache_;
};

using BandPtr = std::shared_ptr<const EscapeBand>;

// Index-shifted view: term n of the view is term n+shift of the base band.
// This is how "for sufficiently large n" is operationalized: analyses run on
// the tail from the reported (or configured) start index.
class BandView {
public:
    BandView(BandPtr band, int shift = 0) : band_(std::move(band)), shift_(shift) {}
    BandTerms terms(int n) const { return band_->terms(n + shift_); }
    LevelReal log_a(int n) const { return band_->log_a(n + shift_); }
    LevelReal log_b(int n) const { return band_->log_b(n + shift_); }
    double lambda_mod(int n) const { return band_->lambda_mod(n + shift_); }
    double lambda_arg(int n) const { return band_->lambda_arg(n + shift_); }
    const LambdaSpec& lambda() const { return band_->lambda(); }
    int shift() const { return shift_; }
    const EscapeBand& band() const { return *band_; }
    BandPtr band_ptr() const { return band_; }

private:
    BandPtr band_;
    int shift_ = 0;
};

AdmissibilityReport check_admissible(const BandView& band, const AdmissibilityParams& params,
                                     int n_max);
AssumptionReport check_assumptions(const BandView& band, const AdmissibilityParams& adm,
                                   const AssumptionParams& params);

}  // namespace escdim
