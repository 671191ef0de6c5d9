#pragma once

#include "escdim/dimension.hpp"
#include "escdim/sequences.hpp"

namespace escdim {

// Symbolic annulus itinerary s_n plus the radii scheme that turns it into an
// escape band: power (R_s = R^s) or stretched (R_s = R^(s^kappa)).
struct ItinerarySpec {
    enum class SKind {
        Explicit,   // user list
        Example34,  // s_{n+1} = R^((d/(kappa-1)) s_n^kappa)
        PowerRec,   // s_{n+1} = floor(R^(q_rec * s_n))
        Arith,      // s_{n+1} = s_n + step (registry recurrence)
    };
    enum class Scheme { Power, Stretched };

    SKind skind = SKind::Arith;
    Scheme scheme = Scheme::Power;
    std::vector<double> s_list;  // Explicit
    double R = 2.718281828459045;
    double kappa = 2.0;
    double d = 0.3;      // Example34
    double q_rec = 0.5;  // PowerRec
    double step = 1.0;   // Arith
    double s1 = 2.0;     // seed for recurrences

    static ItinerarySpec example34(double d, double kappa, double R, double s1 = 2.0);
    static ItinerarySpec arith(double s1, double step, Scheme scheme, double R, double kappa = 2.0);
    static ItinerarySpec explicit_list(std::vector<double> s, Scheme scheme, double R,
                                       double kappa = 2.0);
    static ItinerarySpec power_rec(double q_rec, double s1, double R);

    void validate() const;
    std::string skind_name() const;
    std::string scheme_name() const;
};

// Deterministic s_n generator. The recurrence evolves on raw (real) values;
// the floored integer view is retained alongside since itineraries index
// annuli. Formulas consume the raw chain.
class ItineraryGen {
public:
    explicit ItineraryGen(ItinerarySpec spec);
    LevelReal s_raw(int n) const;      // 1-based
    LevelReal s_floor(int n) const;    // max(floor(s_raw), 1) where representable
    const ItinerarySpec& spec() const { return spec_; }

private:
    ItinerarySpec spec_;
    mutable std::mutex mu_;
    mutable std::vector<LevelReal> raw_;
};

// Compile n_terms of the itinerary into an escape band (a_n = R_{s_n},
// b_n = R_{s_n+1}) with structurally computed widths.
BandPtr itinerary_band(const ItinerarySpec& it, const LambdaSpec& lambda, int n_terms);

struct ItineraryAdmissReport {
    bool admissible = false;
    int first_valid = 0;  // first index from which the inequality holds through the horizon
    int checked_through = 0;
    int first_violation = 0;
    std::vector<double> margins;       // log-space slack of the scheme inequality
    std::vector<double> margins_exact; // power scheme: the exact definition form
    double q = 0.0;
};
ItineraryAdmissReport check_itinerary_admissible(const ItinerarySpec& it, const LambdaSpec& lambda,
                                                 double q, int horizon);

struct AnnularResult {
    RatioSeries cesaro;          // (s_1+...+s_n)/n, or (s_1^k+...+s_n^k)/n for stretched
    bool limsup_witness = false; // divergence witnessed as a limsup
    bool lim_witness = false;    // full-limit divergence witnessed (monotone)
    bool s_to_inf_witness = false;
    ItineraryAdmissReport admissibility;
    DimensionReport report;
    double packing_value = 1.0;     // stretched: the closed-form packing dimension estimate
    double strict_bound = 2.0;      // stretched: 2 - 1/kappa
    bool strict_bound_ok = true;
    std::vector<RatioSeries> series;
    std::vector<std::string> notes;
};

// Power-scheme theorem: Cesaro divergence => dim_H <= 1; with admissibility,
// a full-limit witness and R large, both dimensions are 1.
AnnularResult thm_annular_dims(const ItinerarySpec& it, const LambdaSpec& lambda, double q,
                               int horizon, double R_large_threshold = 54.598150033144236);

// Stretched-scheme theorem: packing dimension via
// 1 + ((kappa-1)/log R) * limsup log s_{n+1} / (s_1^kappa+...+s_n^kappa).
AnnularResult thm_annular2_dims(const ItinerarySpec& it, const LambdaSpec& lambda, double q,
                                int horizon);

// The closed-form example family: builds the Example-34 itinerary, checks
// admissibility, runs the stretched theorem and compares measured vs
// predicted d. Refuses d outside [0, 1 - 1/kappa).
struct AnnularExampleResult {
    AnnularResult inner;
    double predicted_d = 0.0;
    double measured_packing = 1.0;
    RatioSeries d_witness;  // log s_{n+1} / s_n^kappa, scaled by (kappa-1)/log R
};
AnnularExampleResult cor_ann_example(double d, double kappa, double R, const LambdaSpec& lambda,
                                     double q, int horizon);

}  // namespace escdim
