#include "escdim/sequences.hpp"

#include <cmath>

namespace escdim {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

double wrap_two_pi(double x) {
    double r = std::fmod(x, kTwoPi);
    if (r < 0) r += kTwoPi;
    return r;
}

// p-th iterate of log+ = max(log, 0)
double log_plus_iter(double x, int p) {
    for (int i = 0; i < p; ++i) x = std::max(std::log(x), 0.0);
    return x;
}
}  // namespace

SequenceSpec SequenceSpec::explicit_logs_of(std::vector<LevelReal> logs) {
    SequenceSpec s;
    s.kind = Kind::Explicit;
    s.explicit_logs = std::move(logs);
    return s;
}
SequenceSpec SequenceSpec::geometric(double c, double R) {
    SequenceSpec s;
    s.kind = Kind::Geometric;
    s.c = c;
    s.R = R;
    return s;
}
SequenceSpec SequenceSpec::log_poly(int p) {
    SequenceSpec s;
    s.kind = Kind::LogPoly;
    s.p = p;
    return s;
}
SequenceSpec SequenceSpec::tower(double d, double a1) {
    SequenceSpec s;
    s.kind = Kind::Tower;
    s.d = d;
    s.a1 = a1;
    return s;
}
SequenceSpec SequenceSpec::tower_var(double a1) {
    SequenceSpec s;
    s.kind = Kind::TowerVar;
    s.a1 = a1;
    return s;
}
SequenceSpec SequenceSpec::power_band(std::shared_ptr<const SequenceSpec> base) {
    SequenceSpec s;
    s.kind = Kind::PowerBand;
    s.base = std::move(base);
    return s;
}
SequenceSpec SequenceSpec::scalar_band(double c, std::shared_ptr<const SequenceSpec> base) {
    SequenceSpec s;
    s.kind = Kind::ScalarBand;
    s.c = c;
    s.base = std::move(base);
    return s;
}
SequenceSpec SequenceSpec::double_exp(int p) {
    SequenceSpec s;
    s.kind = Kind::DoubleExp;
    s.p = p;
    return s;
}
SequenceSpec SequenceSpec::log_square_tower(double log_b1) {
    SequenceSpec s;
    s.kind = Kind::LogSquareTower;
    s.log_b1 = log_b1;
    return s;
}

std::string SequenceSpec::kind_name() const {
    switch (kind) {
        case Kind::Explicit: return "explicit";
        case Kind::Geometric: return "geometric";
        case Kind::LogPoly: return "log-poly";
        case Kind::Tower: return "tower";
        case Kind::TowerVar: return "tower-var";
        case Kind::PowerBand: return "power-band";
        case Kind::ScalarBand: return "scalar-band";
        case Kind::DoubleExp: return "double-exp";
        case Kind::LogSquareTower: return "log-square-tower";
        case Kind::FromItinerary: return "from-itinerary";
    }
    return "?";
}

void SequenceSpec::validate() const {
    switch (kind) {
        case Kind::Explicit:
        case Kind::FromItinerary:
            if (explicit_logs.empty()) throw spec_error("explicit sequence needs at least one term");
            break;
        case Kind::Geometric:
            if (c <= 0) throw spec_error("geometric: c must be positive");
            if (R <= 1) throw spec_error("geometric: R must exceed 1");
            break;
        case Kind::LogPoly:
        case Kind::DoubleExp:
            if (p < 1) throw spec_error("p must be a positive integer");
            break;
        case Kind::Tower:
            if (d < 0 || d > 1) throw spec_error("tower: d must lie in [0,1]");
            if (a1 <= 1) throw spec_error("tower: a1 must exceed 1");
            break;
        case Kind::TowerVar:
            if (a1 <= 1) throw spec_error("tower-var: a1 must exceed 1");
            break;
        case Kind::PowerBand:
            if (!base) throw spec_error("power-band needs a base sequence");
            break;
        case Kind::ScalarBand:
            if (!base) throw spec_error("scalar-band needs a base sequence");
            if (c <= 0) throw spec_error("scalar-band: factor must be positive");
            break;
        case Kind::LogSquareTower:
            if (log_b1 <= 1) throw spec_error("log-square-tower: ln b_1 must exceed 1");
            break;
    }
}

LambdaSpec LambdaSpec::constant(std::complex<double> lambda) {
    return constant_polar(std::abs(lambda), wrap_two_pi(std::arg(lambda)));
}
LambdaSpec LambdaSpec::constant_polar(double modulus, double argument) {
    LambdaSpec s;
    s.kind = Kind::Constant;
    s.modulus = modulus;
    s.argument = wrap_two_pi(argument);
    return s;
}
LambdaSpec LambdaSpec::explicit_list(std::vector<std::complex<double>> vals) {
    LambdaSpec s;
    s.kind = Kind::Explicit;
    s.values = std::move(vals);
    return s;
}
LambdaSpec LambdaSpec::seeded(double mod_lo, double mod_hi, std::uint64_t seed) {
    LambdaSpec s;
    s.kind = Kind::SeededRandom;
    s.mod_lo = mod_lo;
    s.mod_hi = mod_hi;
    s.seed = seed;
    return s;
}

void LambdaSpec::validate() const {
    switch (kind) {
        case Kind::Constant:
            if (modulus <= 0) throw spec_error("lambda: modulus must be positive");
            break;
        case Kind::Explicit:
            if (values.empty()) throw spec_error("lambda: explicit list is empty");
            for (const auto& v : values)
                if (std::abs(v) == 0) throw spec_error("lambda: zero entry in explicit list");
            break;
        case Kind::SeededRandom:
            if (mod_lo <= 0 || mod_hi < mod_lo)
                throw spec_error("lambda: seeded modulus range must satisfy 0 < lo <= hi");
            break;
    }
}

double LambdaSpec::mod_at(int n) const {
    switch (kind) {
        case Kind::Constant: return modulus;
        case Kind::Explicit: return std::abs(values[(n - 1) % values.size()]);
        case Kind::SeededRandom: {
            SplitMix64 rng(seed + static_cast<std::uint64_t>(n));
            return mod_lo + (mod_hi - mod_lo) * rng.next_unit();
        }
    }
    return 1.0;
}

double LambdaSpec::arg_at(int n) const {
    switch (kind) {
        case Kind::Constant: return argument;
        case Kind::Explicit: return wrap_two_pi(std::arg(values[(n - 1) % values.size()]));
        case Kind::SeededRandom: {
            SplitMix64 rng(seed + static_cast<std::uint64_t>(n));
            rng.next_unit();  // first draw is the modulus
            return kTwoPi * rng.next_unit();
        }
    }
    return 0.0;
}

bool LambdaSpec::bounded() const { return true; }  // every kind has finite sup by construction

double LambdaSpec::mod_sup_hint() const {
    switch (kind) {
        case Kind::Constant: return modulus;
        case Kind::Explicit: {
            double m = 0;
            for (const auto& v : values) m = std::max(m, std::abs(v));
            return m;
        }
        case Kind::SeededRandom: return mod_hi;
    }
    return 1.0;
}

std::string LambdaSpec::kind_name() const {
    switch (kind) {
        case Kind::Constant: return "constant";
        case Kind::Explicit: return "explicit";
        case Kind::SeededRandom: return "seeded-random";
    }
    return "?";
}

void AdmissibilityParams::validate() const {
    if (!(q > 0 && q < 1)) throw spec_error("admissibility: q must lie in (0,1)");
}

void AssumptionParams::validate() const {
    if (delta_min <= 0) throw spec_error("assumptions: delta_min must be positive");
    if (a_threshold <= 0) throw spec_error("assumptions: a_threshold must be positive");
    if (horizon < 4) throw spec_error("assumptions: horizon must be at least 4");
}

SequenceGen::SequenceGen(SequenceSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    if (spec_.base) base_ = std::make_shared<const SequenceGen>(*spec_.base);
}

LevelReal SequenceGen::log_term(int n) const {
    if (n < 1) throw generation_error("sequence index must be >= 1", n);
    std::lock_guard<std::mutex> lock(mu_);
    while (static_cast<int>(memo_.size()) < n) {
        int idx = static_cast<int>(memo_.size()) + 1;
        try {
            memo_.push_back(compute(idx, memo_));
        } catch (const level_error& e) {
            throw generation_error(std::string("level overflow in ") + spec_.kind_name() + ": " +
                                       e.what(),
                                   idx);
        }
    }
    return memo_[n - 1];
}

LevelReal SequenceGen::term(int n) const {
    try {
        return lr_exp(log_term(n));
    } catch (const level_error& e) {
        throw generation_error(std::string("level overflow in ") + spec_.kind_name() + ": " +
                                   e.what(),
                               n);
    }
}

LevelReal SequenceGen::compute(int n, const std::vector<LevelReal>& memo) const {
    switch (spec_.kind) {
        case SequenceSpec::Kind::Explicit:
        case SequenceSpec::Kind::FromItinerary:
            if (n > static_cast<int>(spec_.explicit_logs.size()))
                throw generation_error("explicit sequence exhausted", n);
            return spec_.explicit_logs[n - 1];
        case SequenceSpec::Kind::Geometric:
            return LevelReal(std::log(spec_.c) + n * std::log(spec_.R));
        case SequenceSpec::Kind::LogPoly:
            return LevelReal(log_plus_iter(static_cast<double>(n), spec_.p) * std::log(n));
        case SequenceSpec::Kind::Tower: {
            if (n == 1) return LevelReal(std::log(spec_.a1));
            const LevelReal& prev = memo[n - 2];
            if (spec_.d == 0.0) return LevelReal(static_cast<double>(n - 1));
            return scale(lr_exp(scale(prev, spec_.d)), n - 1);
        }
        case SequenceSpec::Kind::TowerVar: {
            if (n == 1) return LevelReal(std::log(spec_.a1));
            const LevelReal& prev = memo[n - 2];
            int m = n - 1;  // a_{m+1} = e^(m * a_m^((m-1)/m))
            double expo = static_cast<double>(m - 1) / m;
            if (expo == 0.0) return LevelReal(static_cast<double>(m));
            return scale(lr_exp(scale(prev, expo)), m);
        }
        case SequenceSpec::Kind::PowerBand:
            return scale(base_->log_term(n), 1.0 + 1.0 / n);
        case SequenceSpec::Kind::ScalarBand:
            return add(base_->log_term(n), LevelReal(std::log(spec_.c)));
        case SequenceSpec::Kind::DoubleExp:
            return lr_exp(LevelReal(static_cast<double>(spec_.p) * n));
        case SequenceSpec::Kind::LogSquareTower: {
            if (n == 1) return LevelReal(spec_.log_b1);
            return lr_exp(lr_pow(memo[n - 2], 2.0));
        }
    }
    throw generation_error("unknown sequence kind", n);
}

EscapeBand::EscapeBand(SequenceSpec a, SequenceSpec b, LambdaSpec lambda, std::string label)
    : a_(std::move(a)), b_(std::move(b)), lambda_(std::move(lambda)), label_(std::move(label)) {
    lambda_.validate();
}

BandTerms EscapeBand::terms(int n) const {
    if (n < 1) throw generation_error("band index must be >= 1", n);
    std::lock_guard<std::mutex> lock(mu_);
    while (static_cast<int>(cache_.size()) < n) cache_.push_back(compute_terms(static_cast<int>(cache_.size()) + 1));
    return cache_[n - 1];
}

BandTerms EscapeBand::compute_terms(int n) const {
    BandTerms t;
    t.log_a = a_.log_term(n);
    t.log_b = b_.log_term(n);
    const SequenceSpec& bs = b_.spec();
    switch (bs.kind) {
        case SequenceSpec::Kind::ScalarBand: {
            // b = c*a: Delta = ln c exactly, independent of the level of a
            double lc = std::log(bs.c);
            t.delta = LevelReal(lc);
            t.log_delta = lc > 0 ? LevelReal(std::log(lc)) : LevelReal().with_flag(true);
            break;
        }
        case SequenceSpec::Kind::PowerBand: {
            // b = a^(1+1/n): Delta = (ln a)/n
            if (t.log_a.sign() <= 0)
                throw generation_error("power-band needs ln a_n > 0", n);
            t.delta = scale(t.log_a, 1.0 / n);
            // ln Delta = ln ln a - ln n, absorption-safe one level further down
            t.log_delta = sub(lr_ln(t.log_a), LevelReal(std::log(n)));
            break;
        }
        case SequenceSpec::Kind::FromItinerary: {
            t.delta = bs.itinerary_deltas[n - 1];
            t.log_delta = bs.itinerary_log_deltas[n - 1];
            break;
        }
        default: {
            t.delta = sub(t.log_b, t.log_a);
            if (t.delta.sign() > 0 && !t.delta.flagged())
                t.log_delta = lr_ln(t.delta);
            else
                t.log_delta = LevelReal().with_flag(true);
            break;
        }
    }
    return t;
}

int EscapeBand::check_order(int from, int horizon) const {
    for (int n = std::max(1, from); n <= horizon; ++n) {
        BandTerms t = terms(n);
        if (!(cmp(t.log_a, t.log_b) == std::strong_ordering::less)) return n;
    }
    return 0;
}

AdmissibilityReport check_admissible(const BandView& band, const AdmissibilityParams& params,
                                     int n_max) {
    params.validate();
    if (n_max < 2) throw spec_error("check_admissible: n_max must be >= 2");
    AdmissibilityReport rep;
    rep.q = params.q;
    std::vector<bool> ok(static_cast<size_t>(n_max), true);
    int through = 0;
    for (int n = 1; n < n_max; ++n) {
        LevelReal a_n, la_next, lb_next;
        double lam_mod;
        try {
            a_n = lr_exp(band.log_a(n));
            la_next = band.log_a(n + 1);
            lb_next = band.log_b(n + 1);
            lam_mod = band.lambda_mod(n + 1);
        } catch (const generation_error&) {
            rep.truncated_by_overflow = true;
            break;
        } catch (const level_error&) {
            rep.truncated_by_overflow = true;
            break;
        }
        through = n;
        double log_lam = std::log(lam_mod);
        // a-side: ln a_{n+1} <= ln|lambda| + q a_n
        LevelReal rhs_a = add(LevelReal(log_lam), scale(a_n, params.q));
        SatValue ma = sat_sub(rhs_a, la_next);
        rep.margins_a.push_back(ma.value);
        bool a_ok = cmp(la_next, rhs_a) != std::strong_ordering::greater;
        // b-side: ln b_{n+1} >= ln|lambda| - q a_n
        LevelReal rhs_b = sub(LevelReal(log_lam), scale(a_n, params.q));
        SatValue mb = sat_sub(lb_next, rhs_b);
        rep.margins_b.push_back(mb.value);
        bool b_ok = cmp(lb_next, rhs_b) != std::strong_ordering::less;
        if (!a_ok || !b_ok) {
            ok[static_cast<size_t>(n)] = false;
            if (rep.first_violation_index == 0) {
                rep.first_violation_index = n;
                rep.violation_side = !a_ok ? "a" : "b";
            }
        }
    }
    rep.checked_through = through;
    int n0 = 0;
    for (int n = through; n >= 1; --n) {
        if (!ok[static_cast<size_t>(n)]) break;
        n0 = n;
    }
    if (n0 > 0) {
        rep.admissible = true;
        rep.n0 = params.start_index.value_or(n0);
    }
    return rep;
}

AssumptionReport check_assumptions(const BandView& band, const AdmissibilityParams& adm,
                                   const AssumptionParams& params) {
    params.validate();
    AssumptionReport rep;
    rep.horizon = params.horizon;
    rep.adm = check_admissible(band, adm, params.horizon);
    rep.admissible = rep.adm.admissible ? ClauseVerdict::Pass : ClauseVerdict::Fail;

    // (b) geometric-mean divergence: g_n = (sum_{k<=n} ln a_k)/n increasing and growing
    LevelReal sum_log_a;
    int computed = 0;
    for (int n = 1; n <= params.horizon; ++n) {
        try {
            sum_log_a = add(sum_log_a, band.log_a(n));
        } catch (const generation_error&) {
            break;
        } catch (const level_error&) {
            break;
        }
        rep.gm_series.push_back(sat_to_double(scale(sum_log_a, 1.0 / n)));
        computed = n;
    }
    if (computed >= 4) {
        // saturation of the running mean is itself a divergence witness
        bool saturated = false;
        size_t m = rep.gm_series.size();
        for (size_t i = 0; i < m; ++i)
            if (std::abs(rep.gm_series[i]) >= kSat) {
                saturated = true;
                m = i;
                break;
            }
        if (saturated && m < 4) {
            rep.geometric_mean = ClauseVerdict::Pass;
        } else {
            size_t tail = std::max<size_t>(3, m / 4);
            bool increasing = true;
            for (size_t i = m - tail; i < m - 1; ++i)
                if (rep.gm_series[i + 1] <= rep.gm_series[i]) increasing = false;
            double growth = rep.gm_series[m - 1] - rep.gm_series[0];
            rep.geometric_mean = (increasing && (growth > 0.2 || saturated))
                                     ? ClauseVerdict::Pass
                                 : increasing ? ClauseVerdict::Inconclusive
                                              : ClauseVerdict::Fail;
        }
    }

    // (c) Delta_n > delta_min over reliable indices
    bool moduli_ok = true;
    double min_delta = 1e308;
    int delta_computed = 0;
    for (int n = 1; n <= params.horizon; ++n) {
        BandTerms t;
        try {
            t = band.terms(n);
        } catch (const generation_error&) {
            break;
        } catch (const level_error&) {
            break;
        }
        delta_computed = n;
        if (t.delta.flagged()) break;  // deeper moduli unresolvable; verified prefix only
        rep.reliable_delta_through = n;
        double dv = sat_to_double(t.delta);
        min_delta = std::min(min_delta, dv);
        if (!(dv > params.delta_min)) moduli_ok = false;
    }
    rep.min_delta = min_delta;
    rep.moduli = rep.reliable_delta_through == 0 ? ClauseVerdict::Inconclusive
                 : moduli_ok                     ? ClauseVerdict::Pass
                                                 : ClauseVerdict::Fail;
    if (rep.reliable_delta_through < delta_computed)
        rep.notes += "moduli verified through index " +
                     std::to_string(rep.reliable_delta_through) +
                     " (deeper widths below mantissa resolution); ";

    // (d) min a_n > a_threshold, finite-horizon surrogate for the liminf
    double min_a_log = 1e308;
    bool a_ok = true;
    LevelReal log_thresh(std::log(params.a_threshold));
    for (int n = 1; n <= computed; ++n) {
        LevelReal la = band.log_a(n);
        min_a_log = std::min(min_a_log, sat_to_double(la));
        if (cmp(la, log_thresh) != std::strong_ordering::greater) a_ok = false;
    }
    rep.min_a_log = min_a_log;
    rep.a_lower = computed == 0 ? ClauseVerdict::Inconclusive
                  : a_ok        ? ClauseVerdict::Pass
                                : ClauseVerdict::Fail;
    rep.notes += "clause (d) is a finite-horizon min, standing in for the liminf;";
    return rep;
}

}  // namespace escdim
