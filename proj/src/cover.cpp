#include "escdim/cover.hpp"

#include <algorithm>
#include <cmath>

namespace escdim {

namespace {
constexpr double kPi = 3.141592653589793238462643383279;
constexpr double kTwoPi = 2 * kPi;
}  // namespace

double GridParams::d0() const { return std::sqrt(kPi * kPi + delta * delta); }

void GridParams::validate() const {
    if (N < 1) throw spec_error("grid: N must be >= 1");
    if (!(delta > 0 && delta < std::min(delta_min / 4, 1.0)))
        throw spec_error("grid: need 0 < delta < min(delta_min/4, 1)");
    if (!(std::sqrt(q) * std::exp(delta) < 1))
        throw spec_error("grid: need sqrt(q) e^delta < 1");
    if (eps_reg <= 0) throw spec_error("grid: eps_reg must be positive");
    if (a_threshold <= 0) throw spec_error("grid: a_threshold must be positive");
}

ConstantsLedger ConstantsLedger::defaults(const GridParams& gp) {
    ConstantsLedger l;
    double d0 = gp.d0();
    double a = gp.a_threshold;
    double ed = std::exp(gp.delta);
    double sq = std::sqrt(gp.q);
    if (a <= 2 * d0 * ed)
        throw spec_error("ledger: a_threshold too small for the branch-derivative constant");
    l.c = std::max(ed * (1 + 2 * d0 / a), 1.0 / (1 - 2 * d0 * ed / a));
    l.provenance.emplace_back("c", "explicit branch-derivative formula");
    l.c2 = std::max(ed + sq, 1.0 / (ed - sq));
    l.provenance.emplace_back("c2", "strip-width sandwich from the grid geometry");
    l.c3 = std::min(gp.delta_min, a / ed) / l.c2;
    l.provenance.emplace_back("c3", "width floor, implementation-chosen");
    l.c1 = (1.0 / gp.delta + 1.0 / l.c3) * (ed / kPi + ed / a);
    l.provenance.emplace_back("c1", "cells meeting a D x e^((j+1)delta) box, implementation-chosen");
    double h_c = std::sqrt(2.0) * (ed - 1) / 4.0;
    l.c1_tilde = h_c / (16 * gp.delta * kPi);
    l.provenance.emplace_back("c1~", "even cells inside the contained rectangle, implementation-chosen");
    l.c4 = 1.1;
    l.provenance.emplace_back("c4", "cover-sum outer constant, implementation-chosen");
    l.c3_sum = 1.05;
    l.provenance.emplace_back("c3s", "cover-sum inner constant, implementation-chosen");
    l.c7 = 1.0;
    l.provenance.emplace_back("c7", "profile constant, implementation-chosen");
    l.C_big = 1e6;
    l.C_tilde = 1e6;
    l.provenance.emplace_back("C", "radius-window constant, implementation-chosen");
    l.Q = std::max(2.0, a / (ed * l.c));
    l.provenance.emplace_back("Q", "per-step contraction floor");
    return l;
}

CoverGrid::CoverGrid(BandPtr band, GridParams gp)
    : CoverGrid(std::move(band), gp, ConstantsLedger::defaults(gp)) {}

CoverGrid::CoverGrid(BandPtr band, GridParams gp, ConstantsLedger ledger)
    : band_(std::move(band)), gp_(gp), led_(std::move(ledger)) {
    gp_.validate();
}

BandTerms CoverGrid::term(int idx_from_N) const { return band_->terms(gp_.N + idx_from_N); }

double CoverGrid::lambda_log_mod(int n) const { return std::log(band_->lambda_mod(gp_.N + n)); }
double CoverGrid::lambda_arg(int n) const { return band_->lambda_arg(gp_.N + n); }

StripData CoverGrid::strip(int n) const {
    BandTerms t;
    try {
        t = term(n);
    } catch (const generation_error& e) {
        throw depth_limit_error(std::string("strip: ") + e.what());
    }
    if (!t.log_a.fits_double(1e300) || !t.log_b.fits_double(1e300))
        throw depth_limit_error("strip: logs exceed binary64 at depth " + std::to_string(n));
    StripData s;
    s.n = n;
    s.A = t.log_a.to_double() - lambda_log_mod(n);
    s.B = t.log_b.to_double() - lambda_log_mod(n);
    return s;
}

JRange CoverGrid::j_range(int n) const {
    BandTerms t;
    try {
        t = term(n);
    } catch (const generation_error& e) {
        throw depth_limit_error(std::string("j_range: ") + e.what());
    }
    if (!t.log_a.fits_double(1e300) || !t.log_b.fits_double(1e300))
        throw depth_limit_error("j_range: logs exceed binary64");
    double lo = t.log_a.to_double() / gp_.delta - 1;  // j strictly greater
    double hi = t.log_b.to_double() / gp_.delta;      // j strictly smaller
    JRange r;
    r.lo = static_cast<int>(std::floor(lo)) + 1;
    r.hi = static_cast<int>(std::ceil(hi)) - 1;
    if (static_cast<double>(r.hi) >= hi) --r.hi;  // enforce strictness at integers
    if (static_cast<double>(r.lo) <= lo) ++r.lo;
    return r;
}

double CoverGrid::strip_width_D(int n, int j) const {
    StripData s = strip(n);
    double e_next = std::exp((j + 1) * gp_.delta);
    return std::min(s.B, e_next) - std::max(s.A, -e_next);
}

bool CoverGrid::width_sandwich_ok(int n, int j) const {
    double D = strip_width_D(n, j);
    StripData s = strip(n);
    double m = std::min(s.B - s.A, std::exp(j * gp_.delta));
    return D >= m / led_.c2 && D <= led_.c2 * m;
}

std::complex<double> CoverGrid::inverse_branch(int n, int k, double log_mod_w,
                                               double arg_w) const {
    if (!std::isfinite(log_mod_w)) throw spec_error("inverse_branch: w must be nonzero");
    double x = log_mod_w - lambda_log_mod(n);
    double lam_arg = lambda_arg(n);
    double lo = k * kPi - lam_arg;
    double psi = arg_w - lam_arg;
    double rem = std::fmod(psi - lo, kTwoPi);
    if (rem < 0) rem += kTwoPi;
    if (rem >= kPi)
        throw spec_error("inverse_branch: w lies outside the angular domain of this branch");
    return {x, lo + rem};
}

namespace {

struct Rect {
    double x0, x1, y0, y1;
    bool empty() const { return x1 < x0 || y1 < y0; }
};

double min_sq(double a, double b) {
    // min of t^2 over [a, b]
    if (a <= 0 && 0 <= b) return 0;
    double m = std::min(std::abs(a), std::abs(b));
    return m * m;
}
double max_sq(double a, double b) {
    double m = std::max(std::abs(a), std::abs(b));
    return m * m;
}

// rectangle vs (ring sector between radii) x (half-plane) x (vertical strip)
bool rect_intersects(const Rect& cell, double r_lo, double r_hi, bool upper_half, double A,
                     double B) {
    Rect r = cell;
    r.x0 = std::max(r.x0, A);
    r.x1 = std::min(r.x1, B);
    if (upper_half)
        r.y0 = std::max(r.y0, 0.0);
    else
        r.y1 = std::min(r.y1, 0.0);
    if (r.empty()) return false;
    double lo2 = min_sq(r.x0, r.x1) + min_sq(r.y0, r.y1);
    double hi2 = max_sq(r.x0, r.x1) + max_sq(r.y0, r.y1);
    return lo2 < r_hi * r_hi && hi2 >= r_lo * r_lo;
}

bool rect_contained(const Rect& cell, double r_lo, double r_hi, bool upper_half, double A,
                    double B) {
    if (cell.x0 < A || cell.x1 > B) return false;
    if (upper_half ? cell.y0 < 0 : cell.y1 > 0) return false;
    double lo2 = min_sq(cell.x0, cell.x1) + min_sq(cell.y0, cell.y1);
    double hi2 = max_sq(cell.x0, cell.x1) + max_sq(cell.y0, cell.y1);
    return lo2 >= r_lo * r_lo && hi2 < r_hi * r_hi;
}

}  // namespace

CountResult CoverGrid::count_branches(int n, int j, int k, bool exact, long budget) const {
    double D = strip_width_D(n + 1, j);
    double ejd = std::exp(j * gp_.delta);
    CountResult res;
    double h_c = std::sqrt(2.0) * (std::exp(gp_.delta) - 1) / 4.0;
    res.regime_ok = D >= 4 * gp_.delta && h_c * ejd >= 4 * kPi && D <= 2 * h_c * ejd;
    res.lower = led_.c1_tilde * D * ejd;
    res.upper = led_.c1 * D * ejd;
    if (!exact) return res;

    if ((j + 1) * gp_.delta > 690.0)
        throw budget_error("count_branches: e^(j delta) exceeds binary64 in exact mode");
    StripData s = strip(n + 1);
    double r_lo = ejd;
    double r_hi = std::exp((j + 1) * gp_.delta);
    bool upper_half = ((k % 2) + 2) % 2 == 0;
    double ox = -lambda_log_mod(n + 1);
    double oy = -lambda_arg(n + 1);
    // candidate window
    double xlo = std::max(s.A, -r_hi), xhi = std::min(s.B, r_hi);
    double ylo = upper_half ? 0.0 : -r_hi;
    double yhi = upper_half ? r_hi : 0.0;
    if (xhi < xlo) {
        res.exact = true;
        res.lower = res.upper = 0;
        return res;
    }
    long j_lo = static_cast<long>(std::floor((xlo - ox) / gp_.delta)) - 1;
    long j_hi = static_cast<long>(std::ceil((xhi - ox) / gp_.delta)) + 1;
    long k_lo = static_cast<long>(std::floor((ylo - oy) / kPi)) - 1;
    long k_hi = static_cast<long>(std::ceil((yhi - oy) / kPi)) + 1;
    long total = (j_hi - j_lo + 1) * (k_hi - k_lo + 1);
    if (total > budget)
        throw budget_error("count_branches: " + std::to_string(total) +
                           " cells exceed the budget of " + std::to_string(budget));
    long n_meet = 0, n_contained_even = 0;
    for (long jj = j_lo; jj <= j_hi; ++jj) {
        for (long kk = k_lo; kk <= k_hi; ++kk) {
            Rect cell{jj * gp_.delta + ox, (jj + 1) * gp_.delta + ox, kk * kPi + oy,
                      (kk + 1) * kPi + oy};
            ++res.cells_scanned;
            if (rect_intersects(cell, r_lo, r_hi, upper_half, s.A, s.B)) {
                ++n_meet;
                if (jj % 2 == 0 && kk % 2 == 0 &&
                    rect_contained(cell, r_lo, r_hi, upper_half, s.A, s.B))
                    ++n_contained_even;
            }
        }
    }
    res.exact = true;
    res.lower = static_cast<double>(n_contained_even);
    res.upper = static_cast<double>(n_meet);
    return res;
}

LevelReal CoverGrid::cover_sum_logbound(double D_exp, int n) const {
    if (!(D_exp > 1)) throw spec_error("cover_sum: exponent must exceed 1");
    LevelReal sum_log_a;
    for (int m = 0; m <= n; ++m) sum_log_a = add(sum_log_a, term(m).log_a);
    LevelReal log_delta_next = term(n + 1).log_delta;
    LevelReal tail = scale(sub(log_delta_next, sum_log_a), D_exp - 1);
    return add(LevelReal(n * std::log(led_.c4)), tail);
}

double CoverGrid::cover_sum_inner_logbound(double D_exp, int n, double sum_j_delta) const {
    LevelReal ld = term(n + 1).log_delta;
    return n * std::log(led_.c3_sum) +
           (D_exp - 1) * (sat_to_double(ld) - sum_j_delta);
}

Cylinder CoverGrid::root_cylinder(int j0, int k0, Cylinder::Family family) const {
    Cylinder c;
    c.family = family;
    if (family == Cylinder::Family::Lower && (j0 % 2 != 0 || k0 % 2 != 0))
        throw spec_error("lower-family cylinders use even indices");
    c.word.emplace_back(j0, k0);
    c.log_diam_lower = LevelReal(std::log(gp_.d0()));
    c.log_diam_upper = LevelReal(std::log(gp_.d0()));
    c.log_mass_lower = LevelReal(0.0);
    c.log_mass_upper = LevelReal(0.0);
    return c;
}

Cylinder CoverGrid::cylinder_extend(const Cylinder& cyl, int j_next, int k_next) const {
    int n = cyl.depth();
    auto [j_n, k_n] = cyl.word.back();
    if (cyl.family == Cylinder::Family::Lower && (j_next % 2 != 0 || k_next % 2 != 0))
        throw spec_error("cylinder_extend: lower-family letters must be even");
    // legality: the new cell must meet (upper family) or lie inside (lower
    // family) U_{j_n,k_n} intersected with S_{n+1}
    StripData s = strip(n + 1);
    double r_lo = std::exp(j_n * gp_.delta);
    double r_hi = std::exp((j_n + 1) * gp_.delta);
    bool upper_half = ((k_n % 2) + 2) % 2 == 0;
    double ox = -lambda_log_mod(n + 1);
    double oy = -lambda_arg(n + 1);
    Rect cell{j_next * gp_.delta + ox, (j_next + 1) * gp_.delta + ox, k_next * kPi + oy,
              (k_next + 1) * kPi + oy};
    bool legal = cyl.family == Cylinder::Family::Upper
                     ? rect_intersects(cell, r_lo, r_hi, upper_half, s.A, s.B)
                     : rect_contained(cell, r_lo, r_hi, upper_half, s.A, s.B);
    if (!legal)
        throw spec_error(
            cyl.family == Cylinder::Family::Upper
                ? "cylinder_extend: cell does not meet U(j,k) cut with the next strip"
                : "cylinder_extend: cell is not contained in U(j,k) cut with the next strip");

    double step = j_n * gp_.delta;
    double log_c = std::log(led_.c);
    if (log_c - step > -std::log(2.0) + 1e-12)
        throw spec_error("cylinder_extend: contraction factor above 1/2 (below the paper regime)");
    Cylinder out = cyl;
    out.word.emplace_back(j_next, k_next);
    out.log_diam_upper = add(out.log_diam_upper, LevelReal(log_c - step));
    out.log_diam_lower = add(out.log_diam_lower, LevelReal(-log_c - step));
    double D = strip_width_D(n + 1, j_n);
    out.log_mass_lower =
        sub(out.log_mass_lower, LevelReal(std::log(led_.c1 * D) + step));
    out.log_mass_upper =
        sub(out.log_mass_upper, LevelReal(std::log(led_.c1_tilde * D) + step));
    return out;
}

std::vector<std::pair<int, int>> CoverGrid::canonical_word(int depth) const {
    std::vector<std::pair<int, int>> w;
    for (int m = 0; m <= depth; ++m) {
        BandTerms t = term(m);
        if (!t.log_a.fits_double(1e300)) break;
        int j = static_cast<int>(std::lround(t.log_a.to_double() / gp_.delta));
        w.emplace_back(j, 0);
    }
    return w;
}

RatioSeries CoverGrid::capital_psi_series(const std::vector<std::pair<int, int>>& word) const {
    SeriesBuilder b("capital-psi", static_cast<int>(word.size()));
    double sum_x = 0, sum_min = 0;
    for (size_t m = 0; m + 1 < word.size(); ++m) {
        double x = word[m].first * gp_.delta;
        LevelReal ld;
        try {
            ld = term(static_cast<int>(m) + 1).log_delta;
        } catch (const generation_error& e) {
            b.truncate(static_cast<int>(m), e.what());
            break;
        }
        double logd = sat_to_double(ld);
        sum_x += x;
        sum_min += std::min(logd, x);
        if (m == 0) continue;  // Psi_n needs n >= 1
        b.push(static_cast<int>(m), sum_min / sum_x, ld.flagged());
    }
    return b.take();
}

ProfileResult CoverGrid::local_dimension_profile(const std::vector<std::pair<int, int>>& word,
                                                 int horizon) const {
    if (word.size() < 3) throw spec_error("profile: word must have at least 3 letters");
    ProfileResult res;
    double sqrtC = std::sqrt(led_.C_big);
    double sum_jd = word[0].first * gp_.delta;
    double logD_prod = 0;  // log(D^(1)...D^(n)) accumulates below
    for (int n = 1; n + 1 < static_cast<int>(word.size()) && n <= horizon; ++n) {
        int j_prev = word[static_cast<size_t>(n) - 1].first;
        int j_n = word[static_cast<size_t>(n)].first;
        logD_prod += std::log(strip_width_D(n, j_prev));
        sum_jd += j_n * gp_.delta;
        double D_next = strip_width_D(n + 1, j_n);
        // diameters contract like c^{+-1} e^{-j delta} per step
        double dn_over_dn1 = std::exp(j_n * gp_.delta) / led_.c;
        double R_minus = sqrtC;
        double R_plus = sqrtC * dn_over_dn1;
        if (R_plus <= R_minus) throw spec_error("profile: degenerate radius window");
        auto h = [&](double x) {
            double den = sum_jd - std::log(x) - led_.c7 * n;
            if (den <= 0) throw pre_asymptotic_error("profile: nonpositive denominator");
            if (x <= D_next) return (logD_prod + std::log(D_next) - std::log(x) + led_.c7 * n) / den;
            return (logD_prod + led_.c7 * n) / den;
        };
        ProfileRow row;
        row.n = n;
        bool first = true;
        auto sample = [&](double x) {
            double v = h(x);
            if (first) {
                row.sampled_inf = row.sampled_sup = v;
                first = false;
            } else {
                row.sampled_inf = std::min(row.sampled_inf, v);
                row.sampled_sup = std::max(row.sampled_sup, v);
            }
        };
        try {
            double lr = std::log(R_minus), ur = std::log(R_plus);
            for (int i = 0; i < 64; ++i) sample(std::exp(lr + (ur - lr) * i / 63.0));
            if (D_next > R_minus && D_next < R_plus) sample(D_next);
        } catch (const pre_asymptotic_error&) {
            break;  // profile meaningful only past the pre-asymptotic range
        }
        double den_inf = sum_jd - std::log(D_next);
        row.target_inf = den_inf > 0 ? logD_prod / den_inf : 0;
        double t1 = (sum_jd - j_n * gp_.delta) > 0 ? logD_prod / (sum_jd - j_n * gp_.delta) : 0;
        double t2 = sum_jd > 0 ? (logD_prod + std::log(D_next)) / sum_jd : 0;
        row.target_sup = std::max(t1, t2);
        // capital Phi/Psi at x_m = delta j_m
        double sx = 0, smin = 0, last_min = 0;
        for (int m = 0; m <= n; ++m) {
            double x = word[static_cast<size_t>(m)].first * gp_.delta;
            double logd = sat_to_double(term(m + 1).log_delta);
            sx += x;
            double mn = std::min(logd, x);
            if (m < n) smin += mn;
            last_min = mn;
        }
        double phi_den = sx - last_min;
        row.phi = phi_den > 0 ? smin / phi_den : 0;
        row.psi = sx > 0 ? (smin + last_min) / sx : 0;
        res.rows.push_back(row);
    }
    if (!res.rows.empty()) {
        const ProfileRow& last = res.rows.back();
        res.final_gap_inf = std::abs(last.sampled_inf - last.target_inf);
        res.final_gap_sup = std::abs(last.sampled_sup - last.target_sup);
    }
    return res;
}

RegularizedStrip regularize_interval(double A, double B, double delta) {
    RegularizedStrip r;
    r.A2 = A;
    r.B2 = B;
    if (A < 0) {
        // alpha with -e^((alpha+1)delta) <= A < -e^(alpha delta)
        double t = std::log(-A) / delta;
        int alpha = static_cast<int>(std::ceil(t)) - 1;
        while (-std::exp((alpha + 1) * delta) > A) --alpha;
        while (-std::exp(alpha * delta) <= A) ++alpha;
        r.alpha = alpha;
        r.A2 = -std::exp((alpha + 1.5) * delta);
        r.a_sandwich_ok = std::exp(1.5 * delta) * A <= r.A2 && r.A2 <= A;
    }
    if (B > 0) {
        double t = std::log(B) / delta;
        int beta = static_cast<int>(std::floor(t));
        while (std::exp(beta * delta) > B) --beta;
        while (std::exp((beta + 1) * delta) <= B) ++beta;
        r.beta = beta;
        r.B2 = std::exp((beta + 1.5) * delta);
        r.b_sandwich_ok = B <= r.B2 && r.B2 <= std::exp(1.5 * delta) * B;
    }
    return r;
}

std::vector<RegularizedStrip> CoverGrid::regularize_band(int horizon) const {
    std::vector<RegularizedStrip> out;
    for (int n = 0; n <= horizon; ++n) {
        StripData s;
        try {
            s = strip(n);
        } catch (const depth_limit_error&) {
            break;
        }
        out.push_back(regularize_interval(s.A, s.B, gp_.delta));
    }
    return out;
}

}  // namespace escdim
