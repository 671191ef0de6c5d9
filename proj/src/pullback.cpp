#include <mpfr.h>

#include <cmath>

#include "escdim/cover.hpp"

namespace escdim {

namespace {

// minimal RAII wrapper over mpfr_t, rounding to nearest throughout
class Mp {
public:
    explicit Mp(mpfr_prec_t prec) { mpfr_init2(v, prec); }
    Mp(const Mp& o) {
        mpfr_init2(v, mpfr_get_prec(o.v));
        mpfr_set(v, o.v, MPFR_RNDN);
    }
    Mp& operator=(const Mp& o) {
        if (this != &o) mpfr_set(v, o.v, MPFR_RNDN);
        return *this;
    }
    ~Mp() { mpfr_clear(v); }
    mpfr_t v;

    void set(double d) { mpfr_set_d(v, d, MPFR_RNDN); }
    double get() const { return mpfr_get_d(v, MPFR_RNDN); }
};

void mp_two_pi(Mp& out) {
    mpfr_const_pi(out.v, MPFR_RNDN);
    mpfr_mul_ui(out.v, out.v, 2, MPFR_RNDN);
}

// reduce x into [lo, lo + 2*pi)
void mp_wrap(Mp& x, const Mp& lo, const Mp& two_pi, mpfr_prec_t prec) {
    Mp t(prec), q(prec);
    mpfr_sub(t.v, x.v, lo.v, MPFR_RNDN);
    mpfr_div(q.v, t.v, two_pi.v, MPFR_RNDN);
    mpfr_floor(q.v, q.v);
    mpfr_mul(q.v, q.v, two_pi.v, MPFR_RNDN);
    mpfr_sub(x.v, x.v, q.v, MPFR_RNDN);
    // x now in [lo, lo + 2 pi) up to rounding
    while (mpfr_cmp(x.v, lo.v) < 0) mpfr_add(x.v, x.v, two_pi.v, MPFR_RNDN);
    Mp hi(prec);
    mpfr_add(hi.v, lo.v, two_pi.v, MPFR_RNDN);
    while (mpfr_cmp(x.v, hi.v) >= 0) mpfr_sub(x.v, x.v, two_pi.v, MPFR_RNDN);
}

}  // namespace

int CoverGrid::max_verifiable_depth(int precision_bits, int max_depth) const {
    double bits_used = 32;  // guard bits for the margin resolution
    int depth = 0;
    for (int m = 1; m <= max_depth; ++m) {
        BandTerms t;
        try {
            t = term(m - 1);
        } catch (const generation_error&) {
            break;
        }
        double log2b = sat_to_double(t.log_b) / std::log(2.0);
        bits_used += std::max(1.0, log2b);
        if (bits_used > precision_bits) break;
        depth = m;
    }
    return depth;
}

PullbackResult CoverGrid::pullback_point(const std::vector<std::pair<int, int>>& word,
                                         std::complex<double> w, int precision_bits) const {
    if (word.empty()) throw spec_error("pullback: empty word");
    if (precision_bits < 24 || precision_bits > 1 << 20)
        throw spec_error("pullback: precision_bits out of range");
    int steps = static_cast<int>(word.size());
    int plan = max_verifiable_depth(precision_bits, steps);
    if (plan < steps)
        throw budget_error("pullback: depth " + std::to_string(steps) +
                           " exceeds the verifiable depth " + std::to_string(plan) + " at " +
                           std::to_string(precision_bits) + " bits");
    if (std::abs(w) == 0.0) throw spec_error("pullback: target w must be nonzero");

    mpfr_prec_t prec = precision_bits;
    Mp two_pi(prec);
    mp_two_pi(two_pi);

    // backward pass: z = g^(0) o ... o g^(steps-1) (w), cartesian mpfr
    Mp x(prec), y(prec);
    x.set(w.real());
    y.set(w.imag());
    for (int m = steps - 1; m >= 0; --m) {
        int k = word[static_cast<size_t>(m)].second;
        Mp r2(prec), lm(prec), psi(prec), lo(prec);
        mpfr_hypot(r2.v, x.v, y.v, MPFR_RNDN);
        mpfr_log(lm.v, r2.v, MPFR_RNDN);
        mpfr_sub_d(lm.v, lm.v, lambda_log_mod(m), MPFR_RNDN);
        mpfr_atan2(psi.v, y.v, x.v, MPFR_RNDN);
        mpfr_sub_d(psi.v, psi.v, lambda_arg(m), MPFR_RNDN);
        // theta in [k pi - arg lambda, (k+1) pi - arg lambda), representative mod 2 pi
        mpfr_const_pi(lo.v, MPFR_RNDN);
        mpfr_mul_si(lo.v, lo.v, k, MPFR_RNDN);
        mpfr_sub_d(lo.v, lo.v, lambda_arg(m), MPFR_RNDN);
        mp_wrap(psi, lo, two_pi, prec);
        x = lm;
        y = psi;
    }

    PullbackResult res;
    res.precision_bits = precision_bits;
    res.z = {x.get(), y.get()};

    // forward pass in polar form: log|z| would overflow; r itself is fine in
    // mpfr's exponent range for verifiable depths
    Mp r(prec), th(prec), zero(prec);
    zero.set(0.0);
    mpfr_hypot(r.v, x.v, y.v, MPFR_RNDN);
    mpfr_atan2(th.v, y.v, x.v, MPFR_RNDN);
    bool all_ok = true;
    for (int m = 1; m <= steps; ++m) {
        // z_{m} = lambda_{N+m-1} e^{z_{m-1}}
        Mp c(prec), s(prec), re(prec), im(prec);
        mpfr_sin_cos(s.v, c.v, th.v, MPFR_RNDN);
        mpfr_mul(re.v, r.v, c.v, MPFR_RNDN);  // Re z_{m-1}
        mpfr_mul(im.v, r.v, s.v, MPFR_RNDN);  // Im z_{m-1}
        Mp logr(prec);
        mpfr_set(logr.v, re.v, MPFR_RNDN);
        mpfr_add_d(logr.v, logr.v, lambda_log_mod(m - 1), MPFR_RNDN);  // ln|z_m|
        mpfr_set(th.v, im.v, MPFR_RNDN);
        mpfr_add_d(th.v, th.v, lambda_arg(m - 1), MPFR_RNDN);
        mp_wrap(th, zero, two_pi, prec);
        mpfr_exp(r.v, logr.v, MPFR_RNDN);  // |z_m|

        BandTerms t = term(m - 1);
        PullbackStep st;
        st.m = m;
        st.log_margin_lo = logr.get() - sat_to_double(t.log_a);
        st.log_margin_hi = sat_to_double(t.log_b) - logr.get();
        st.verified = st.log_margin_lo >= 0 && st.log_margin_hi >= 0;
        if (st.verified && all_ok) res.verified_depth = m;
        all_ok = all_ok && st.verified;
        res.steps.push_back(st);
    }
    res.fully_verified = all_ok;
    return res;
}

}  // namespace escdim
