#include "escdim/levelreal.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

namespace escdim {

namespace {

const double kLogThreshold = std::log(LevelReal::kThreshold);  // ~34.5388

// Relative resolution floor for deep-level gap reconstruction, in units of the
// mantissa scale one level down.
constexpr double kTightUlps = 64.0;
constexpr double kEps = std::numeric_limits<double>::epsilon();

bool tight_gap(double gap, double mantissa_scale) {
    return std::abs(gap) <= kTightUlps * kEps * std::max(1.0, mantissa_scale);
}

}  // namespace

LevelReal LevelReal::normalized(int sign, int level, double mantissa, bool flag) {
    if (!std::isfinite(mantissa)) throw level_error("levelreal: non-finite mantissa");
    if (mantissa < 0.0) throw level_error("levelreal: negative mantissa (sign carries the sign)");
    if (sign == 0 || (mantissa == 0.0 && level == 0)) {
        LevelReal z;
        z.flag_ = flag;
        return z;
    }
    while (level >= 1 && mantissa < kLogThreshold) {
        mantissa = std::exp(mantissa);
        --level;
    }
    while (mantissa >= kThreshold) {
        mantissa = std::log(mantissa);
        ++level;
    }
    if (level > kMaxLevel)
        throw level_error("levelreal: level cap " + std::to_string(kMaxLevel) + " exceeded");
    LevelReal r;
    r.sign_ = sign;
    r.level_ = level;
    r.mantissa_ = mantissa;
    r.flag_ = flag;
    return r;
}

LevelReal::LevelReal(double v) {
    if (!std::isfinite(v)) throw level_error("levelreal: non-finite double");
    *this = normalized(v > 0 ? 1 : v < 0 ? -1 : 0, 0, std::abs(v), false);
}

LevelReal LevelReal::tower(int sign, int level, double mantissa, bool flag) {
    if (sign < -1 || sign > 1) throw level_error("levelreal: sign must be -1, 0 or 1");
    if (level < 0) throw level_error("levelreal: negative level");
    if (sign == 0) return normalized(0, 0, 0.0, flag);
    return normalized(sign, level, mantissa, flag);
}

LevelReal LevelReal::with_flag(bool f) const {
    LevelReal r = *this;
    r.flag_ = f;
    return r;
}

bool LevelReal::fits_double(double limit) const {
    if (sign_ == 0) return true;
    if (level_ == 0) return mantissa_ <= limit;
    if (level_ == 1) return mantissa_ <= std::log(limit);
    return false;
}

double LevelReal::to_double() const {
    if (sign_ == 0) return 0.0;
    if (level_ == 0) return sign_ * mantissa_;
    if (level_ == 1 && mantissa_ <= 709.0) return sign_ * std::exp(mantissa_);
    throw level_error("levelreal: value does not fit binary64");
}

std::string LevelReal::serialize() const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%cL%d:%a", sign_ < 0 ? '-' : '+', level_, mantissa_);
    return buf;
}

LevelReal LevelReal::parse(std::string_view text) {
    if (text.size() < 5 || (text[0] != '+' && text[0] != '-') || text[1] != 'L')
        throw level_error("levelreal: bad serialization '" + std::string(text) + "'");
    int sign = text[0] == '-' ? -1 : 1;
    std::string rest(text.substr(2));
    char* end = nullptr;
    long level = std::strtol(rest.c_str(), &end, 10);
    if (end == rest.c_str() || *end != ':')
        throw level_error("levelreal: bad serialization '" + std::string(text) + "'");
    const char* mstart = end + 1;
    char* mend = nullptr;
    double m = std::strtod(mstart, &mend);
    if (mend == mstart || *mend != '\0')
        throw level_error("levelreal: bad serialization '" + std::string(text) + "'");
    if (m == 0.0) sign = 0;
    return tower(sign, static_cast<int>(level), m);
}

std::strong_ordering cmp(const LevelReal& x, const LevelReal& y) {
    if (x.sign_ != y.sign_) return x.sign_ <=> y.sign_;
    if (x.sign_ == 0) return std::strong_ordering::equal;
    // magnitudes ordered by (level, mantissa); invert for negatives
    std::strong_ordering mag = x.level_ != y.level_ ? x.level_ <=> y.level_
                               : x.mantissa_ < y.mantissa_ ? std::strong_ordering::less
                               : x.mantissa_ > y.mantissa_ ? std::strong_ordering::greater
                                                           : std::strong_ordering::equal;
    if (x.sign_ < 0) {
        if (mag == std::strong_ordering::less) return std::strong_ordering::greater;
        if (mag == std::strong_ordering::greater) return std::strong_ordering::less;
    }
    return mag;
}

LevelReal neg(const LevelReal& x) {
    return LevelReal::tower(-x.sign(), x.level(), x.mantissa(), x.flagged());
}

LevelReal lr_abs(const LevelReal& x) {
    return x.sign() >= 0 ? x : neg(x);
}

LevelReal lr_ln(const LevelReal& x) {
    if (x.sign() <= 0) throw level_error("levelreal: ln of nonpositive value");
    if (x.level() >= 1) return LevelReal::tower(1, x.level() - 1, x.mantissa(), x.flagged());
    double v = std::log(x.mantissa());
    return LevelReal::tower(v > 0 ? 1 : v < 0 ? -1 : 0, 0, std::abs(v), x.flagged());
}

LevelReal lr_exp(const LevelReal& x) {
    if (x.sign() == 0) return LevelReal(1.0).with_flag(x.flagged());
    if (x.sign() > 0) {
        if (x.level() == 0 && x.mantissa() < kLogThreshold)
            return LevelReal(std::exp(x.mantissa())).with_flag(x.flagged());
        return LevelReal::tower(1, x.level() + 1, x.mantissa(), x.flagged());
    }
    // negative exponents: representable range only; deep negatives underflow to 0
    if (x.level() == 0 && x.mantissa() <= 745.0)
        return LevelReal(std::exp(-x.mantissa())).with_flag(x.flagged());
    return LevelReal().with_flag(x.flagged());
}

namespace {

// ln(big/small) for 0 < small <= big, as a saturating double.
SatValue log_gap_mag(const LevelReal& big, const LevelReal& small);

// a - b as a saturating double; `tight` marks results at the resolution floor.
SatValue sat_sub_impl(const LevelReal& a, const LevelReal& b) {
    if (a.identical(b)) return {0.0, a.level() >= 1};
    if (a.fits_double() && b.fits_double()) return {a.to_double() - b.to_double(), false};
    // at least one side exceeds 1e300
    if (a.sign() >= 0 && b.sign() <= 0) return {kSat, false};
    if (a.sign() <= 0 && b.sign() >= 0) return {-kSat, false};
    // same sign, both huge in magnitude
    int s = a.sign();
    LevelReal ma = lr_abs(a), mb = lr_abs(b);
    int ord = cmp(ma, mb) == std::strong_ordering::less ? -1 : 1;  // not equal here
    const LevelReal& hi = ord > 0 ? ma : mb;
    const LevelReal& lo = ord > 0 ? mb : ma;
    int rsign = s * ord;  // sign of a-b
    SatValue g = log_gap_mag(hi, lo);
    if (g.value > LevelReal::kAbsorptionGap) return {rsign * kSat, g.tight};
    if (g.value == 0.0) return {0.0, true};
    LevelReal lnlo = lr_ln(lo);
    double lnlo_d = lnlo.fits_double() ? lnlo.to_double() : kSat;
    double lndiff = lnlo_d + std::log(std::expm1(g.value));
    bool tight = g.tight;
    if (lndiff > 709.0) return {rsign * kSat, tight};
    return {rsign * std::exp(lndiff), tight};
}

SatValue log_gap_mag(const LevelReal& big, const LevelReal& small) {
    if (big.identical(small)) return {0.0, big.level() >= 1};
    if (big.level() == 0 && small.level() == 0) {
        double r = big.mantissa() / small.mantissa();
        double g = (r < 2.0) ? std::log1p((big.mantissa() - small.mantissa()) / small.mantissa())
                             : std::log(r);
        return {g, false};
    }
    LevelReal la = lr_ln(big), lb = lr_ln(small);
    SatValue d = sat_sub_impl(la, lb);
    double scale_ref = lb.fits_double() ? std::abs(lb.to_double()) : kSat;
    d.tight = d.tight || tight_gap(d.value, scale_ref);
    if (d.value >= kSat) return {kSat, d.tight};
    return d;
}

}  // namespace

SatValue sat_sub(const LevelReal& a, const LevelReal& b) { return sat_sub_impl(a, b); }

SatValue sat_ratio(const LevelReal& num, const LevelReal& den) {
    if (den.sign() <= 0) throw level_error("levelreal: ratio with nonpositive denominator");
    if (num.sign() == 0) return {0.0, false};
    if (num.fits_double() && den.fits_double()) return {num.to_double() / den.to_double(), false};
    LevelReal mag = lr_abs(num);
    SatValue g = cmp(mag, den) == std::strong_ordering::less
                     ? SatValue{-log_gap_mag(den, mag).value, log_gap_mag(den, mag).tight}
                     : log_gap_mag(mag, den);
    double v;
    if (g.value > 709.0)
        v = kSat;
    else if (g.value < -745.0)
        v = 0.0;
    else
        v = std::exp(g.value);
    return {num.sign() * v, g.tight};
}

double sat_to_double(const LevelReal& x) {
    if (x.fits_double()) return x.to_double();
    return x.sign() * kSat;
}

namespace {

// same-sign magnitude addition, |x| >= |y| > 0
LevelReal add_mag(const LevelReal& x, const LevelReal& y, int sign, bool flag) {
    if (x.level() == 0) {  // then y.level() == 0 too: exact binary64 sum
        return LevelReal::tower(sign, 0, x.mantissa() + y.mantissa(), flag);
    }
    SatValue g = log_gap_mag(x, y);
    if (g.value > LevelReal::kAbsorptionGap)
        return LevelReal::tower(sign, x.level(), x.mantissa(), flag);
    // ln(x+y) = ln x + log1p(exp(-gap))
    LevelReal lnsum = add(lr_ln(x), LevelReal(std::log1p(std::exp(-g.value))));
    LevelReal r = lr_exp(lnsum);
    return LevelReal::tower(sign, r.level(), r.mantissa(), flag || r.flagged() || g.tight);
}

// magnitude subtraction |x| - |y| with |x| > |y| > 0 (strict), result sign `sign`
LevelReal sub_mag(const LevelReal& x, const LevelReal& y, int sign, bool flag) {
    if (x.level() == 0) {
        return LevelReal::tower(sign, 0, x.mantissa() - y.mantissa(), flag);
    }
    SatValue g = log_gap_mag(x, y);
    if (g.value > LevelReal::kAbsorptionGap)
        return LevelReal::tower(sign, x.level(), x.mantissa(), flag);
    if (g.value == 0.0 || g.tight) {
        // catastrophic cancellation at level >= 1: flagged indistinguishable zero
        return LevelReal().with_flag(true);
    }
    // |x| - |y| = |y| * expm1(gap)
    LevelReal lndiff = add(lr_ln(y), LevelReal(std::log(std::expm1(g.value))));
    LevelReal r = lr_exp(lndiff);
    return LevelReal::tower(sign, r.level(), r.mantissa(), flag || r.flagged());
}

}  // namespace

LevelReal add(const LevelReal& x, const LevelReal& y) {
    bool flag = x.flagged() || y.flagged();
    if (x.sign() == 0) return y.with_flag(flag);
    if (y.sign() == 0) return x.with_flag(flag);
    LevelReal mx = lr_abs(x), my = lr_abs(y);
    std::strong_ordering mag = cmp(mx, my);
    // order operands so that add is exactly commutative
    const LevelReal& big = mag == std::strong_ordering::less ? my : mx;
    const LevelReal& sml = mag == std::strong_ordering::less ? mx : my;
    int big_sign = mag == std::strong_ordering::less ? y.sign() : x.sign();
    int sml_sign = mag == std::strong_ordering::less ? x.sign() : y.sign();
    if (big_sign == sml_sign) return add_mag(big, sml, big_sign, flag);
    if (mag == std::strong_ordering::equal) {
        // exact cancellation; indistinguishable at level >= 1
        return LevelReal().with_flag(flag || big.level() >= 1);
    }
    return sub_mag(big, sml, big_sign, flag);
}

LevelReal sub(const LevelReal& x, const LevelReal& y) { return add(x, neg(y)); }

LevelReal scale(const LevelReal& x, double s) {
    if (!std::isfinite(s)) throw level_error("levelreal: non-finite scale factor");
    if (s == 0.0 || x.sign() == 0) return LevelReal().with_flag(x.flagged());
    int sign = s > 0 ? x.sign() : -x.sign();
    double as = std::abs(s);
    if (x.level() == 0)
        return LevelReal::tower(sign, 0, x.mantissa() * as, x.flagged());
    LevelReal lnmag = LevelReal::tower(1, x.level() - 1, x.mantissa(), false);
    LevelReal lnres = add(lnmag, LevelReal(std::log(as)));
    bool absorbed = as != 1.0 && lnres.identical(lnmag);
    LevelReal r = lr_exp(lnres);
    return LevelReal::tower(sign, r.level(), r.mantissa(), x.flagged() || r.flagged() || absorbed);
}

LevelReal lr_pow(const LevelReal& x, double p) {
    if (x.sign() <= 0) throw level_error("levelreal: pow of nonpositive base");
    if (p == 0.0) return LevelReal(1.0).with_flag(x.flagged());
    if (x.level() == 0) {
        double m = x.mantissa();
        if (m > 0 && std::log(m) * p < 700.0 && std::log(m) * p > -700.0)
            return LevelReal(std::pow(m, p)).with_flag(x.flagged());
    }
    LevelReal r = lr_exp(scale(lr_ln(x), p));
    return r.with_flag(r.flagged() || x.flagged());
}

}  // namespace escdim
