#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace escdim {

class level_error : public std::runtime_error {
public:
    explicit level_error(const std::string& what) : std::runtime_error(what) {}
};

// Extended real in level-index form: value = sign * exp^level(mantissa).
//
// Canonical form: level 0 has mantissa in [0, kThreshold); level >= 1 has
// mantissa in [ln kThreshold, kThreshold). sign 0 forces level 0, mantissa 0.
// Comparing canonical values by (sign, level, mantissa) agrees with real order.
//
// The `flagged` bit marks values whose mantissa is unreliable beyond the
// representation's resolution (cancellation of nearly equal deep values, or a
// scale factor absorbed below mantissa precision). Flags propagate through
// every operation and drive series truncation downstream; they never affect
// ordering or arithmetic itself.
class LevelReal {
public:
    static constexpr double kThreshold = 1e15;          // T
    static constexpr double kAbsorptionGap = 40.0;      // log-gap beyond which add(x,y) = x exactly
    static constexpr int kMaxLevel = 8;

    LevelReal() = default;                              // zero
    LevelReal(double v);                                // NOLINT: implicit by design

    // exp^level(mantissa) with the given sign, normalized. Throws level_error
    // past kMaxLevel or on non-finite mantissa.
    static LevelReal tower(int sign, int level, double mantissa, bool flag = false);

    int sign() const { return sign_; }
    int level() const { return level_; }
    double mantissa() const { return mantissa_; }
    bool flagged() const { return flag_; }
    bool is_zero() const { return sign_ == 0; }

    LevelReal with_flag(bool f = true) const;

    // True when |value| <= limit is representable as binary64.
    bool fits_double(double limit = 1e300) const;
    double to_double() const;                           // throws level_error if it does not fit

    // "±L<level>:<mantissa-hex-float>", bit-exact round trip of the value.
    std::string serialize() const;
    static LevelReal parse(std::string_view text);

    friend std::strong_ordering cmp(const LevelReal& x, const LevelReal& y);
    bool operator==(const LevelReal& o) const { return cmp(*this, o) == std::strong_ordering::equal; }
    bool operator<(const LevelReal& o) const { return cmp(*this, o) == std::strong_ordering::less; }
    bool operator<=(const LevelReal& o) const { return cmp(*this, o) != std::strong_ordering::greater; }
    bool operator>(const LevelReal& o) const { return cmp(*this, o) == std::strong_ordering::greater; }
    bool operator>=(const LevelReal& o) const { return cmp(*this, o) != std::strong_ordering::less; }

    bool identical(const LevelReal& o) const {          // bitwise representation equality
        return sign_ == o.sign_ && level_ == o.level_ && mantissa_ == o.mantissa_;
    }

private:
    static LevelReal normalized(int sign, int level, double mantissa, bool flag);

    int sign_ = 0;
    int level_ = 0;
    double mantissa_ = 0.0;
    bool flag_ = false;
};

std::strong_ordering cmp(const LevelReal& x, const LevelReal& y);

LevelReal neg(const LevelReal& x);
LevelReal lr_abs(const LevelReal& x);

// Natural log. Requires x > 0. At level >= 1 this is an exact level decrement.
LevelReal lr_ln(const LevelReal& x);

// Exponential. Exact level increment once the result passes kThreshold;
// results below the binary64 underflow floor come back as 0.
LevelReal lr_exp(const LevelReal& x);

// Total, deterministic addition. Same-sign level-0 operands add exactly in
// binary64; otherwise log-sum-exp at the deepest common level, with the
// absorption contract: if ln|x| - ln|y| > kAbsorptionGap the result is x
// exactly. Subtraction of indistinguishable deep values yields a flagged zero.
LevelReal add(const LevelReal& x, const LevelReal& y);
LevelReal sub(const LevelReal& x, const LevelReal& y);

// Value scaled by s. At deep levels a factor can fall below mantissa
// resolution; the result is then x with the flag set.
LevelReal scale(const LevelReal& x, double s);

// x^p for x > 0.
LevelReal lr_pow(const LevelReal& x, double p);

// Saturating binary64 views. `tight` reports that the result was resolved at
// or below the representation's precision floor (treat as unreliable).
struct SatValue {
    double value = 0.0;
    bool tight = false;
};

inline constexpr double kSat = 1e308;                   // saturation bound for binary64 views

SatValue sat_sub(const LevelReal& a, const LevelReal& b);   // a - b
SatValue sat_ratio(const LevelReal& num, const LevelReal& den);  // num/den, den > 0
double sat_to_double(const LevelReal& x);               // clamps to +-kSat

// Deterministic 64-bit PRNG used wherever seeded randomness is specified.
// Fixed splitmix64 constants; versioned as "splitmix64/v1".
struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        state += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }
};

}  // namespace escdim
