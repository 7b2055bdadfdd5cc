#pragma once

#include <cmath>
#include <cstdint>

namespace gaussavg {

// A real number stored as sign in {-1,0,+1} plus the natural log of its
// absolute value. Determinants, factorials and Vandermonde products overflow
// doubles at modest sizes; this representation carries them safely.
//
// Multiplication multiplies signs and adds logs. Addition factors out the
// larger magnitude m:  a + b = sign * m * (1 +/- e^{-delta}), delta >= 0,
// evaluated with log1p/expm1 so nearby magnitudes keep their digits.
class SignedLogValue {
public:
    SignedLogValue() = default;

    static SignedLogValue zero() { return SignedLogValue(); }
    static SignedLogValue one() { return SignedLogValue(+1, 0.0); }

    static SignedLogValue from_log(int sign, double log_abs) {
        SignedLogValue v;
        v.sign_ = sign;
        v.log_abs_ = (sign == 0) ? 0.0 : log_abs;
        return v;
    }

    static SignedLogValue from_value(double x) {
        if (x == 0.0) return zero();
        return from_log(x > 0 ? +1 : -1, std::log(std::abs(x)));
    }

    // n! as a signed-log value (lgamma; exact for every representable n).
    static SignedLogValue factorial(long n) {
        return from_log(+1, std::lgamma(static_cast<double>(n) + 1.0));
    }

    int sign() const { return sign_; }
    double log_abs() const { return log_abs_; }
    bool is_zero() const { return sign_ == 0; }

    double to_double() const {
        if (sign_ == 0) return 0.0;
        return static_cast<double>(sign_) * std::exp(log_abs_);
    }

    SignedLogValue operator-() const { return from_log(-sign_, log_abs_); }

    SignedLogValue operator*(const SignedLogValue& o) const {
        if (sign_ == 0 || o.sign_ == 0) return zero();
        return from_log(sign_ * o.sign_, log_abs_ + o.log_abs_);
    }

    SignedLogValue operator/(const SignedLogValue& o) const {
        if (sign_ == 0) return zero();
        return from_log(sign_ * o.sign_, log_abs_ - o.log_abs_);
    }

    SignedLogValue operator+(const SignedLogValue& o) const {
        if (sign_ == 0) return o;
        if (o.sign_ == 0) return *this;
        const SignedLogValue& big = (log_abs_ >= o.log_abs_) ? *this : o;
        const SignedLogValue& small = (log_abs_ >= o.log_abs_) ? o : *this;
        const double delta = big.log_abs_ - small.log_abs_;
        if (big.sign_ == small.sign_) {
            return from_log(big.sign_, big.log_abs_ + std::log1p(std::exp(-delta)));
        }
        // Opposite signs: magnitude m * (1 - e^{-delta}).
        if (delta == 0.0) return zero();
        return from_log(big.sign_, big.log_abs_ + std::log(-std::expm1(-delta)));
    }

    SignedLogValue& operator*=(const SignedLogValue& o) { return *this = *this * o; }
    SignedLogValue& operator+=(const SignedLogValue& o) { return *this = *this + o; }
    SignedLogValue& operator/=(const SignedLogValue& o) { return *this = *this / o; }

private:
    SignedLogValue(int sign, double log_abs) : sign_(sign), log_abs_(log_abs) {}

    int sign_ = 0;
    double log_abs_ = 0.0;
};

}  // namespace gaussavg
