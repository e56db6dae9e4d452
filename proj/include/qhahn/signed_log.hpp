#pragma once

#include <cmath>
#include <limits>

namespace qhahn {

/// A real number stored as sign plus log-magnitude.
///
/// q-Pochhammer products and basic hypergeometric terms routinely span
/// hundreds of orders of magnitude, and symbols (a;q)_n are negative for
/// a > 1, so both the scale and the sign have to be carried explicitly.
/// Invariant: sign == 0 iff log_mag == -infinity.
struct SignedLog {
    double log_mag = -std::numeric_limits<double>::infinity();
    int sign = 0;

    static constexpr SignedLog zero() { return {}; }

    static SignedLog one() { return {0.0, 1}; }

    static SignedLog of(double x) {
        if (x == 0.0) return zero();
        return {std::log(std::fabs(x)), x > 0 ? 1 : -1};
    }

    static SignedLog from_log(double lm, int s) {
        if (s == 0 || lm == -std::numeric_limits<double>::infinity()) return zero();
        return {lm, s > 0 ? 1 : -1};
    }

    bool is_zero() const { return sign == 0; }

    double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_mag); }

    SignedLog operator-() const { return {log_mag, -sign}; }

    SignedLog& operator*=(const SignedLog& o) {
        if (sign == 0 || o.sign == 0) { *this = zero(); return *this; }
        log_mag += o.log_mag;
        sign *= o.sign;
        return *this;
    }

    SignedLog& operator/=(const SignedLog& o) {
        if (sign == 0) return *this;
        log_mag -= o.log_mag;  // division by zero yields +inf magnitude; callers guard
        sign *= (o.sign == 0 ? 1 : o.sign);
        return *this;
    }

    friend SignedLog operator*(SignedLog a, const SignedLog& b) { return a *= b; }
    friend SignedLog operator/(SignedLog a, const SignedLog& b) { return a /= b; }

    SignedLog& mul_real(double x) { return *this *= of(x); }

    /// Integer power (sign handled for negative bases).
    SignedLog pow_int(long long n) const {
        if (sign == 0) return n == 0 ? one() : zero();
        int s = (sign < 0 && (n & 1)) ? -1 : 1;
        return {log_mag * static_cast<double>(n), s};
    }

    friend bool operator<(const SignedLog& a, const SignedLog& b) {
        if (a.sign != b.sign) return a.sign < b.sign;
        if (a.sign == 0) return false;
        return a.sign > 0 ? a.log_mag < b.log_mag : a.log_mag > b.log_mag;
    }
};

/// Signed log-sum-exp of two values.
inline SignedLog slog_add(const SignedLog& a, const SignedLog& b) {
    if (a.sign == 0) return b;
    if (b.sign == 0) return a;
    const SignedLog& hi = (a.log_mag >= b.log_mag) ? a : b;
    const SignedLog& lo = (a.log_mag >= b.log_mag) ? b : a;
    double m = 1.0 + std::exp(lo.log_mag - hi.log_mag) * (lo.sign * hi.sign);
    if (m == 0.0) return SignedLog::zero();
    if (m < 0.0) return SignedLog::from_log(hi.log_mag + std::log(-m), -hi.sign);
    return SignedLog::from_log(hi.log_mag + std::log(m), hi.sign);
}

/// Running sum of SignedLog terms: terms are accumulated linearly relative
/// to a moving log-scale, with Kahan compensation on the scaled mantissa.
class LogAccumulator {
  public:
    void add(const SignedLog& t) {
        if (t.sign == 0) return;
        if (empty_) {
            scale_ = t.log_mag;
            empty_ = false;
            push(static_cast<double>(t.sign));
            return;
        }
        if (t.log_mag > scale_ + 40.0) rescale(t.log_mag);
        push(t.sign * std::exp(t.log_mag - scale_));
        double m = std::max(std::fabs(sum_), abs_);
        if (m > 1e100) rescale(scale_ + std::log(m));
    }

    void add_real(double x) { add(SignedLog::of(x)); }

    SignedLog total() const {
        if (empty_ || sum_ == 0.0) return SignedLog::zero();
        return SignedLog::from_log(scale_ + std::log(std::fabs(sum_)), sum_ > 0 ? 1 : -1);
    }

    /// abs-sum / |sum|: how much cancellation the accumulated series saw.
    double condition() const {
        if (empty_ || sum_ == 0.0) return std::numeric_limits<double>::infinity();
        return abs_ / std::fabs(sum_);
    }

  private:
    void push(double x) {
        abs_ += std::fabs(x);
        double y = x - carry_;
        double t = sum_ + y;
        carry_ = (t - sum_) - y;
        sum_ = t;
    }

    void rescale(double new_scale) {
        double f = std::exp(scale_ - new_scale);
        sum_ *= f;
        carry_ *= f;
        abs_ *= f;
        scale_ = new_scale;
    }

    bool empty_ = true;
    double scale_ = 0.0;
    double sum_ = 0.0;
    double carry_ = 0.0;
    double abs_ = 0.0;
};

}  // namespace qhahn
