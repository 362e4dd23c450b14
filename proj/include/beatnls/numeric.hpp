#pragma once

/// @file numeric.hpp
/// @brief Error types and small numerical kernels shared by all modules.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace beatnls {

/// Thrown when inputs violate a documented precondition.
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Thrown when a well-posed computation cannot deliver its result
/// (no bracket, non-convergence, non-finite state).
struct ComputationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Short form for messages, e.g. 1.75.
inline std::string format_g(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

/// Seventeen significant digits, enough to round-trip any double.
inline std::string format_17(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// Bisection on a sign-changing bracket.
///
/// Stops when the bracket is narrower than `tol` or cannot be split further
/// in floating point. Throws ComputationError when f(lo) and f(hi) share a sign.
template <class F>
double bisect(F&& f, double lo, double hi, double tol, int max_iter = 400) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0) == (fhi > 0)) {
        throw ComputationError("bisect: no sign change on [" + std::to_string(lo) + ", " +
                               std::to_string(hi) + "]");
    }
    for (int it = 0; it < max_iter && hi - lo > tol; ++it) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) break;  // ulp-limited
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return lo + 0.5 * (hi - lo);
}

/// log(1 - exp(x)) for x < 0 without cancellation.
inline double log1mexp(double x) {
    if (x >= 0.0) return -std::numeric_limits<double>::infinity();
    return x > -0.6931471805599453 ? std::log(-std::expm1(x)) : std::log1p(-std::exp(x));
}

/// log(exp(a) + exp(b)).
inline double log_add(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double m = a > b ? a : b;
    return m + std::log1p(std::exp(-std::abs(a - b)));
}

/// Running log-sum-exp with rescaling on a new maximum.
class LogSumExp {
public:
    void add(double l) {
        if (l == -std::numeric_limits<double>::infinity()) return;
        if (l > max_) {
            sum_ = sum_ * std::exp(max_ - l) + 1.0;
            max_ = l;
        } else {
            sum_ += std::exp(l - max_);
        }
    }
    void merge(const LogSumExp& o) {
        if (o.sum_ == 0.0) return;
        if (o.max_ > max_) {
            sum_ = sum_ * std::exp(max_ - o.max_) + o.sum_;
            max_ = o.max_;
        } else {
            sum_ += o.sum_ * std::exp(o.max_ - max_);
        }
    }
    [[nodiscard]] double value() const {
        return sum_ == 0.0 ? -std::numeric_limits<double>::infinity() : max_ + std::log(sum_);
    }
    [[nodiscard]] bool empty() const { return sum_ == 0.0; }

private:
    double max_ = -std::numeric_limits<double>::infinity();
    double sum_ = 0.0;
};

/// Pairwise summation; the result depends only on the input order.
inline double pairwise_sum(const double* x, std::size_t n) {
    if (n <= 16) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += x[i];
        return s;
    }
    const std::size_t m = n / 2;
    return pairwise_sum(x, m) + pairwise_sum(x + m, n - m);
}

inline double pairwise_sum(const std::vector<double>& x) { return pairwise_sum(x.data(), x.size()); }

}  // namespace beatnls
