#ifndef OTALG_STATS_HPP
#define OTALG_STATS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "otalg/errors.hpp"

namespace otalg {

namespace detail {

// Continued-fraction core of the regularized incomplete beta function
// (modified Lentz). Converges quickly for x < (a+1)/(a+b+2).
inline double beta_cf(double a, double b, double x) {
    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-15;
    constexpr int max_iter = 500;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps)
            return h;
    }
    return h; // converged to working precision in practice long before this
}

} // namespace detail

/// Regularized incomplete beta function I_x(a, b).
inline double incomplete_beta(double a, double b, double x) {
    if (x < 0.0 || x > 1.0)
        throw DomainError("incomplete_beta: x must lie in [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0))
        return front * detail::beta_cf(a, b, x) / a;
    return 1.0 - front * detail::beta_cf(b, a, 1.0 - x) / b;
}

/// Two-sided tail probability P(|T| > t) of Student's t with df degrees of freedom.
inline double student_t_two_sided_p(double t, double df) {
    if (!(df > 0.0))
        throw DomainError("student_t_two_sided_p: df must be positive");
    return incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

/// CDF of Student's t distribution.
inline double student_t_cdf(double t, double df) {
    const double p = student_t_two_sided_p(t, df);
    return t >= 0.0 ? 1.0 - 0.5 * p : 0.5 * p;
}

/// Two-sided critical value: the t with P(|T| > t) = alpha, found by
/// bisection on the monotone tail probability (no table lookup).
inline double student_t_critical(double df, double alpha) {
    if (!(df > 0.0))
        throw DomainError("student_t_critical: df must be positive");
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw DomainError("student_t_critical: alpha must lie in (0, 1)");
    double lo = 0.0;
    double hi = 1.0;
    while (student_t_two_sided_p(hi, df) > alpha)
        hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi)
            break;
        if (student_t_two_sided_p(mid, df) > alpha)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

/// Result of a paired two-sided t-test on d_i = a_i - b_i.
struct TTestResult {
    double d_bar = 0.0;   // mean paired difference
    double se_d = 0.0;    // standard error of the mean difference
    double t = 0.0;       // test statistic
    double df = 0.0;      // degrees of freedom, N - 1
    double t_crit = 0.0;  // two-sided critical value at alpha
    double alpha = 0.05;
    std::size_t n = 0;
    bool reject = false;
};

inline TTestResult paired_t_test(const std::vector<double>& a, const std::vector<double>& b,
                                 double alpha = 0.05) {
    if (a.size() != b.size())
        throw ValidationError("paired_t_test: samples must have equal length");
    const std::size_t n = a.size();
    if (n < 2)
        throw ValidationError("paired_t_test: need at least two pairs");

    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        sum += a[i] - b[i];
    const double d_bar = sum / static_cast<double>(n);

    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = (a[i] - b[i]) - d_bar;
        ss += e * e;
    }
    const double var = ss / static_cast<double>(n - 1);

    TTestResult res;
    res.n = n;
    res.alpha = alpha;
    res.d_bar = d_bar;
    res.df = static_cast<double>(n - 1);
    res.t_crit = student_t_critical(res.df, alpha);
    if (!(var > 0.0)) {
        // Identical samples carry no evidence either way; a constant nonzero
        // difference would make the statistic infinite.
        if (d_bar != 0.0)
            throw DegenerateTestError("paired_t_test: zero variance of differences");
        res.se_d = 0.0;
        res.t = 0.0;
        res.reject = false;
        return res;
    }
    res.se_d = std::sqrt(var / static_cast<double>(n));
    res.t = d_bar / res.se_d;
    res.reject = std::fabs(res.t) > res.t_crit;
    return res;
}

/// Type-7 quantile (linear interpolation between order statistics), the
/// convention pinned for all reported summaries.
inline double quantile(std::vector<double> values, double p) {
    if (values.empty())
        throw ValidationError("quantile: empty sample");
    p = std::clamp(p, 0.0, 1.0);
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * p;
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= values.size())
        return values.back();
    return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
}

/// min / Q1 / median / Q3 / max.
struct FiveNum {
    double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
};

inline FiveNum five_number_summary(const std::vector<double>& values) {
    FiveNum f;
    f.min = quantile(values, 0.0);
    f.q1 = quantile(values, 0.25);
    f.median = quantile(values, 0.5);
    f.q3 = quantile(values, 0.75);
    f.max = quantile(values, 1.0);
    return f;
}

} // namespace otalg

#endif
