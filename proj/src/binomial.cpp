#include "binomial.hpp"

#include <cmath>

#include "error.hpp"

namespace ssmix {

BinomialSpec BinomialSpec::near_degree(double d, uint64_t n) {
    if (n == 0) fail(ErrorCode::invalid_argument, "binomial: n must be positive");
    if (!(d >= 0) || d > static_cast<double>(n))
        fail(ErrorCode::invalid_argument, "binomial: need 0 <= d <= n");
    return {n, d / static_cast<double>(n)};
}

double f_q(uint32_t q, uint64_t x) {
    if (q < 2) fail(ErrorCode::invalid_argument, "f_q: q must be >= 2");
    if (x + 2 <= q) return 1.0 / static_cast<double>(q - x - 1);
    return 1.0;
}

double binomial_expectation(const BinomialSpec& spec, const std::function<double(uint64_t)>& fn) {
    if (!(spec.p >= 0.0 && spec.p <= 1.0))
        fail(ErrorCode::invalid_argument, "binomial: p must be in [0,1]");
    if (spec.p == 0.0) return fn(0);
    if (spec.p == 1.0) return fn(spec.trials);
    const double n = static_cast<double>(spec.trials);
    const double logp = std::log(spec.p);
    const double log1mp = std::log1p(-spec.p);
    // Neumaier-compensated sum of fn(k) * pmf(k)
    double sum = 0, comp = 0;
    for (uint64_t k = 0; k <= spec.trials; ++k) {
        const double kk = static_cast<double>(k);
        const double logpmf = std::lgamma(n + 1) - std::lgamma(kk + 1) - std::lgamma(n - kk + 1) +
                              kk * logp + (n - kk) * log1mp;
        const double term = fn(k) * std::exp(logpmf);
        const double t = sum + term;
        if (std::abs(sum) >= std::abs(term))
            comp += (sum - t) + term;
        else
            comp += (term - t) + sum;
        sum = t;
    }
    return sum + comp;
}

double expected_f(const BinomialSpec& spec, uint32_t q) {
    if (q < 2) fail(ErrorCode::invalid_argument, "expected_f: q must be >= 2");
    return binomial_expectation(spec, [q](uint64_t k) { return f_q(q, k); });
}

Rational expected_f_exact(uint64_t trials, const Rational& p, uint32_t q) {
    if (q < 2) fail(ErrorCode::invalid_argument, "expected_f_exact: q must be >= 2");
    if (p < 0 || p > 1) fail(ErrorCode::invalid_argument, "expected_f_exact: p must be in [0,1]");
    if (trials > 2000) fail(ErrorCode::budget_exceeded, "expected_f_exact: trials too large");
    auto f_at = [q](uint64_t k) {
        return k + 2 <= q ? Rational(1, static_cast<int64_t>(q - k - 1)) : Rational(1);
    };
    if (p == 0) return f_at(0);
    if (p == 1) return f_at(trials);
    const Rational one_minus = Rational(1) - p;
    Rational sum = 0;
    Rational pmf = 1;
    for (uint64_t j = 0; j < trials; ++j) pmf *= one_minus;  // pmf(0)
    for (uint64_t k = 0; k <= trials; ++k) {
        sum += f_at(k) * pmf;
        if (k == trials) break;
        pmf = pmf * Rational(static_cast<int64_t>(trials - k), static_cast<int64_t>(k + 1)) * p /
              one_minus;
    }
    return sum;
}

double g(double d, double x) {
    const double den = 2 * d + 3 - x;
    if (den == 0) fail(ErrorCode::invalid_argument, "g: pole at x = 2d+3");
    return 1.0 - 1.0 / den;
}

double g_tilde(double d, double x) {
    const double c = d + 3;
    const double u = x - d;
    double value = (d + 2) / c;
    double upow = u;
    double cpow = c * c;
    for (int j = 1; j <= 5; ++j) {
        value -= upow / cpow;
        upow *= u;
        cpow *= c;
    }
    // the degree-6 term reuses the (d+3)^6 denominator of the degree-5 one
    value -= upow / (cpow / c);
    return value;
}

double g_residual(double d, double x) {
    const double den = 2 * d + 3 - x;
    if (den == 0) fail(ErrorCode::invalid_argument, "g_residual: pole at x = 2d+3");
    const double c = d + 3;
    const double u = x - d;
    const double u6 = u * u * u * u * u * u;
    const double c6 = c * c * c * c * c * c;
    return u6 * (2 * d + 2 - x) / (c6 * den);
}

Rational g_rational(const Rational& d, const Rational& x) {
    const Rational den = 2 * d + 3 - x;
    if (den == 0) fail(ErrorCode::invalid_argument, "g: pole at x = 2d+3");
    return Rational(1) - Rational(1) / den;
}

Rational g_tilde_rational(const Rational& d, const Rational& x) {
    const Rational c = d + 3;
    const Rational u = x - d;
    Rational value = (d + 2) / c;
    Rational upow = u;
    Rational cpow = c * c;
    for (int j = 1; j <= 5; ++j) {
        value -= upow / cpow;
        upow *= u;
        cpow *= c;
    }
    value -= upow / (cpow / c);
    return value;
}

Rational g_residual_rational(const Rational& d, const Rational& x) {
    const Rational den = 2 * d + 3 - x;
    if (den == 0) fail(ErrorCode::invalid_argument, "g_residual: pole at x = 2d+3");
    const Rational c = d + 3;
    const Rational u = x - d;
    Rational u6 = u * u;
    u6 = u6 * u6 * u6;
    Rational c6 = c * c;
    c6 = c6 * c6 * c6;
    return u6 * (2 * d + 2 - x) / (c6 * den);
}

double expected_g_tilde_closed(double d, double n) {
    if (!(n > 0)) fail(ErrorCode::invalid_argument, "expected_g_tilde_closed: n must be positive");
    const double c = d + 3;
    const double c6 = c * c * c * c * c * c;
    const double d2 = d * d, d3 = d2 * d, d4 = d3 * d, d5 = d4 * d, d6 = d5 * d;
    const double inv_n = 1.0 / n;
    double poly = d6 + 17 * d5 + 119 * d4 + 422 * d3 + 867 * d2 + 1012 * d + 486;
    poly += inv_n * (d5 + 63 * d4 + 290 * d3 + 121 * d2);
    poly -= inv_n * inv_n * (50 * d5 + 498 * d4 + 284 * d3);
    poly += inv_n * inv_n * inv_n * (15 * d6 + 416 * d5 + 468 * d4);
    poly -= inv_n * inv_n * inv_n * inv_n * (130 * d6 + 384 * d5);
    poly += inv_n * inv_n * inv_n * inv_n * inv_n * 120 * d6;
    return poly / c6;
}

double expected_g_tilde_direct(double d, uint64_t n) {
    const BinomialSpec spec = BinomialSpec::near_degree(d, n);
    return binomial_expectation(spec,
                                [d](uint64_t k) { return g_tilde(d, static_cast<double>(k)); });
}

Power4Report expected_power4(uint64_t k, double d, double n) {
    if (k < 2) fail(ErrorCode::invalid_argument, "expected_power4: walk length must be >= 2");
    if (!(n > 0) || !(d >= 0) || d > n)
        fail(ErrorCode::invalid_argument, "expected_power4: need 0 <= d <= n");
    const uint64_t trials = k * (k - 1) / 2 + 1 - k;  // C(k,2) - k + 1, >= 0 for k >= 2
    const double p = d / n;
    Power4Report report;
    // E[4^Y] through the PGF of a binomial evaluated at 4: (1 + 3p)^trials
    report.exact = std::pow(1.0 + 3.0 * p, static_cast<double>(trials));
    report.bound_pow = std::pow(1.0 + 3.0 * p, static_cast<double>(k) * static_cast<double>(k));
    report.bound_exp = std::exp(3.0 * d * static_cast<double>(k) * static_cast<double>(k) / n);
    return report;
}

}  // namespace ssmix
