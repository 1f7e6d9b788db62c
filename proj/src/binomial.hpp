// Binomial expectation toolkit: the truncated-reciprocal kernel f_q, the
// decay surrogate g and its degree-6 Taylor proxy g~ (with the exact residual
// identity), their expectations under B(n, d/n), and the exact 4^Y moment for
// the excess-edge count of a walk.
#pragma once

#include <cstdint>
#include <functional>

#include "numbers.hpp"

namespace ssmix {

struct BinomialSpec {
    uint64_t trials = 0;
    double p = 0;  // success probability

    static BinomialSpec near_degree(double d, uint64_t n);  // B(n, d/n)
};

// f_q(x) = 1/(q - x - 1) for x <= q-2, else 1. Needs q >= 2.
double f_q(uint32_t q, uint64_t x);

// E[f_q(X)], X ~ B(trials, p). Log-space pmf with compensated summation.
double expected_f(const BinomialSpec& spec, uint32_t q);
// Exact-rational variant for small trial counts (cross-check oracle).
Rational expected_f_exact(uint64_t trials, const Rational& p, uint32_t q);

// g(x) = 1 - 1/(2d+3-x); pole at x = 2d+3 is rejected.
double g(double d, double x);
// Degree-6 expansion of g around x = d with 1/(d+3) powers; the last two
// terms share the (d+3)^6 denominator.
double g_tilde(double d, double x);
// Exact residual g(x) - g_tilde(x) = (x-d)^6 (2d+2-x) / ((d+3)^6 (2d+3-x)).
double g_residual(double d, double x);

// Rational versions for identity tests (no cancellation loss).
Rational g_rational(const Rational& d, const Rational& x);
Rational g_tilde_rational(const Rational& d, const Rational& x);
Rational g_residual_rational(const Rational& d, const Rational& x);

// Closed-form E[g~(X)], X ~ B(n, d/n): polynomial in d and 1/n over (d+3)^6.
double expected_g_tilde_closed(double d, double n);
// Direct-summation cross-check of the same expectation.
double expected_g_tilde_direct(double d, uint64_t n);

// Generic E[fn(X)] under a binomial; exposed for tests and margin reports.
double binomial_expectation(const BinomialSpec& spec, const std::function<double(uint64_t)>& fn);

// E[4^Y] for Y ~ B(C(k,2) - k + 1, d/n): exact probability-generating value
// together with the standard over-approximations used for comparison.
struct Power4Report {
    double exact = 1;      // (1 + 3p)^trials
    double bound_pow = 1;  // (1 + 3d/n)^{k^2}
    double bound_exp = 1;  // exp(3 d k^2 / n)
};
Power4Report expected_power4(uint64_t k, double d, double n);

}  // namespace ssmix
