#ifndef RSLAB_QUADSEQ_HPP
#define RSLAB_QUADSEQ_HPP

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "rslab/hecke.hpp"
#include "rslab/numeric.hpp"

namespace rslab {

/// P(x) = x^2 + a x + b with b - a^2/4 > 0.
struct QuadPoly {
    std::int64_t a = 0;
    std::int64_t b = 1;

    double D_shift() const noexcept { return static_cast<double>(b) - 0.25 * static_cast<double>(a * a); }
    std::int64_t operator()(std::int64_t x) const noexcept { return x * x + a * x + b; }
    void validate() const;
};

/*
 * Normalised coefficients lambda(n) with |lambda(n)| <= d(n), readable for
 * 1 <= n <= depth.
 */
struct CoefficientSource {
    std::string name;
    std::int64_t depth = 0;
    std::function<double(std::int64_t)> lambda;

    static CoefficientSource from_table(EigenvalueTable const & t);
    /// lambda == 1 at every n; no depth limit.
    static CoefficientSource unit();
};

struct QuadSeriesPoint {
    QuadPoly poly;
    cplx s;
    cplx value;
    std::int64_t truncation = 0;  // every gamma with P(gamma) <= truncation is included
    std::int64_t terms = 0;
    double tail_bound = 0;
};

/*
 * sum over gamma of lambda(P(gamma)) P(gamma)^-s, for Re s > 3/4, over the
 * gamma with P(gamma) <= n_max (0 means the full source depth). Terms are
 * taken in pairs {gamma, -a - gamma} by increasing |gamma + a/2|.
 */
QuadSeriesPoint series_eval(CoefficientSource const & src, QuadPoly const & poly, cplx s, std::int64_t n_max = 0);

/// Same scan with d(P(gamma)) in place of lambda, at real sigma.
double divisor_majorant(QuadPoly const & poly, double sigma, std::int64_t n_max);

/// Certified bound for the gamma with P(gamma) > n_max, from d(n) <= C_eps n^eps.
double series_tail_bound(QuadPoly const & poly, double sigma, std::int64_t n_max);

struct ExponentFit {
    double slope = 0;
    double intercept = 0;
    double reference_slope = 0;  // 1/2 - s - (1 - 2 theta)/16
    double epstein_slope = 0;    // 1/2 - s
    std::vector<std::int64_t> b_used;
    std::vector<double> log_abs_values;
    std::vector<double> residuals;
};

/// Least-squares slope of log|D(s; 0, b)| against log b. Needs five usable b.
ExponentFit exponent_fit(CoefficientSource const & src, double s, std::vector<std::int64_t> const & b_list,
                         std::int64_t n_max = 0);

/// n -> #{alpha in Z : (beta + 2 alpha)^2 = n} for 0 <= n <= n_max.
std::vector<int> theta_shift_coeffs(std::int64_t beta, std::int64_t n_max);

struct UnfoldingResult {
    double lhs = 0;  // sum of the integrated exponential weights
    double rhs = 0;  // Gamma(s+1/4) (16 pi)^-(s+1/4) D(s - 1/4)
    double residual = 0;
};

/// Relative residual of the unfolded integral against the series, y rescaled by `scale`.
UnfoldingResult unfolding_check(CoefficientSource const & src, QuadPoly const & poly, double s,
                                std::int64_t n_max = 0, double scale = 1.0);

} // namespace rslab

#endif
