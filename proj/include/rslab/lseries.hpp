#ifndef RSLAB_LSERIES_HPP
#define RSLAB_LSERIES_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "rslab/classfield.hpp"
#include "rslab/hecke.hpp"
#include "rslab/numeric.hpp"

namespace rslab {

/// Smallest real part accepted by the series evaluators.
inline constexpr double kMinSeriesAbscissa = 0.7;

/// phi(y) = exp(-y)(1 + y + y^2/2 + y^3/6); its Mellin transform is Gamma(u+4)/(6u).
double smoothing_weight(double y) noexcept;

/// Smoothed length multiplier: terms beyond y = n/X > kSmoothingCut are below 1e-17.
inline constexpr double kSmoothingCut = 40.0;

/*
 * L(s, chi_D) with the Euler factors at `removed` primes divided out.
 * Smoothed partial sums for moderate Re s, the plain series once it converges
 * to double precision within 1e5 terms. X = 0 picks X from |D| and |Im s|.
 */
cplx l_chi(cplx s, FundamentalDiscriminant const & D, std::span<std::int64_t const> removed = {}, double X = 0);

/// L(s, chi_D) and dL/ds together; same smoothing as l_chi.
std::pair<cplx, cplx> l_chi_with_derivative(cplx s, FundamentalDiscriminant const & D,
                                            std::span<std::int64_t const> removed = {}, double X = 0);

struct DerivativeEstimate {
    double value = 0;
    double error_estimate = 0;  // change between X and 2X
};

/// L'(1, chi_D).
DerivativeEstimate l_chi_derivative(FundamentalDiscriminant const & D, double X = 0);

/// sum tau(n)/n exp(-n/X), summed directly.
double S_X_alpha(double X, FundamentalDiscriminant const & D);
/// Same with a caller-owned smallest-prime-factor table; it must reach 40 X.
double S_X_alpha(double X, FundamentalDiscriminant const & D, std::vector<std::uint32_t> const & spf);

/// Contour side of S(X): L(1) log X + L'(1) + h/(w X).
double S_X_alpha_contour(double X, FundamentalDiscriminant const & D, int h, int w);

/// Riemann zeta by Euler-Maclaurin; any s != 1 with Re s > -10.
cplx zeta(cplx s);
double zeta_value(double s);

/*
 * L(s, sym^2 f): smoothed primitive series times the exact factors
 * (1 - p^-2s)^-1 at bad primes, which yields the imprimitive value.
 */
class Sym2Evaluator {
  public:
    Sym2Evaluator(EigenvalueTable const & table, double X = 2.0e4);

    /// Required table depth for smoothing length X.
    static std::int64_t depth_for(double X);

    cplx imprimitive(cplx s) const;
    cplx primitive(cplx s) const;
    /// Imprimitive value and its s-derivative.
    std::pair<cplx, cplx> imprimitive_with_derivative(cplx s) const;
    double X() const noexcept { return X_; }

  private:
    double X_;
    std::vector<double> b_;
    std::vector<std::int64_t> bad_;
};

cplx sym2_value(cplx s, EigenvalueTable const & table, double X = 2.0e4);

/// Plain partial sum of c(n) n^-s for 1 <= n <= N (an oracle path).
cplx plain_dirichlet(std::span<double const> c, cplx s, std::int64_t N);

} // namespace rslab

#endif
