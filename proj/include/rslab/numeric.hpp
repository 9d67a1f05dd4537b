#ifndef RSLAB_NUMERIC_HPP
#define RSLAB_NUMERIC_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <exception>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace rslab {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;
inline constexpr double kLog2Pi = 1.83787706640934548356065947281123527;
/// log of the Glaisher-Kinkelin constant.
inline constexpr double kLogGlaisher = 0.24875447703378426187;
/// Best known exponent toward Ramanujan-Petersson for GL2.
inline constexpr double kRamanujanTheta = 7.0 / 64.0;

/// Base class for every precondition or domain failure raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A numerical routine could not reach the requested accuracy.
class ToleranceError : public Error {
  public:
    ToleranceError(std::string const & what, double achievable)
        : Error(what), achievable_(achievable) {}
    double achievable() const noexcept { return achievable_; }

  private:
    double achievable_;
};

/// Keeps the first exception raised inside a parallel loop for rethrow after it.
class ParallelExceptions {
  public:
    template <typename F>
    void run(F && f) noexcept
    {
        try {
            f();
        } catch (...) {
#pragma omp critical(rslab_parallel_exceptions)
            if (!first_)
                first_ = std::current_exception();
        }
    }
    void rethrow() const
    {
        if (first_)
            std::rethrow_exception(first_);
    }

  private:
    std::exception_ptr first_;
};

/*
 * Neumaier's variant of Kahan summation. Accumulation order is whatever
 * the caller feeds in, so determinism is the caller's responsibility.
 */
template <typename T>
class CompensatedSum {
  public:
    void add(T x) noexcept
    {
        T const t = sum_ + x;
        if constexpr (std::is_same_v<T, double>) {
            if (std::abs(sum_) >= std::abs(x))
                comp_ += (sum_ - t) + x;
            else
                comp_ += (x - t) + sum_;
        } else {
            comp_ += (sum_ - t) + x;
        }
        sum_ = t;
    }
    T value() const noexcept { return sum_ + comp_; }

  private:
    T sum_{};
    T comp_{};
};

cplx log_gamma(cplx z);
double log_gamma(double x);
/// psi(x) for x > 0.
double digamma(double x);

/// Smallest prime factor for every 0 <= n <= limit (spf[0] = spf[1] = 0).
std::vector<std::uint32_t> smallest_prime_factors(std::uint32_t limit);
std::vector<std::uint32_t> primes_up_to(std::uint32_t limit);

bool is_prime(std::int64_t n);
std::int64_t gcd(std::int64_t a, std::int64_t b);
std::int64_t mod(std::int64_t a, std::int64_t m);

/// Factorisation by trial division; pairs (p, e) in increasing p.
std::vector<std::pair<std::int64_t, int>> factor(std::int64_t n);

std::int64_t divisor_count(std::int64_t n);

/// sup_n d(n)/n^eps, computed exactly from the prime-by-prime maxima.
double divisor_bound_constant(double eps);

/*
 * Sum of f(i) for 0 <= i < n, evaluated in fixed blocks of `block` terms.
 * Each block is summed with compensation, possibly in parallel, and the
 * block totals are combined serially in index order. The result is
 * therefore independent of the thread count.
 */
template <typename T, typename F>
T blocked_sum(std::int64_t n, F && f, std::int64_t block = 4096)
{
    if (n <= 0)
        return T{};
    std::int64_t const nblocks = (n + block - 1) / block;
    std::vector<T> partial(static_cast<std::size_t>(nblocks));
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t k = 0; k < nblocks; ++k) {
        CompensatedSum<T> acc;
        std::int64_t const hi = std::min(n, (k + 1) * block);
        for (std::int64_t i = k * block; i < hi; ++i)
            acc.add(f(i));
        partial[static_cast<std::size_t>(k)] = acc.value();
    }
    CompensatedSum<T> total;
    for (T const & p : partial)
        total.add(p);
    return total.value();
}

/// Spearman rank correlation (average ranks for ties).
double spearman(std::span<double const> x, std::span<double const> y);

struct LinearFit {
    double slope = 0;
    double intercept = 0;
    std::vector<double> residuals;
};

LinearFit least_squares(std::span<double const> x, std::span<double const> y);

/// printf-style "%.15g", the precision every report uses.
std::string format_double(double x);

} // namespace rslab

#endif
