#include "rslab/numeric.hpp"

#include <cstdio>
#include <numeric>

namespace rslab {

namespace {

// B_{2k} / (2k (2k-1)) for k = 1..10
constexpr double kStirling[] = {
    1.0 / 12.0,           -1.0 / 360.0,          1.0 / 1260.0,
    -1.0 / 1680.0,        1.0 / 1188.0,          -691.0 / 360360.0,
    1.0 / 156.0,          -3617.0 / 122400.0,    43867.0 / 244188.0,
    -174611.0 / 125400.0,
};

cplx stirling(cplx z)
{
    cplx const zinv = 1.0 / z;
    cplx const zinv2 = zinv * zinv;
    cplx series = 0.0;
    cplx pw = zinv;
    for (double c : kStirling) {
        series += c * pw;
        pw *= zinv2;
    }
    return (z - 0.5) * std::log(z) - z + 0.5 * kLog2Pi + series;
}

} // namespace

cplx log_gamma(cplx z)
{
    if (z.real() < 0.5) {
        // reflection; only reached for modest imaginary parts in practice
        return std::log(kPi) - std::log(std::sin(kPi * z)) - log_gamma(1.0 - z);
    }
    constexpr double kShift = 16.0;
    if (std::abs(z) >= kShift)
        return stirling(z);
    cplx prod = 1.0;
    cplx w = z;
    while (std::abs(w) < kShift) {
        prod *= w;
        w += 1.0;
    }
    return stirling(w) - std::log(prod);
}

double log_gamma(double x)
{
    return std::lgamma(x);
}

double digamma(double x)
{
    if (!(x > 0))
        throw Error("digamma: x must be positive");
    double acc = 0;
    while (x < 12.0) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    double const x2 = 1.0 / (x * x);
    return acc + std::log(x) - 0.5 / x -
           x2 * (1.0 / 12 - x2 * (1.0 / 120 - x2 * (1.0 / 252 - x2 * (1.0 / 240 - x2 / 132))));
}

std::vector<std::uint32_t> smallest_prime_factors(std::uint32_t limit)
{
    std::vector<std::uint32_t> spf(static_cast<std::size_t>(limit) + 1, 0);
    std::vector<std::uint32_t> primes;
    for (std::uint32_t i = 2; i <= limit; ++i) {
        if (spf[i] == 0) {
            spf[i] = i;
            primes.push_back(i);
        }
        for (std::uint32_t p : primes) {
            std::uint64_t const m = std::uint64_t{p} * i;
            if (p > spf[i] || m > limit)
                break;
            spf[static_cast<std::size_t>(m)] = p;
        }
    }
    return spf;
}

std::vector<std::uint32_t> primes_up_to(std::uint32_t limit)
{
    std::vector<std::uint32_t> out;
    if (limit < 2)
        return out;
    std::vector<bool> composite(static_cast<std::size_t>(limit) + 1, false);
    for (std::uint64_t i = 2; i <= limit; ++i) {
        if (composite[i])
            continue;
        out.push_back(static_cast<std::uint32_t>(i));
        for (std::uint64_t j = i * i; j <= limit; j += i)
            composite[j] = true;
    }
    return out;
}

bool is_prime(std::int64_t n)
{
    if (n < 2)
        return false;
    for (std::int64_t d = 2; d * d <= n; ++d)
        if (n % d == 0)
            return false;
    return true;
}

std::int64_t gcd(std::int64_t a, std::int64_t b)
{
    return std::gcd(a, b);
}

std::int64_t mod(std::int64_t a, std::int64_t m)
{
    std::int64_t r = a % m;
    return r < 0 ? r + m : r;
}

std::vector<std::pair<std::int64_t, int>> factor(std::int64_t n)
{
    std::vector<std::pair<std::int64_t, int>> out;
    if (n < 0)
        n = -n;
    for (std::int64_t p = 2; p * p <= n; ++p) {
        if (n % p != 0)
            continue;
        int e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        out.emplace_back(p, e);
    }
    if (n > 1)
        out.emplace_back(n, 1);
    return out;
}

std::int64_t divisor_count(std::int64_t n)
{
    std::int64_t d = 1;
    for (auto [p, e] : factor(n))
        d *= e + 1;
    return d;
}

double divisor_bound_constant(double eps)
{
    if (eps <= 0)
        throw Error("divisor_bound_constant: eps must be positive");
    // (k+1)/p^(k eps) < 1 for all k >= 1 once p^eps >= 2
    double const pmax = std::pow(2.0, 1.0 / eps);
    double c = 1.0;
    for (std::uint32_t p : primes_up_to(static_cast<std::uint32_t>(pmax) + 1)) {
        double best = 1.0;
        double const lp = std::log(static_cast<double>(p));
        for (int k = 1; k < 400; ++k) {
            double const v = (k + 1) * std::exp(-k * eps * lp);
            best = std::max(best, v);
            if (k * eps * lp > std::log(k + 1.0) + 5)
                break;
        }
        c *= best;
    }
    return c;
}

namespace {

std::vector<double> ranks(std::span<double const> v)
{
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    std::size_t i = 0;
    while (i < idx.size()) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]])
            ++j;
        double const avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k)
            r[idx[k]] = avg;
        i = j + 1;
    }
    return r;
}

} // namespace

double spearman(std::span<double const> x, std::span<double const> y)
{
    if (x.size() != y.size() || x.size() < 2)
        throw Error("spearman: need two equal-length samples of size >= 2");
    auto const rx = ranks(x);
    auto const ry = ranks(y);
    double const n = static_cast<double>(x.size());
    double const mean = (n + 1) / 2;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mean) * (ry[i] - mean);
        sxx += (rx[i] - mean) * (rx[i] - mean);
        syy += (ry[i] - mean) * (ry[i] - mean);
    }
    return sxy / std::sqrt(sxx * syy);
}

LinearFit least_squares(std::span<double const> x, std::span<double const> y)
{
    if (x.size() != y.size() || x.size() < 2)
        throw Error("least_squares: need two equal-length samples of size >= 2");
    double const n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    for (std::size_t i = 0; i < x.size(); ++i)
        fit.residuals.push_back(y[i] - (fit.intercept + fit.slope * x[i]));
    return fit;
}

std::string format_double(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15g", x);
    return buf;
}

} // namespace rslab
