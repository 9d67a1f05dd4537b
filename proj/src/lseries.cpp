#include "rslab/lseries.hpp"

namespace rslab {

namespace {

void check_abscissa(cplx s, char const * who)
{
    if (s.real() < kMinSeriesAbscissa)
        throw Error(std::string(who) + ": Re s = " + format_double(s.real()) + " below " +
                    format_double(kMinSeriesAbscissa));
}

std::int64_t smoothed_length(double X)
{
    return static_cast<std::int64_t>(std::ceil(kSmoothingCut * X)) + 1;
}

// sum_{1 <= n <= N} c(n) n^-s phi(n/X) and its s-derivative
template <typename Coef>
std::pair<cplx, cplx> smoothed_sum(Coef && c, cplx s, double X, std::int64_t N, bool want_derivative)
{
    if (s.imag() == 0.0) {
        double const sr = s.real();
        double const v = blocked_sum<double>(N, [&](std::int64_t i) {
            std::int64_t const n = i + 1;
            double const cn = c(n);
            if (cn == 0.0)
                return 0.0;
            return cn * std::exp(-sr * std::log(static_cast<double>(n))) * smoothing_weight(static_cast<double>(n) / X);
        });
        double d = 0;
        if (want_derivative) {
            d = blocked_sum<double>(N, [&](std::int64_t i) {
                std::int64_t const n = i + 1;
                double const cn = c(n);
                if (cn == 0.0)
                    return 0.0;
                double const ln = std::log(static_cast<double>(n));
                return -ln * cn * std::exp(-sr * ln) * smoothing_weight(static_cast<double>(n) / X);
            });
        }
        return {cplx{v, 0}, cplx{d, 0}};
    }
    cplx const v = blocked_sum<cplx>(N, [&](std::int64_t i) {
        std::int64_t const n = i + 1;
        double const cn = c(n);
        if (cn == 0.0)
            return cplx{0, 0};
        return cn * std::exp(-s * std::log(static_cast<double>(n))) * smoothing_weight(static_cast<double>(n) / X);
    });
    cplx d{0, 0};
    if (want_derivative) {
        d = blocked_sum<cplx>(N, [&](std::int64_t i) {
            std::int64_t const n = i + 1;
            double const cn = c(n);
            if (cn == 0.0)
                return cplx{0, 0};
            double const ln = std::log(static_cast<double>(n));
            return -ln * cn * std::exp(-s * ln) * smoothing_weight(static_cast<double>(n) / X);
        });
    }
    return {v, d};
}

// plain series length reaching double precision, or 0 if more than 1e5 terms
std::int64_t plain_length(double sigma)
{
    if (sigma < 4.0)
        return 0;
    double const n = std::pow(1e-17 * (sigma - 1.0), -1.0 / (sigma - 1.0));
    return n > 1e5 ? 0 : static_cast<std::int64_t>(std::ceil(n)) + 1;
}

} // namespace

double smoothing_weight(double y) noexcept
{
    if (y > 745.0)
        return 0.0;
    return std::exp(-y) * (1.0 + y * (1.0 + y * (0.5 + y / 6.0)));
}

std::pair<cplx, cplx> l_chi_with_derivative(cplx s, FundamentalDiscriminant const & D,
                                            std::span<std::int64_t const> removed, double X)
{
    check_abscissa(s, "l_chi");
    auto const chi = character_table(D.D);
    std::int64_t const m = D.abs();
    auto coef = [&](std::int64_t n) { return static_cast<double>(chi[static_cast<std::size_t>(n % m)]); };
    std::pair<cplx, cplx> ld;
    if (std::int64_t const N = plain_length(s.real()); N > 0 && X <= 0) {
        CompensatedSum<cplx> v, d;
        for (std::int64_t n = 1; n <= N; ++n) {
            double const cn = coef(n);
            if (cn == 0.0)
                continue;
            double const ln = std::log(static_cast<double>(n));
            cplx const t = cn * std::exp(-s * ln);
            v.add(t);
            d.add(-ln * t);
        }
        ld = {v.value(), d.value()};
    } else {
        if (X <= 0)
            X = std::max(200.0, 6.0 * static_cast<double>(m) * (1.0 + std::abs(s.imag())));
        ld = smoothed_sum(coef, s, X, smoothed_length(X), true);
    }
    for (std::int64_t p : removed) {
        double const c = static_cast<double>(kronecker_symbol(D.D, p));
        if (c == 0.0)
            continue;
        double const lp = std::log(static_cast<double>(p));
        cplx const ps = std::exp(-s * lp);
        cplx const e = 1.0 - c * ps;
        // (L e)' = L' e + L e', e' = c log p p^-s
        ld = {ld.first * e, ld.second * e + ld.first * c * lp * ps};
    }
    return ld;
}

cplx l_chi(cplx s, FundamentalDiscriminant const & D, std::span<std::int64_t const> removed, double X)
{
    check_abscissa(s, "l_chi");
    auto const chi = character_table(D.D);
    std::int64_t const m = D.abs();
    auto coef = [&](std::int64_t n) { return static_cast<double>(chi[static_cast<std::size_t>(n % m)]); };
    cplx v;
    if (std::int64_t const N = plain_length(s.real()); N > 0 && X <= 0) {
        CompensatedSum<cplx> acc;
        for (std::int64_t n = 1; n <= N; ++n) {
            double const cn = coef(n);
            if (cn != 0.0)
                acc.add(cn * std::exp(-s * std::log(static_cast<double>(n))));
        }
        v = acc.value();
    } else {
        if (X <= 0)
            X = std::max(200.0, 6.0 * static_cast<double>(m) * (1.0 + std::abs(s.imag())));
        v = smoothed_sum(coef, s, X, smoothed_length(X), false).first;
    }
    for (std::int64_t p : removed)
        v *= 1.0 - static_cast<double>(kronecker_symbol(D.D, p)) * std::exp(-s * std::log(static_cast<double>(p)));
    return v;
}

DerivativeEstimate l_chi_derivative(FundamentalDiscriminant const & D, double X)
{
    if (X <= 0)
        X = std::max(200.0, 6.0 * static_cast<double>(D.abs()));
    double const a = l_chi_with_derivative(1.0, D, {}, X).second.real();
    double const b = l_chi_with_derivative(1.0, D, {}, 2.0 * X).second.real();
    return {b, std::abs(b - a)};
}

double S_X_alpha(double X, FundamentalDiscriminant const & D)
{
    if (!(X > 0))
        throw Error("S_X_alpha: X must be positive");
    return S_X_alpha(X, D, smallest_prime_factors(static_cast<std::uint32_t>(smoothed_length(X))));
}

double S_X_alpha(double X, FundamentalDiscriminant const & D, std::vector<std::uint32_t> const & spf)
{
    if (!(X > 0))
        throw Error("S_X_alpha: X must be positive");
    std::int64_t const N = smoothed_length(X);
    if (static_cast<std::int64_t>(spf.size()) <= N)
        throw Error("S_X_alpha: factor table too short for X = " + format_double(X));
    auto const t = tau_table(D, spf, N);
    CompensatedSum<double> acc;
    for (std::int64_t n = 1; n <= N; ++n) {
        auto const tn = t[static_cast<std::size_t>(n)];
        if (tn != 0)
            acc.add(tn / static_cast<double>(n) * std::exp(-static_cast<double>(n) / X));
    }
    return acc.value();
}

double S_X_alpha_contour(double X, FundamentalDiscriminant const & D, int h, int w)
{
    auto const [L, dL] = l_chi_with_derivative(1.0, D);
    return L.real() * std::log(X) + dL.real() + static_cast<double>(h) / (w * X);
}

cplx zeta(cplx s)
{
    if (s == cplx{1, 0})
        throw Error("zeta: pole at s = 1");
    if (s.real() < -10)
        throw Error("zeta: Re s too small for Euler-Maclaurin");
    constexpr int N = 30;
    // B_{2k} / (2k)!
    static constexpr double kB[] = {
        1.0 / 6 / 2,
        -1.0 / 30 / 24,
        1.0 / 42 / 720,
        -1.0 / 30 / 40320,
        5.0 / 66 / 3628800,
        -691.0 / 2730 / 479001600,
        7.0 / 6 / 87178291200.0,
        -3617.0 / 510 / 20922789888000.0,
        43867.0 / 798 / 6402373705728000.0,
        -174611.0 / 330 / 2432902008176640000.0,
    };
    CompensatedSum<cplx> acc;
    for (int n = 1; n < N; ++n)
        acc.add(std::exp(-s * std::log(static_cast<double>(n))));
    double const lN = std::log(static_cast<double>(N));
    cplx const Ns = std::exp(-s * lN);
    acc.add(Ns * static_cast<double>(N) / (s - 1.0));
    acc.add(0.5 * Ns);
    // rising factorial s (s+1) ... (s+2k-2) times N^(-s-2k+1)
    cplx rising = s;
    cplx pw = Ns / static_cast<double>(N);
    for (int k = 0; k < 10; ++k) {
        acc.add(kB[k] * rising * pw);
        rising *= (s + static_cast<double>(2 * k + 1)) * (s + static_cast<double>(2 * k + 2));
        pw /= static_cast<double>(N) * N;
    }
    return acc.value();
}

double zeta_value(double s)
{
    if (!(s > 1))
        throw Error("zeta_value: s must exceed 1");
    return zeta(cplx{s, 0}).real();
}

std::int64_t Sym2Evaluator::depth_for(double X)
{
    return smoothed_length(X);
}

Sym2Evaluator::Sym2Evaluator(EigenvalueTable const & table, double X) : X_(X)
{
    if (!(X > 0))
        throw Error("sym2: X must be positive");
    std::int64_t const N = depth_for(X);
    if (table.n_max < N)
        throw Error("sym2: table depth " + std::to_string(table.n_max) + " insufficient for X = " +
                    format_double(X) + "; need n_max >= " + std::to_string(N));
    b_ = sym2_primitive_coefficients(table, N);
    for (auto [p, e] : factor(table.curve.conductor)) {
        (void)e;
        bad_.push_back(p);
    }
}

cplx Sym2Evaluator::primitive(cplx s) const
{
    check_abscissa(s, "sym2");
    auto const N = static_cast<std::int64_t>(b_.size()) - 1;
    return smoothed_sum([&](std::int64_t n) { return b_[static_cast<std::size_t>(n)]; }, s, X_, N, false).first;
}

cplx Sym2Evaluator::imprimitive(cplx s) const
{
    cplx v = primitive(s);
    for (std::int64_t p : bad_)
        v /= 1.0 - std::exp(-2.0 * s * std::log(static_cast<double>(p)));
    return v;
}

std::pair<cplx, cplx> Sym2Evaluator::imprimitive_with_derivative(cplx s) const
{
    check_abscissa(s, "sym2");
    auto const N = static_cast<std::int64_t>(b_.size()) - 1;
    auto [v, d] = smoothed_sum([&](std::int64_t n) { return b_[static_cast<std::size_t>(n)]; }, s, X_, N, true);
    cplx logd = d / v;
    for (std::int64_t p : bad_) {
        double const lp = std::log(static_cast<double>(p));
        cplx const q = std::exp(-2.0 * s * lp);
        v /= 1.0 - q;
        logd -= 2.0 * lp * q / (1.0 - q);
    }
    return {v, v * logd};
}

cplx sym2_value(cplx s, EigenvalueTable const & table, double X)
{
    return Sym2Evaluator(table, X).imprimitive(s);
}

cplx plain_dirichlet(std::span<double const> c, cplx s, std::int64_t N)
{
    if (static_cast<std::int64_t>(c.size()) <= N)
        throw Error("plain_dirichlet: coefficient vector too short");
    CompensatedSum<cplx> acc;
    for (std::int64_t n = 1; n <= N; ++n)
        if (c[static_cast<std::size_t>(n)] != 0.0)
            acc.add(c[static_cast<std::size_t>(n)] * std::exp(-s * std::log(static_cast<double>(n))));
    return acc.value();
}

} // namespace rslab
