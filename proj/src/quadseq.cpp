#include "rslab/quadseq.hpp"

namespace rslab {

namespace {

constexpr double kMinSeriesSigma = 0.75;

/*
 * Calls visit(P) for the pairs {gamma, -a - gamma} with P(gamma) <= n_max,
 * by increasing u = |gamma + a/2|. A pair is visited as one call with both
 * values so the caller can add them commutatively.
 */
template <typename Visit>
std::int64_t scan_pairs(QuadPoly const & poly, std::int64_t n_max, Visit && visit)
{
    // gamma >= -a/2 runs over the right half; its mirror is -a - gamma
    std::int64_t const a = poly.a;
    std::int64_t gamma = a >= 0 ? -(a / 2) : (-a + 1) / 2;
    std::int64_t terms = 0;
    for (;; ++gamma) {
        std::int64_t const P = poly(gamma);
        if (P > n_max)
            break;
        std::int64_t const mirror = -a - gamma;
        if (mirror == gamma) {
            visit(P, std::int64_t{0}, false);
            terms += 1;
        } else {
            visit(P, poly(mirror), true);
            terms += 2;
        }
    }
    return terms;
}

std::int64_t resolve_depth(CoefficientSource const & src, QuadPoly const & poly, std::int64_t n_max)
{
    if (n_max <= 0) {
        if (src.depth == std::numeric_limits<std::int64_t>::max())
            throw Error("series: an explicit truncation is required for an unbounded source");
        n_max = src.depth;
    }
    if (n_max > src.depth)
        throw Error("series: source '" + src.name + "' has depth " + std::to_string(src.depth) +
                    "; a table with n_max >= " + std::to_string(n_max) + " is needed");
    if (poly(poly.a >= 0 ? -(poly.a / 2) : (-poly.a + 1) / 2) > n_max)
        throw Error("series: truncation " + std::to_string(n_max) + " below min P; need n_max >= " +
                    std::to_string(poly(-(poly.a / 2))));
    return n_max;
}

} // namespace

void QuadPoly::validate() const
{
    if (!(D_shift() > 0))
        throw Error("QuadPoly: b - a^2/4 must be positive (a = " + std::to_string(a) + ", b = " + std::to_string(b) + ")");
}

CoefficientSource CoefficientSource::from_table(EigenvalueTable const & t)
{
    auto lam = std::make_shared<std::vector<double>>(t.lambda);
    return {t.curve.label, t.n_max, [lam](std::int64_t n) { return (*lam)[static_cast<std::size_t>(n)]; }};
}

CoefficientSource CoefficientSource::unit()
{
    return {"unit", std::numeric_limits<std::int64_t>::max(), [](std::int64_t) { return 1.0; }};
}

double series_tail_bound(QuadPoly const & poly, double sigma, std::int64_t n_max)
{
    double const N = static_cast<double>(n_max);
    double const u1 = std::sqrt(std::max(N - poly.D_shift(), 0.0));
    double best = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 9; ++k) {
        double const eps = 0.05 * k;
        double const e = sigma - eps;
        if (e <= 0.5 || u1 <= 0)
            continue;
        double const side = std::pow(N, -e) + std::pow(u1, 1.0 - 2.0 * e) / (2.0 * e - 1.0);
        best = std::min(best, 2.0 * divisor_bound_constant(eps) * side);
    }
    return best;
}

QuadSeriesPoint series_eval(CoefficientSource const & src, QuadPoly const & poly, cplx s, std::int64_t n_max)
{
    poly.validate();
    if (s.real() <= kMinSeriesSigma)
        throw Error("series: Re s = " + format_double(s.real()) + " outside the convergent region Re s > 3/4");
    n_max = resolve_depth(src, poly, n_max);
    auto term = [&](std::int64_t P) {
        double const lam = src.lambda(P);
        return lam == 0.0 ? cplx{0, 0} : lam * std::exp(-s * std::log(static_cast<double>(P)));
    };
    CompensatedSum<cplx> acc;
    QuadSeriesPoint out;
    out.terms = scan_pairs(poly, n_max, [&](std::int64_t P1, std::int64_t P2, bool pair) {
        acc.add(pair ? term(P1) + term(P2) : term(P1));
    });
    out.poly = poly;
    out.s = s;
    out.value = acc.value();
    out.truncation = n_max;
    out.tail_bound = series_tail_bound(poly, s.real(), n_max);
    return out;
}

double divisor_majorant(QuadPoly const & poly, double sigma, std::int64_t n_max)
{
    poly.validate();
    auto term = [&](std::int64_t P) {
        return static_cast<double>(divisor_count(P)) * std::exp(-sigma * std::log(static_cast<double>(P)));
    };
    CompensatedSum<double> acc;
    scan_pairs(poly, n_max, [&](std::int64_t P1, std::int64_t P2, bool pair) {
        acc.add(pair ? term(P1) + term(P2) : term(P1));
    });
    return acc.value();
}

ExponentFit exponent_fit(CoefficientSource const & src, double s, std::vector<std::int64_t> const & b_list,
                         std::int64_t n_max)
{
    ExponentFit fit;
    fit.reference_slope = 0.5 - s - (1.0 - 2.0 * kRamanujanTheta) / 16.0;
    fit.epstein_slope = 0.5 - s;
    std::vector<double> xs;
    std::vector<std::int64_t> used;
    std::vector<double> ys(b_list.size());
    std::vector<int> ok(b_list.size(), 0);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::size_t i = 0; i < b_list.size(); ++i) {
        try {
            auto const pt = series_eval(src, QuadPoly{0, b_list[i]}, cplx{s, 0}, n_max);
            double const v = std::abs(pt.value);
            if (v > 0 && std::isfinite(v)) {
                ys[i] = std::log(v);
                ok[i] = 1;
            }
        } catch (Error const &) {
        }
    }
    std::vector<double> y_used;
    for (std::size_t i = 0; i < b_list.size(); ++i) {
        if (!ok[i])
            continue;
        fit.b_used.push_back(b_list[i]);
        xs.push_back(std::log(static_cast<double>(b_list[i])));
        y_used.push_back(ys[i]);
    }
    if (fit.b_used.size() < 5)
        throw Error("exponent_fit: " + std::to_string(fit.b_used.size()) + " usable b values; at least 5 required");
    auto const lf = least_squares(xs, y_used);
    fit.slope = lf.slope;
    fit.intercept = lf.intercept;
    fit.residuals = lf.residuals;
    fit.log_abs_values = y_used;
    return fit;
}

std::vector<int> theta_shift_coeffs(std::int64_t beta, std::int64_t n_max)
{
    if (n_max < 0)
        throw Error("theta_shift_coeffs: n_max must be nonnegative");
    std::vector<int> c(static_cast<std::size_t>(n_max) + 1, 0);
    // m = beta + 2 alpha runs over the integers congruent to beta mod 2
    auto const mmax = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n_max))) + 1;
    for (std::int64_t m = -mmax; m <= mmax; ++m) {
        if (mod(m - beta, 2) != 0 || m * m > n_max)
            continue;
        ++c[static_cast<std::size_t>(m * m)];
    }
    return c;
}

UnfoldingResult unfolding_check(CoefficientSource const & src, QuadPoly const & poly, double s, std::int64_t n_max,
                                double scale)
{
    if (s < 2.5)
        throw Error("unfolding_check: s must be at least 2.5 for absolute convergence of the double sum");
    if (!(scale > 0))
        throw Error("unfolding_check: scale must be positive");
    poly.validate();
    n_max = resolve_depth(src, poly, n_max);
    double const e = s + 0.25;
    double const lg = log_gamma(e);
    // int_0^inf exp(-16 pi P c u) (c u)^e du/u = c^e Gamma(e) (16 pi P c)^-e
    auto term = [&](std::int64_t P) {
        double const lam = src.lambda(P);
        if (lam == 0.0)
            return 0.0;
        double const p = static_cast<double>(P);
        double const integral = std::exp(e * std::log(scale) + lg - e * std::log(16.0 * kPi * p * scale));
        return std::sqrt(p) * lam * integral;
    };
    CompensatedSum<double> acc;
    scan_pairs(poly, n_max, [&](std::int64_t P1, std::int64_t P2, bool pair) {
        acc.add(pair ? term(P1) + term(P2) : term(P1));
    });
    UnfoldingResult r;
    r.lhs = acc.value();
    double const series = series_eval(src, poly, cplx{s - 0.25, 0}, n_max).value.real();
    r.rhs = std::exp(lg - e * std::log(16.0 * kPi)) * series;
    r.residual = std::abs(r.lhs - r.rhs) / std::abs(r.rhs);
    return r;
}

} // namespace rslab
