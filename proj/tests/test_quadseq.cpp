#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "rslab/quadseq.hpp"
#include "test_support.hpp"

using namespace rslab;

namespace {

EigenvalueTable const & table37(std::int64_t depth)
{
    static std::optional<EigenvalueTable> t;
    if (!t || t->n_max < depth)
        t = get_or_build_table(testsupport::curve("37a"), depth, testsupport::cache_dir());
    return *t;
}

// direct sum over |gamma| <= G in natural order
double mock_direct(std::int64_t a, std::int64_t b, double s, std::int64_t G)
{
    double v = 0;
    for (std::int64_t g = -G; g <= G; ++g)
        v += std::pow(double(g * g + a * g + b), -s);
    return v;
}

} // namespace

TEST_CASE("polynomials")
{
    QuadPoly const p{3, 5};
    CHECK(p(2) == 15);
    CHECK(p.D_shift() == doctest::Approx(2.75));
    CHECK_THROWS_AS((QuadPoly{2, 1}.validate()), Error);
    CHECK_THROWS_AS((QuadPoly{4, 3}.validate()), Error);
    CHECK_NOTHROW((QuadPoly{1, 1}.validate()));
    // reflection gamma -> -a - gamma fixes P
    for (std::int64_t a : {-5, -2, 0, 3, 7})
        for (std::int64_t g = -20; g <= 20; ++g) {
            QuadPoly const q{a, a * a};
            CHECK(q(g) == q(-a - g));
        }
}

TEST_CASE("unit source against direct summation")
{
    auto const src = CoefficientSource::unit();
    auto const pt = series_eval(src, {0, 1}, 3.0, 1000 * 1000 + 1);
    CHECK(std::abs(pt.value.real() - mock_direct(0, 1, 3.0, 1000)) < 1e-10);
    CHECK(pt.terms == 2001);
    for (std::int64_t a : {-3, 1, 4}) {
        QuadPoly const p{a, a * a / 4 + 2};
        auto const v = series_eval(src, p, 2.5, 4000000).value.real();
        double const oracle = mock_direct(a, p.b, 2.5, 2000);
        CHECK(std::abs(v - oracle) < 1e-9);
    }
    CHECK_THROWS_AS(series_eval(src, {0, 1}, 3.0), Error);
    CHECK_THROWS_AS(series_eval(src, {0, 1}, 0.7, 100), Error);
}

TEST_CASE("Epstein limit")
{
    // sum over all gamma of (gamma^2 + b)^-s -> sqrt(pi) Gamma(s - 1/2)/Gamma(s) b^(1/2 - s)
    auto const src = CoefficientSource::unit();
    for (double s : {1.5, 2.0, 3.0})
        for (std::int64_t b : {10000, 100000}) {
            double const exact = std::sqrt(kPi) * std::exp(log_gamma(s - 0.5) - log_gamma(s)) * std::pow(double(b), 0.5 - s);
            double const v = series_eval(src, {0, b}, s, 100000000000LL).value.real();
            CHECK(std::abs(v / exact - 1) < 0.02);
        }
}

TEST_CASE("37a series")
{
    auto const src = CoefficientSource::from_table(table37(1280000));
    auto const a = series_eval(src, {0, 1}, 2.0, 640000);
    auto const b = series_eval(src, {0, 1}, 2.0, 1280000);
    CHECK(std::abs(a.value.real() - b.value.real()) < 1e-8);
    CHECK(std::abs(b.value.real() - 0.2500505133) < 1e-9);
    CHECK(std::abs(a.value.real() - b.value.real()) <= a.tail_bound);
    CHECK(std::abs(a.value.imag()) < 1e-15);
    // |lambda| <= d dominates
    for (std::int64_t bb : {1, 7, 50}) {
        for (double s : {1.0, 2.0}) {
            auto const v = series_eval(src, {0, bb}, s, 200000).value;
            CHECK(std::abs(v) <= divisor_majorant({0, bb}, s, 200000));
        }
    }
    // insufficient depth names the required table
    try {
        series_eval(src, {0, 1}, 2.0, 5000000);
        FAIL("no error");
    } catch (Error const & e) {
        CHECK(std::string(e.what()).find("5000000") != std::string::npos);
    }
    // complex s
    auto const z = series_eval(src, {1, 3}, cplx{1.5, 2.0}, 200000);
    auto const zc = series_eval(src, {1, 3}, cplx{1.5, -2.0}, 200000);
    CHECK(std::abs(z.value - std::conj(zc.value)) < 1e-14);
}

TEST_CASE("tail certificates")
{
    auto const src = CoefficientSource::unit();
    for (double s : {1.0, 1.5, 2.0}) {
        std::int64_t const N = 100000;
        auto const small = series_eval(src, {0, 3}, s, N);
        auto const big = series_eval(src, {0, 3}, s, 100 * N);
        // unit coefficients are bounded by d(n), so the certificate applies
        CHECK(std::abs(big.value - small.value) <= small.tail_bound);
        CHECK(small.tail_bound > 0);
        CHECK(std::isfinite(small.tail_bound));
    }
    CHECK(series_tail_bound({0, 1}, 2.0, 1000000) < series_tail_bound({0, 1}, 2.0, 10000));
}

TEST_CASE("exponent fit")
{
    std::vector<std::int64_t> bs;
    for (int i = 0; i < 12; ++i)
        bs.push_back(static_cast<std::int64_t>(std::round(1000 * std::pow(100.0, i / 11.0))));
    auto const fit = exponent_fit(CoefficientSource::unit(), 2.0, bs, 10000000000LL);
    CHECK(std::abs(fit.slope - (-1.5)) < 0.05);
    CHECK(fit.b_used.size() == bs.size());
    CHECK(fit.epstein_slope == doctest::Approx(-1.5));
    auto const f1 = exponent_fit(CoefficientSource::unit(), 1.0, bs, 10000000000LL);
    CHECK(std::abs(f1.slope - (-0.5)) < 0.05);
    CHECK(f1.reference_slope == doctest::Approx(0.5 - 1.0 - (1.0 - 2.0 * 7.0 / 64.0) / 16.0));
    CHECK_THROWS_AS(exponent_fit(CoefficientSource::unit(), 2.0, {1000}, 100000000), Error);
}

TEST_CASE("shifted theta coefficients")
{
    auto const c0 = theta_shift_coeffs(0, 10);
    CHECK(c0 == std::vector<int>{1, 0, 0, 0, 2, 0, 0, 0, 0, 0, 0});
    auto const c1 = theta_shift_coeffs(1, 10);
    CHECK(c1 == std::vector<int>{0, 2, 0, 0, 0, 0, 0, 0, 0, 2, 0});
    CHECK(theta_shift_coeffs(3, 30) == theta_shift_coeffs(1, 30));
    CHECK(theta_shift_coeffs(-2, 30) == theta_shift_coeffs(0, 30));
    CHECK_THROWS_AS(theta_shift_coeffs(0, -1), Error);
}

TEST_CASE("unfolding")
{
    auto const unit = CoefficientSource::unit();
    auto const u = unfolding_check(unit, {0, 1}, 3.0, 1000000);
    CHECK(u.residual < 1e-13);
    auto const src = CoefficientSource::from_table(table37(1280000));
    for (QuadPoly const p : {QuadPoly{0, 1}, QuadPoly{1, 2}, QuadPoly{-3, 11}}) {
        auto const r = unfolding_check(src, p, 3.0, 500000);
        CHECK(r.residual < 1e-12);
        auto const scaled = unfolding_check(src, p, 3.0, 500000, 7.5);
        CHECK(scaled.residual < 1e-12);
        CHECK(std::abs(scaled.lhs - r.lhs) < 1e-12 * std::abs(r.lhs));
    }
    CHECK_THROWS_AS(unfolding_check(unit, {0, 1}, 2.0, 1000), Error);
    CHECK_THROWS_AS(unfolding_check(unit, {0, 1}, 3.0, 1000, 0.0), Error);
}
