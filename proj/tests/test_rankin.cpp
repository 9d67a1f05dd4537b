#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "rslab/rankin.hpp"
#include "rslab/reference.hpp"
#include "test_support.hpp"

using namespace rslab;

namespace {

FundamentalDiscriminant disc(std::int64_t D)
{
    return FundamentalDiscriminant::from_discriminant(D);
}

RankinEngine engine(double cutoff_mult = 12.0)
{
    TruncationParams p;
    p.cutoff_mult = cutoff_mult;
    return RankinEngine(testsupport::curve("37a"), p, testsupport::cache_dir());
}

// 2 sum a_n chi(n)/n k(2 pi n / sqrt(cond)) with k = E1 (odd) or exp (even)
double curve_series(EigenvalueTable const & t, std::int64_t D, double cond, bool odd)
{
    double s = 0;
    for (std::int64_t n = 1; n <= t.n_max; ++n) {
        double const x = 2 * kPi * double(n) / std::sqrt(cond);
        if (x > 60)
            break;
        double const c = D == 1 ? 1.0 : kronecker_symbol(D, n);
        s += double(t.a[static_cast<std::size_t>(n)]) * c / double(n) * (odd ? -std::expint(-x) : std::exp(-x));
    }
    return 2 * s;
}

} // namespace

TEST_CASE("normalisation against the factorised value")
{
    // for class number one the Rankin-Selberg function is L(E, s) L(E x chi_D, s)
    auto const t = reference::build_table(testsupport::curve("37a"), 3000);
    double const Lp = curve_series(t, 1, 37.0, true);
    CHECK(std::abs(Lp - 0.305999773834052) < 1e-12);
    auto e = engine();
    for (std::int64_t D : {-4, -3}) {
        double const twisted = curve_series(t, D, 37.0 * D * D, false);
        double const target = Lp * twisted;
        double const S = e.average_direct(disc(D));
        CHECK(std::abs(S - target) <= 1e-9 * std::abs(target));
        CHECK(std::abs(factorized_lprime(e.table(3000), disc(D)) - target) < 1e-12);
    }
    CHECK(std::abs(calibrate_kappa(e) - 8.0) < 1e-8);
    CHECK(std::abs(main_term_constant() - (-1.2751707452)) < 1e-9);
}

TEST_CASE("smoke identities")
{
    auto e = engine();
    for (std::int64_t D : {-4, -3, -23, -47}) {
        bool const force = D == -23;
        auto const rep = e.average(disc(D), force);
        CHECK(rep.identities_hold());
        CHECK(std::abs(rep.S_direct - rep.S_geometric) <= 1e-8);
        CHECK(std::abs(rep.S_direct - (rep.S_main + rep.S_0)) <= 1e-8);
        CHECK(rep.max_imaginary <= 1e-10);
        CHECK(rep.forced == force);
        CHECK(rep.tail_bound < 1e-6);
        CHECK(rep.h == class_group(disc(D)).h);
        auto const j = rep.to_json();
        CHECK(j["sym2_convention"] == "imprimitive");
        CHECK(j["per_character"].size() == static_cast<std::size_t>(rep.h));
    }
}

TEST_CASE("character paths agree and conjugates match")
{
    auto e = engine();
    auto const d = disc(-47);
    auto const G = class_group(d);
    auto const chars = characters(G);
    auto const all = e.lprime_all(d);
    REQUIRE(all.size() == chars.size());
    for (std::size_t k = 0; k < chars.size(); ++k) {
        CHECK(std::abs(e.lprime_central(d, chars[k]) - all[k].real()) < 1e-9);
        auto const c = conjugate(G, chars[k]);
        auto const j = static_cast<std::size_t>(std::find(chars.begin(), chars.end(), c) - chars.begin());
        CHECK(std::abs(all[j] - all[k]) < 1e-9);
        CHECK(std::abs(all[k].imag()) < 1e-10);
    }
}

TEST_CASE("serial reference agrees with the engine")
{
    auto e = engine(4.0);
    for (std::int64_t D : {-4, -3, -23, -47, -71}) {
        auto const d = disc(D);
        std::int64_t const X = e.cutoff(d);
        auto const t = reference::build_table(e.curve(), X);
        CHECK(std::vector<std::int64_t>(e.table(X).a.begin(), e.table(X).a.begin() + X + 1) == t.a);
        double const ref = reference::average_direct(t, d, X);
        double const fast = e.average_direct(d, true);
        CHECK(std::abs(ref - fast) < 1e-9 * std::max(1.0, std::abs(ref)));
    }
    auto const d = disc(-47);
    std::int64_t const X = e.cutoff(d);
    auto t = reference::build_table(e.curve(), X);
    double const base = reference::average_direct(t, d, X);
    for (auto & l : t.lambda)
        l *= 2.5;
    CHECK(std::abs(reference::average_direct(t, d, X) - 2.5 * base) < 1e-10 * std::abs(base));
    CHECK(std::abs(reference::class_number_formula(disc(-4)) - kPi / 4) < 1e-15);
}

TEST_CASE("truncation")
{
    auto e12 = engine(12.0);
    auto e48 = engine(48.0);
    for (std::int64_t D : {-4, -47, -71}) {
        auto const d = disc(D);
        double const bound = e12.tail_bound(d);
        CHECK(bound < 1e-6);
        CHECK(std::abs(e12.average_direct(d) - e48.average_direct(d)) <= bound);
        CHECK(e48.tail_bound(d) < bound);
    }
    // at a small cutoff the bound is not vacuous but covers the change
    auto e2 = engine(2.0);
    auto const d = disc(-47);
    CHECK(std::abs(e2.average_direct(d) - e48.average_direct(d)) <= e2.tail_bound(d));
}

TEST_CASE("main term")
{
    auto e = engine();
    for (std::int64_t D : {-4, -3, -7, -47, -71}) {
        auto const d = disc(D);
        auto const mt = e.main_term(d, true);
        CHECK(std::abs(mt.r - mt.r_circle) < 1e-7 * std::abs(mt.r));
        CHECK(std::abs(mt.r - mt.r_closed) < 1e-8 * std::abs(mt.r));
        CHECK(mt.r > 0);
        CHECK(mt.sym2_1 > 0);
        CHECK(std::abs(mt.L1 - reference::class_number_formula(d)) < 1e-6);
    }
    for (std::int64_t D : {-4, -3, -7}) {
        auto const d = disc(D);
        double const lattice = e.average_geometric(d, true).S_main;
        CHECK(std::abs(e.S_main_contour(d) - lattice) < 1e-9);
    }
}

TEST_CASE("admissibility gates")
{
    auto e = engine();
    CHECK_THROWS_AS(e.average(disc(-23)), Error);
    CHECK_NOTHROW(e.require(disc(-23), true));
    CHECK_THROWS_AS(e.require(disc(-148), true), Error);
    CHECK_FALSE(e.admissibility(disc(-148)).coprime);
    CHECK(e.admissibility(disc(-4)).admissible());
    CHECK(e.admissibility(disc(-23)).reason().find("+1") != std::string::npos);
    CHECK(discriminant_scan(e, {}, false).empty());
    auto const rows = discriminant_scan(e, {-4, -12, -23, -148}, false);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].error.empty());
    CHECK_FALSE(rows[1].error.empty());
    CHECK_FALSE(rows[2].error.empty());
    CHECK_FALSE(rows[3].error.empty());
    CHECK(rows[1].report.D == -12);
    TruncationParams bad;
    bad.cutoff_mult = 0.5;
    CHECK_THROWS_AS(bad.validate(), Error);
    CHECK_THROWS_AS(e.main_term(disc(-148)), Error);
}
