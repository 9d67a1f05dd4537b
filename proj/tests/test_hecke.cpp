#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fstream>
#include <random>

#include "rslab/hecke.hpp"
#include "test_support.hpp"

using namespace rslab;

namespace {

// affine solutions plus the point at infinity
std::int64_t count_points(CurveSpec const & E, std::int64_t p)
{
    auto const & a = E.ainv;
    std::int64_t n = 1;
    for (std::int64_t x = 0; x < p; ++x)
        for (std::int64_t y = 0; y < p; ++y) {
            std::int64_t const lhs = y * y + a[0] * x * y + a[2] * y;
            std::int64_t const rhs = x * x * x + a[1] * x * x + a[3] * x + a[4];
            n += mod(lhs - rhs, p) == 0;
        }
    return n;
}

// points where both partial derivatives vanish
std::int64_t count_singular(CurveSpec const & E, std::int64_t p)
{
    auto const & a = E.ainv;
    std::int64_t n = 0;
    for (std::int64_t x = 0; x < p; ++x)
        for (std::int64_t y = 0; y < p; ++y) {
            std::int64_t const F = y * y + a[0] * x * y + a[2] * y - (x * x * x + a[1] * x * x + a[3] * x + a[4]);
            std::int64_t const Fx = a[0] * y - (3 * x * x + 2 * a[1] * x + a[3]);
            std::int64_t const Fy = 2 * y + a[0] * x + a[2];
            n += mod(F, p) == 0 && mod(Fx, p) == 0 && mod(Fy, p) == 0;
        }
    return n;
}

std::filesystem::path scratch(std::string const & name)
{
    auto const dir = testsupport::cache_dir() / ("hecke_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("curve data")
{
    auto const E = testsupport::curve("37a");
    CHECK(E.conductor == 37);
    CHECK(E.discriminant() == 37);
    CHECK(E.root_number == -1);
    auto const F = testsupport::curve("11a");
    CHECK(F.discriminant() == -161051);
    CurveSpec bad = E;
    bad.ainv = {0, 0, 0, 0, 0};
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = E;
    bad.conductor = 38;
    CHECK_THROWS_AS(bad.validate(), Error);
    CHECK_THROWS_AS(CurveSpec::from_json(nlohmann::json{{"label", "x"}}), Error);
    CHECK(CurveSpec::from_json(E.to_json()).ainv == E.ainv);
}

TEST_CASE("traces against the point count oracle")
{
    auto const E = testsupport::curve("37a");
    CHECK(2 + 1 - count_points(E, 2) == -2);
    CHECK(3 + 1 - count_points(E, 3) == -3);
    CHECK(ap_naive(E, 2) == -2);
    CHECK(ap_naive(E, 3) == -3);
    // bad fibre: one node, a_p = p - #nonsingular points
    CHECK(count_singular(E, 37) == 1);
    std::int64_t const ns = count_points(E, 37) - count_singular(E, 37);
    CHECK(37 - ns == -1);
    CHECK(ap_naive(E, 37) == -1);
    CHECK(reduction_type(E, 37) == Reduction::nonsplit_multiplicative);
    CHECK(reduction_type(E, 5) == Reduction::good);

    for (auto const & label : {"37a", "11a"}) {
        auto const C = testsupport::curve(label);
        for (std::uint32_t p : primes_up_to(400)) {
            std::int64_t const expect = static_cast<std::int64_t>(p) + 1 - count_points(C, p);
            if (C.conductor % p == 0)
                continue;
            CHECK(ap_naive(C, p) == expect);
        }
    }
    // 11a has split reduction at 11
    auto const F = testsupport::curve("11a");
    CHECK(reduction_type(F, 11) == Reduction::split_multiplicative);
    CHECK(ap_naive(F, 11) == 1);
}

TEST_CASE("BSGS against naive counting")
{
    std::mt19937_64 rng(20240601);
    for (auto const & label : {"37a", "11a"}) {
        auto const E = testsupport::curve(label);
        auto const ps = primes_up_to(200000);
        std::uniform_int_distribution<std::size_t> pick(3, ps.size() - 1);
        for (int i = 0; i < 25; ++i) {
            std::int64_t const p = ps[pick(rng)];
            if (E.conductor % p == 0)
                continue;
            bool ok = false;
            std::int64_t const fast = ap_bsgs(E, p, ok);
            CHECK(ap_naive(E, p) == ap_point_count(E, p, 1 << 30));
            if (ok)
                CHECK(fast == ap_naive(E, p));
            CHECK(ap_point_count(E, p) == ap_naive(E, p));
        }
    }
}

TEST_CASE("Hecke relations, Hasse bound, examples")
{
    for (auto const & label : {"37a", "11a"}) {
        auto const E = testsupport::curve(label);
        std::int64_t const N = 10000;
        auto const t = build_table(E, N);
        REQUIRE(t.n_max == N);
        CHECK(t.a[1] == 1);
        auto const spf = smallest_prime_factors(N);
        for (std::int64_t n = 1; n <= N; ++n) {
            CHECK(std::abs(t.lambda[static_cast<std::size_t>(n)] - t.a[static_cast<std::size_t>(n)] / std::sqrt(double(n))) < 1e-14);
            CHECK(std::abs(t.lambda[static_cast<std::size_t>(n)]) <= divisor_count(n) + 1e-12);
        }
        for (std::uint32_t p : primes_up_to(N)) {
            CHECK(t.ap(p) * t.ap(p) <= 4 * static_cast<std::int64_t>(p));
            bool const good = E.conductor % p != 0;
            std::int64_t pk = p;
            while (pk * p <= N) {
                std::int64_t const next = pk * p;
                std::int64_t const expect = good ? t.ap(p) * t.a[static_cast<std::size_t>(pk)] -
                                                       static_cast<std::int64_t>(p) * t.a[static_cast<std::size_t>(pk / p)]
                                                 : t.ap(p) * t.a[static_cast<std::size_t>(pk)];
                CHECK(t.a[static_cast<std::size_t>(next)] == expect);
                pk = next;
            }
        }
        for (std::int64_t m = 2; m <= 100; ++m)
            for (std::int64_t n = 2; m * n <= N; ++n)
                if (gcd(m, n) == 1)
                    CHECK(t.a[static_cast<std::size_t>(m * n)] == t.a[static_cast<std::size_t>(m)] * t.a[static_cast<std::size_t>(n)]);
        (void)spf;
    }
    auto const t = build_table(testsupport::curve("37a"), 10);
    CHECK(t.a[4] == 2);
    CHECK(t.a[6] == 6);
}

TEST_CASE("symmetric square coefficients")
{
    auto const t = build_table(testsupport::curve("37a"), 40000);
    std::int64_t const N = 200;
    auto const c = sym2_coefficients(t, N);
    for (std::int64_t n = 1; n <= N; ++n) {
        double s = 0;
        for (std::int64_t k = 1; k * k <= n; ++k)
            if (n % (k * k) == 0) {
                std::int64_t const m = n / (k * k);
                s += t.lambda[static_cast<std::size_t>(m * m)];
            }
        CHECK(std::abs(c[static_cast<std::size_t>(n)] - s) < 1e-10);
    }
    // primitive and imprimitive differ only by (1 - p^-2s)^-1 at 37
    auto const prim = sym2_primitive_coefficients(t, N);
    for (std::int64_t n = 1; n <= N; ++n) {
        double s = 0;
        for (std::int64_t k = 1; k <= n; k *= 37 * 37)
            if (n % k == 0)
                s += prim[static_cast<std::size_t>(n / k)];
        CHECK(std::abs(c[static_cast<std::size_t>(n)] - s) < 1e-10);
    }
    for (std::int64_t p : {2, 3, 5, 37}) {
        auto const e = lambda_even_powers(t, p, 3);
        std::int64_t q = 1;
        for (int k = 0; k <= 3 && q <= t.n_max; ++k, q *= p * p)
            CHECK(std::abs(e[static_cast<std::size_t>(k)] - t.lambda[static_cast<std::size_t>(q)]) < 1e-12);
    }
}

TEST_CASE("twists and root numbers")
{
    auto const E = testsupport::curve("37a");
    auto const d4 = FundamentalDiscriminant::from_discriminant(-4);
    auto const d3 = FundamentalDiscriminant::from_discriminant(-3);
    auto const d23 = FundamentalDiscriminant::from_discriminant(-23);
    CHECK(twist_root_number(E, d4) == 1);
    CHECK(is_admissible(E, d4));
    CHECK(is_admissible(E, d3));
    CHECK(twist_root_number(E, d23) == -1);
    CHECK_FALSE(is_admissible(E, d23));
    CHECK_THROWS_AS(twist_root_number(E, FundamentalDiscriminant::from_discriminant(-148)), Error);
    for (std::int64_t D : fundamental_discriminants(-200, -3)) {
        auto const d = FundamentalDiscriminant::from_discriminant(D);
        if (gcd(D, 37) != 1)
            continue;
        // chi_D(-1) = -1 for D < 0
        CHECK(twist_root_number(E, d) == -kronecker_symbol(D, 37) * E.root_number);
    }

    auto const t37 = build_table(E, 2000);
    CHECK(std::abs(numerical_root_number(t37) - (-1.0)) < 1e-8);
    CHECK(std::abs(numerical_root_number(t37, 1.4) - (-1.0)) < 1e-8);
    auto const t11 = build_table(testsupport::curve("11a"), 2000);
    CHECK(std::abs(numerical_root_number(t11) - 1.0) < 1e-8);
}

TEST_CASE("eigenvalue cache")
{
    auto const E = testsupport::curve("37a");
    auto const dir = scratch("roundtrip");
    auto const t1 = get_or_build_table(E, 5000, dir);
    auto const path = dir / "37a_N5000.csv";
    REQUIRE(std::filesystem::exists(path));
    auto const t2 = load_table(path);
    CHECK(t2.a == t1.a);
    CHECK(t2.lambda == t1.lambda);
    // smaller request served from the larger file, no new file written
    auto const t3 = get_or_build_table(E, 3000, dir);
    CHECK(std::vector<std::int64_t>(t1.a.begin(), t1.a.begin() + 3001) == t3.a);
    CHECK(std::distance(std::filesystem::directory_iterator(dir), std::filesystem::directory_iterator{}) == 1);

    // flip a digit in the body
    std::string text;
    {
        std::ifstream in(path);
        text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }
    auto const row = text.find("\n101,");
    REQUIRE(row != std::string::npos);
    text[row + 5] = text[row + 5] == '1' ? '2' : '1';
    {
        std::ofstream out(path, std::ios::trunc);
        out << text;
    }
    CHECK_THROWS_AS(load_table(path), Error);
    auto const t4 = get_or_build_table(E, 5000, dir);
    CHECK(t4.a == t1.a);
    CHECK_NOTHROW(load_table(path));
    CHECK_THROWS_AS(load_table(dir / "missing.csv"), Error);
    CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("validation")
{
    auto const E = testsupport::curve("37a");
    std::vector<std::int64_t> ap(11, 0);
    CHECK_THROWS_AS(table_from_traces(E, 10, std::vector<std::int64_t>(5, 0)), Error);
    CHECK_NOTHROW(table_from_traces(E, 10, ap));
    auto const t = build_table(E, 100);
    CHECK_NOTHROW(sym2_coefficients(t, 100));
    CHECK_THROWS_AS(sym2_coefficients(t, 101), Error);
}
