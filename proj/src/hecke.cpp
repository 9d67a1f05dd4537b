#include "rslab/hecke.hpp"

#include <cmath>
#include <fstream>

namespace rslab {

std::int64_t CurveSpec::b2() const noexcept
{
    return ainv[0] * ainv[0] + 4 * ainv[1];
}

std::int64_t CurveSpec::b4() const noexcept
{
    return 2 * ainv[3] + ainv[0] * ainv[2];
}

std::int64_t CurveSpec::b6() const noexcept
{
    return ainv[2] * ainv[2] + 4 * ainv[4];
}

std::int64_t CurveSpec::b8() const noexcept
{
    auto const [a1, a2, a3, a4, a6] = ainv;
    return a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
}

std::int64_t CurveSpec::c4() const noexcept
{
    return b2() * b2() - 24 * b4();
}

std::int64_t CurveSpec::c6() const noexcept
{
    return -b2() * b2() * b2() + 36 * b2() * b4() - 216 * b6();
}

std::int64_t CurveSpec::discriminant() const noexcept
{
    std::int64_t const B2 = b2(), B4 = b4(), B6 = b6(), B8 = b8();
    return -B2 * B2 * B8 - 8 * B4 * B4 * B4 - 27 * B6 * B6 + 9 * B2 * B4 * B6;
}

void CurveSpec::validate() const
{
    std::int64_t const disc = discriminant();
    if (disc == 0)
        throw Error("curve " + label + ": singular Weierstrass model");
    if (conductor < 1)
        throw Error("curve " + label + ": conductor must be positive");
    if (root_number != 1 && root_number != -1)
        throw Error("curve " + label + ": root_number must be +1 or -1");
    for (auto [p, e] : factor(conductor)) {
        (void)e;
        if (disc % p != 0)
            throw Error("curve " + label + ": conductor prime " + std::to_string(p) +
                        " does not divide the discriminant " + std::to_string(disc));
    }
}

CurveSpec CurveSpec::from_json(nlohmann::json const & j)
{
    CurveSpec E;
    try {
        E.label = j.at("label").get<std::string>();
        auto const a = j.at("ainv").get<std::vector<std::int64_t>>();
        if (a.size() != 5)
            throw Error("curve: ainv must have 5 entries");
        std::copy(a.begin(), a.end(), E.ainv.begin());
        E.conductor = j.at("conductor").get<std::int64_t>();
        E.root_number = j.at("root_number").get<int>();
    } catch (nlohmann::json::exception const & ex) {
        throw Error(std::string("curve: malformed JSON: ") + ex.what());
    }
    E.validate();
    return E;
}

CurveSpec CurveSpec::load(std::filesystem::path const & path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("curve: cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (nlohmann::json::exception const & ex) {
        throw Error("curve: cannot parse " + path.string() + ": " + ex.what());
    }
    return from_json(j);
}

nlohmann::json CurveSpec::to_json() const
{
    return {{"label", label}, {"ainv", ainv}, {"conductor", conductor}, {"root_number", root_number}};
}

EigenvalueTable table_from_traces(CurveSpec const & curve, std::int64_t n_max,
                                  std::vector<std::int64_t> const & ap)
{
    if (n_max < 1)
        throw Error("build_table: n_max must be >= 1");
    if (static_cast<std::int64_t>(ap.size()) <= n_max)
        throw Error("build_table: trace vector shorter than n_max");
    auto const spf = smallest_prime_factors(static_cast<std::uint32_t>(n_max));
    EigenvalueTable t;
    t.curve = curve;
    t.n_max = n_max;
    auto const n1 = static_cast<std::size_t>(n_max) + 1;
    t.a.assign(n1, 0);
    t.lambda.assign(n1, 0.0);
    std::vector<std::uint32_t> ppart(n1, 1);
    t.a[1] = 1;
    for (std::int64_t n = 2; n <= n_max; ++n) {
        auto const un = static_cast<std::size_t>(n);
        std::int64_t const p = spf[un];
        std::int64_t const q = n / p;
        ppart[un] = (q % p == 0) ? ppart[static_cast<std::size_t>(q)] * static_cast<std::uint32_t>(p)
                                 : static_cast<std::uint32_t>(p);
        if (ppart[un] != n) {
            t.a[un] = t.a[ppart[un]] * t.a[static_cast<std::size_t>(n / ppart[un])];
        } else if (n == p) {
            t.a[un] = ap[un];
        } else {
            std::int64_t const app = t.a[static_cast<std::size_t>(p)];
            if (curve.conductor % p == 0)
                t.a[un] = app * t.a[static_cast<std::size_t>(q)];
            else
                t.a[un] = app * t.a[static_cast<std::size_t>(q)] - p * t.a[static_cast<std::size_t>(q / p)];
        }
    }
    for (std::size_t n = 1; n < n1; ++n)
        t.lambda[n] = static_cast<double>(t.a[n]) / std::sqrt(static_cast<double>(n));
    return t;
}

EigenvalueTable build_table(CurveSpec const & curve, std::int64_t n_max)
{
    curve.validate();
    auto const primes = primes_up_to(static_cast<std::uint32_t>(std::max<std::int64_t>(n_max, 1)));
    std::vector<std::int64_t> ap(static_cast<std::size_t>(n_max) + 1, 0);
    auto const np = static_cast<std::int64_t>(primes.size());
    ParallelExceptions errors;
#pragma omp parallel for schedule(dynamic, 64)
    for (std::int64_t i = 0; i < np; ++i) {
        std::int64_t const p = primes[static_cast<std::size_t>(i)];
        errors.run([&] { ap[static_cast<std::size_t>(p)] = ap_point_count(curve, p); });
    }
    errors.rethrow();
    return table_from_traces(curve, n_max, ap);
}

std::vector<double> lambda_even_powers(EigenvalueTable const & t, std::int64_t p, int k)
{
    double const lp = static_cast<double>(t.ap(p)) / std::sqrt(static_cast<double>(p));
    bool const bad = t.curve.conductor % p == 0;
    std::vector<double> all(static_cast<std::size_t>(2 * k) + 1);
    all[0] = 1.0;
    if (k > 0)
        all[1] = lp;
    for (std::size_t j = 2; j < all.size(); ++j)
        all[j] = bad ? lp * all[j - 1] : lp * all[j - 1] - all[j - 2];
    std::vector<double> out(static_cast<std::size_t>(k) + 1);
    for (std::size_t e = 0; e < out.size(); ++e)
        out[e] = all[2 * e];
    return out;
}

namespace {

// multiplicative extension of local[p] sequences computed on demand
template <typename Local>
std::vector<double> multiplicative(std::int64_t n_max, Local && local)
{
    auto const spf = smallest_prime_factors(static_cast<std::uint32_t>(n_max));
    auto const n1 = static_cast<std::size_t>(n_max) + 1;
    std::vector<double> c(n1, 0.0);
    std::vector<std::uint32_t> ppart(n1, 1);
    std::vector<std::uint8_t> pexp(n1, 0);
    c[1] = 1.0;
    std::int64_t cur_p = 0;
    std::vector<double> cur;
    for (std::int64_t n = 2; n <= n_max; ++n) {
        auto const un = static_cast<std::size_t>(n);
        std::int64_t const p = spf[un];
        std::int64_t const q = n / p;
        if (q % p == 0) {
            ppart[un] = ppart[static_cast<std::size_t>(q)] * static_cast<std::uint32_t>(p);
            pexp[un] = static_cast<std::uint8_t>(pexp[static_cast<std::size_t>(q)] + 1);
        } else {
            ppart[un] = static_cast<std::uint32_t>(p);
            pexp[un] = 1;
        }
        if (ppart[un] != n) {
            c[un] = c[ppart[un]] * c[static_cast<std::size_t>(n / ppart[un])];
            continue;
        }
        if (p != cur_p) {
            int k = 0;
            for (std::int64_t pk = p; pk <= n_max; pk *= p)
                ++k;
            cur = local(p, k);
            cur_p = p;
        }
        c[un] = cur[pexp[un]];
    }
    return c;
}

void require_depth(EigenvalueTable const & t, std::int64_t n_max)
{
    if (n_max > t.n_max)
        throw Error("sym2: table depth " + std::to_string(t.n_max) + " insufficient, need n_max >= " +
                    std::to_string(n_max));
}

} // namespace

std::vector<double> sym2_coefficients(EigenvalueTable const & t, std::int64_t n_max)
{
    require_depth(t, n_max);
    return multiplicative(n_max, [&](std::int64_t p, int k) {
        auto const ev = lambda_even_powers(t, p, k);
        std::vector<double> local(static_cast<std::size_t>(k) + 1, 0.0);
        for (int j = 0; j <= k; ++j)
            for (int i = 0; 2 * i <= j; ++i)
                local[static_cast<std::size_t>(j)] += ev[static_cast<std::size_t>(j - 2 * i)];
        return local;
    });
}

std::vector<double> sym2_primitive_coefficients(EigenvalueTable const & t, std::int64_t n_max)
{
    require_depth(t, n_max);
    return multiplicative(n_max, [&](std::int64_t p, int k) {
        double const lp = static_cast<double>(t.ap(p)) / std::sqrt(static_cast<double>(p));
        std::vector<double> local(static_cast<std::size_t>(k) + 1, 0.0);
        local[0] = 1.0;
        if (t.curve.conductor % p == 0) {
            for (int j = 1; j <= k; ++j)
                local[static_cast<std::size_t>(j)] = local[static_cast<std::size_t>(j - 1)] * lp * lp;
            return local;
        }
        double const e1 = lp * lp - 1.0;
        for (int j = 1; j <= k; ++j) {
            auto at = [&](int i) { return i >= 0 ? local[static_cast<std::size_t>(i)] : 0.0; };
            local[static_cast<std::size_t>(j)] = e1 * (at(j - 1) - at(j - 2)) + at(j - 3);
        }
        return local;
    });
}

int twist_root_number(CurveSpec const & E, FundamentalDiscriminant const & D)
{
    if (gcd(D.D, E.conductor) != 1)
        throw Error("twist_root_number: D = " + std::to_string(D.D) + " is not coprime to the conductor " +
                    std::to_string(E.conductor));
    return kronecker_symbol(D.D, -E.conductor) * E.root_number;
}

bool is_admissible(CurveSpec const & E, FundamentalDiscriminant const & D)
{
    return E.root_number * twist_root_number(E, D) == -1;
}

double numerical_root_number(EigenvalueTable const & t, double tpoint)
{
    double const scale = 2.0 * kPi / std::sqrt(static_cast<double>(t.curve.conductor));
    auto g = [&](double y) {
        CompensatedSum<double> s;
        for (std::int64_t n = 1; n <= t.n_max; ++n) {
            double const arg = scale * static_cast<double>(n) * y;
            if (arg > 745.0)
                break;
            s.add(static_cast<double>(t.a[static_cast<std::size_t>(n)]) * std::exp(-arg));
        }
        return s.value();
    };
    double const need = 40.0 / (scale * std::min(tpoint, 1.0 / tpoint));
    if (static_cast<double>(t.n_max) < need)
        throw Error("numerical_root_number: table depth " + std::to_string(t.n_max) + " below " +
                    std::to_string(static_cast<std::int64_t>(need)));
    return g(1.0 / tpoint) / (tpoint * tpoint * g(tpoint));
}

} // namespace rslab
