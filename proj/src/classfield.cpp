#include "rslab/classfield.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <tuple>

namespace rslab {

namespace {

bool squarefree(std::int64_t n, std::int64_t * square_factor = nullptr)
{
    for (auto [p, e] : factor(n)) {
        if (e >= 2) {
            if (square_factor)
                *square_factor = p * p;
            return false;
        }
    }
    return true;
}

int jacobi(std::int64_t a, std::int64_t n)
{
    // n odd, positive
    a = mod(a, n);
    int result = 1;
    while (a != 0) {
        while (a % 2 == 0) {
            a /= 2;
            std::int64_t const r = n % 8;
            if (r == 3 || r == 5)
                result = -result;
        }
        std::swap(a, n);
        if (a % 4 == 3 && n % 4 == 3)
            result = -result;
        a %= n;
    }
    return n == 1 ? result : 0;
}

// (u, v, d) with u a + v b = d = gcd(a, b) >= 0
std::tuple<std::int64_t, std::int64_t, std::int64_t> extended_gcd(std::int64_t a, std::int64_t b)
{
    std::int64_t old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
    while (r != 0) {
        std::int64_t const q = old_r / r;
        std::tie(old_r, r) = std::make_tuple(r, old_r - q * r);
        std::tie(old_s, s) = std::make_tuple(s, old_s - q * s);
        std::tie(old_t, t) = std::make_tuple(t, old_t - q * t);
    }
    if (old_r < 0)
        return {-old_s, -old_t, -old_r};
    return {old_s, old_t, old_r};
}

int element_order(ClassGroupData const & G, int i)
{
    int k = 1;
    int x = i;
    while (x != 0) {
        x = G.multiply(x, i);
        ++k;
    }
    return k;
}

int power(ClassGroupData const & G, int i, std::int64_t e)
{
    int result = 0;
    int base = i;
    while (e > 0) {
        if (e & 1)
            result = G.multiply(result, base);
        base = G.multiply(base, base);
        e >>= 1;
    }
    return result;
}

// subgroup generated by `gens`, as a membership mask
std::vector<bool> generated_subgroup(ClassGroupData const & G, std::vector<int> const & gens)
{
    std::vector<bool> in(static_cast<std::size_t>(G.h), false);
    std::vector<int> elems{0};
    in[0] = true;
    for (int g : gens) {
        std::size_t idx = 0;
        while (idx < elems.size()) {
            int const y = G.multiply(elems[idx], g);
            if (!in[static_cast<std::size_t>(y)]) {
                in[static_cast<std::size_t>(y)] = true;
                elems.push_back(y);
            }
            ++idx;
        }
    }
    return in;
}

void decompose(ClassGroupData & G)
{
    std::vector<int> orders(static_cast<std::size_t>(G.h));
    for (int i = 0; i < G.h; ++i)
        orders[static_cast<std::size_t>(i)] = element_order(G, i);

    // cyclic factors of each Sylow subgroup, largest first
    std::vector<std::vector<ClassGenerator>> sylow_gens;
    for (auto [p, e] : factor(G.h)) {
        std::vector<int> sylow;
        for (int i = 0; i < G.h; ++i) {
            std::int64_t o = orders[static_cast<std::size_t>(i)];
            while (o % p == 0)
                o /= p;
            if (o == 1)
                sylow.push_back(i);
        }
        std::vector<ClassGenerator> gens;
        std::vector<int> gen_idx;
        auto in_h = generated_subgroup(G, gen_idx);
        auto subgroup_size = [&] {
            return std::count(in_h.begin(), in_h.end(), true);
        };
        while (subgroup_size() < static_cast<std::ptrdiff_t>(sylow.size())) {
            int best = -1;
            std::int64_t best_q = 0;
            for (int x : sylow) {
                std::int64_t q = 1;
                int y = x;
                while (!in_h[static_cast<std::size_t>(y)]) {
                    y = power(G, y, p);
                    q *= p;
                }
                if (q > best_q) {
                    best_q = q;
                    best = x;
                }
            }
            int const target = power(G, best, best_q);
            int correction = -1;
            for (int hh = 0; hh < G.h; ++hh) {
                if (in_h[static_cast<std::size_t>(hh)] && power(G, hh, best_q) == target) {
                    correction = hh;
                    break;
                }
            }
            if (correction < 0)
                throw Error("class_group: Sylow decomposition failed");
            int const x = G.multiply(best, G.inverse[static_cast<std::size_t>(correction)]);
            gens.push_back({x, static_cast<int>(best_q)});
            gen_idx.push_back(x);
            in_h = generated_subgroup(G, gen_idx);
        }
        sylow_gens.push_back(std::move(gens));
    }

    std::size_t nfactors = 0;
    for (auto const & g : sylow_gens)
        nfactors = std::max(nfactors, g.size());
    G.generators.clear();
    for (std::size_t i = 0; i < nfactors; ++i) {
        ClassGenerator cg{0, 1};
        for (auto const & g : sylow_gens) {
            if (i < g.size()) {
                cg.index = G.multiply(cg.index, g[i].index);
                cg.order *= g[i].order;
            }
        }
        G.generators.push_back(cg);
    }

    // coordinates by mixed-radix enumeration
    G.coords.assign(static_cast<std::size_t>(G.h), {});
    std::vector<int> c(G.generators.size(), 0);
    int filled = 0;
    while (true) {
        int elem = 0;
        for (std::size_t j = 0; j < c.size(); ++j)
            elem = G.multiply(elem, power(G, G.generators[j].index, c[j]));
        if (G.coords[static_cast<std::size_t>(elem)].empty() && !(G.generators.empty() && filled > 0)) {
            G.coords[static_cast<std::size_t>(elem)] = c;
            ++filled;
        }
        std::size_t j = 0;
        while (j < c.size()) {
            if (++c[j] < G.generators[j].order)
                break;
            c[j] = 0;
            ++j;
        }
        if (j == c.size())
            break;
    }
    if (filled != G.h)
        throw Error("class_group: generators do not give a direct decomposition");
}

} // namespace

bool is_fundamental_discriminant(std::int64_t D)
{
    if (D >= 0)
        return false;
    if (mod(D, 4) == 1)
        return squarefree(-D);
    if (mod(D, 4) != 0)
        return false;
    std::int64_t const m = D / 4;
    std::int64_t const r = mod(m, 4);
    return (r == 2 || r == 3) && squarefree(-m);
}

std::vector<std::int64_t> fundamental_discriminants(std::int64_t lo, std::int64_t hi)
{
    std::vector<std::int64_t> out;
    for (std::int64_t D = lo; D <= std::min<std::int64_t>(hi, -1); ++D)
        if (is_fundamental_discriminant(D))
            out.push_back(D);
    return out;
}

FundamentalDiscriminant FundamentalDiscriminant::from_alpha(std::int64_t alpha)
{
    if (alpha <= 0)
        throw Error("fundamental_discriminant: alpha must be positive, got " + std::to_string(alpha));
    std::int64_t sq = 0;
    if (!squarefree(alpha, &sq))
        throw Error("fundamental_discriminant: alpha = " + std::to_string(alpha) +
                    " is divisible by the square " + std::to_string(sq));
    FundamentalDiscriminant d;
    d.alpha = alpha;
    if (mod(-alpha, 4) == 1) {
        d.D = -alpha;
        d.half_integral_basis = true;
    } else {
        d.D = -4 * alpha;
        d.half_integral_basis = false;
    }
    return d;
}

FundamentalDiscriminant FundamentalDiscriminant::from_discriminant(std::int64_t D)
{
    if (!is_fundamental_discriminant(D)) {
        std::string why = "not a negative fundamental discriminant";
        if (D < 0 && mod(D, 4) == 0 && mod(D / 4, 4) <= 1)
            why = "D/4 = " + std::to_string(D / 4) + " is 0 or 1 mod 4, so D is a square multiple of a smaller discriminant";
        else if (D < 0 && (mod(D, 4) == 2 || mod(D, 4) == 3))
            why = "D is 2 or 3 mod 4";
        else if (D < 0) {
            std::int64_t sq = 0;
            squarefree(mod(D, 4) == 0 ? -D / 4 : -D, &sq);
            if (sq > 1)
                why = "divisible by the square " + std::to_string(sq);
        }
        throw Error("D = " + std::to_string(D) + ": " + why);
    }
    FundamentalDiscriminant d;
    d.D = D;
    d.half_integral_basis = mod(D, 4) == 1;
    d.alpha = d.half_integral_basis ? -D : -D / 4;
    return d;
}

int kronecker_symbol(std::int64_t D, std::int64_t n)
{
    if (n == 0)
        return (D == 1 || D == -1) ? 1 : 0;
    int result = 1;
    if (n < 0) {
        n = -n;
        if (D < 0)
            result = -result;
    }
    int v = 0;
    while (n % 2 == 0) {
        n /= 2;
        ++v;
    }
    if (v > 0) {
        if (D % 2 == 0)
            return 0;
        std::int64_t const r = mod(D, 8);
        if ((r == 3 || r == 5) && (v % 2 == 1))
            result = -result;
    }
    if (n == 1)
        return result;
    return result * jacobi(D, n);
}

bool QuadraticForm::is_reduced() const noexcept
{
    if (a <= 0)
        return false;
    std::int64_t const ab = b < 0 ? -b : b;
    if (!(ab <= a && a <= c))
        return false;
    if ((ab == a || a == c) && b < 0)
        return false;
    return true;
}

QuadraticForm principal_form(std::int64_t D)
{
    if (mod(D, 4) == 1)
        return {1, 1, (1 - D) / 4};
    return {1, 0, -D / 4};
}

QuadraticForm reduce(QuadraticForm f)
{
    if (f.discriminant() >= 0 || f.a <= 0)
        throw Error("reduce: form (" + std::to_string(f.a) + "," + std::to_string(f.b) + "," +
                    std::to_string(f.c) + ") is not positive definite");
    auto normalize = [&f] {
        if (-f.a < f.b && f.b <= f.a)
            return;
        // b = 2 a q + r, -a < r <= a
        std::int64_t const two_a = 2 * f.a;
        std::int64_t q = f.b / two_a;
        std::int64_t r = f.b - q * two_a;
        if (r < 0) {
            r += two_a;
            --q;
        }
        if (r > f.a) {
            r -= two_a;
            ++q;
        }
        f.c -= (f.b + r) * q / 2;
        f.b = r;
    };
    normalize();
    while (f.a > f.c) {
        std::swap(f.a, f.c);
        f.b = -f.b;
        normalize();
    }
    if (f.a == f.c && f.b < 0)
        f.b = -f.b;
    return f;
}

QuadraticForm compose(QuadraticForm const & f1_in, QuadraticForm const & f2_in)
{
    std::int64_t const D = f1_in.discriminant();
    if (f2_in.discriminant() != D)
        throw Error("compose: discriminant mismatch (" + std::to_string(D) + " vs " +
                    std::to_string(f2_in.discriminant()) + ")");
    QuadraticForm f1 = f1_in, f2 = f2_in;
    if (f1.a > f2.a)
        std::swap(f1, f2);
    std::int64_t const s = (f1.b + f2.b) / 2;
    std::int64_t const n = f2.b - s;
    std::int64_t y1 = 0, d = 0;
    if (f2.a % f1.a == 0) {
        y1 = 0;
        d = f1.a;
    } else {
        auto [u, v, g] = extended_gcd(f2.a, f1.a);
        (void)v;
        y1 = u;
        d = g;
    }
    std::int64_t x2 = 0, y2 = 0, d1 = 0;
    if (s % d == 0) {
        y2 = -1;
        x2 = 0;
        d1 = d;
    } else {
        auto [u, v, g] = extended_gcd(s, d);
        x2 = u;
        y2 = -v;
        d1 = g;
    }
    std::int64_t const v1 = f1.a / d1;
    std::int64_t const v2 = f2.a / d1;
    __int128 const rr = static_cast<__int128>(y1) * y2 * n - static_cast<__int128>(x2) * f2.c;
    std::int64_t r = static_cast<std::int64_t>(rr % v1);
    if (r < 0)
        r += v1;
    QuadraticForm out;
    out.b = f2.b + 2 * v2 * r;
    out.a = v1 * v2;
    out.c = (out.b * out.b - D) / (4 * out.a);
    return reduce(out);
}

std::vector<RepresentationRow> representation_rows(QuadraticForm const & f, std::int64_t n_max)
{
    std::vector<RepresentationRow> rows;
    if (n_max < 1)
        return rows;
    std::int64_t const absD = -f.discriminant();
    auto const ymax = static_cast<std::int64_t>(std::sqrt(4.0 * f.a * static_cast<double>(n_max) / absD)) + 1;
    for (std::int64_t y = -ymax; y <= ymax; ++y) {
        double const disc = 4.0 * f.a * static_cast<double>(n_max) - static_cast<double>(absD) * y * y;
        if (disc < 0)
            continue;
        double const centre = -static_cast<double>(f.b * y) / (2.0 * f.a);
        double const half = std::sqrt(disc) / (2.0 * f.a);
        auto lo = static_cast<std::int64_t>(std::floor(centre - half)) - 1;
        auto hi = static_cast<std::int64_t>(std::ceil(centre + half)) + 1;
        while (lo <= hi && f(lo, y) > n_max)
            ++lo;
        while (hi >= lo && f(hi, y) > n_max)
            --hi;
        if (lo > hi)
            continue;
        rows.push_back({y, lo, hi});
    }
    return rows;
}

void for_each_representation(QuadraticForm const & f, std::int64_t n_max,
                             std::function<void(std::int64_t, std::int64_t, std::int64_t)> const & visit)
{
    for (auto const & row : representation_rows(f, n_max)) {
        for (std::int64_t x = row.x_lo; x <= row.x_hi; ++x) {
            if (x == 0 && row.y == 0)
                continue;
            visit(f(x, row.y), x, row.y);
        }
    }
}

int ClassGroupData::index_of(QuadraticForm const & f) const
{
    auto const it = std::find(forms.begin(), forms.end(), reduce(f));
    if (it == forms.end())
        throw Error("class_group: form not in the reduced list");
    return static_cast<int>(it - forms.begin());
}

int ClassGroupData::exponent() const
{
    int e = 1;
    for (auto const & g : generators)
        e = std::lcm(e, g.order);
    return e;
}

ClassGroupData class_group(FundamentalDiscriminant const & disc)
{
    ClassGroupData G;
    G.disc = disc;
    G.w = disc.units();
    std::int64_t const D = disc.D;
    std::int64_t const absD = -D;
    auto const amax = static_cast<std::int64_t>(std::sqrt(absD / 3.0)) + 1;
    for (std::int64_t a = 1; a <= amax; ++a) {
        for (std::int64_t b = -a + 1; b <= a; ++b) {
            if (mod(b - D, 2) != 0)
                continue;
            std::int64_t const num = b * b - D;
            if (num % (4 * a) != 0)
                continue;
            QuadraticForm const f{a, b, num / (4 * a)};
            if (f.is_reduced() && std::gcd(std::gcd(f.a, f.b), f.c) == 1)
                G.forms.push_back(f);
        }
    }
    std::sort(G.forms.begin(), G.forms.end(), [](QuadraticForm const & x, QuadraticForm const & y) {
        if (x.a != y.a)
            return x.a < y.a;
        std::int64_t const ax = x.b < 0 ? -x.b : x.b, ay = y.b < 0 ? -y.b : y.b;
        if (ax != ay)
            return ax < ay;
        return x.b > y.b;
    });
    G.h = static_cast<int>(G.forms.size());
    if (G.forms.empty() || G.forms[0] != principal_form(D))
        throw Error("class_group: principal form missing for D = " + std::to_string(D));

    std::map<QuadraticForm, int> index;
    for (int i = 0; i < G.h; ++i)
        index[G.forms[static_cast<std::size_t>(i)]] = i;
    G.table.assign(static_cast<std::size_t>(G.h) * G.h, 0);
    for (int i = 0; i < G.h; ++i) {
        for (int j = i; j < G.h; ++j) {
            auto const it = index.find(compose(G.forms[static_cast<std::size_t>(i)], G.forms[static_cast<std::size_t>(j)]));
            if (it == index.end())
                throw Error("class_group: composition left the reduced set");
            G.table[static_cast<std::size_t>(i) * G.h + j] = it->second;
            G.table[static_cast<std::size_t>(j) * G.h + i] = it->second;
        }
    }
    G.inverse.resize(static_cast<std::size_t>(G.h));
    for (int i = 0; i < G.h; ++i)
        G.inverse[static_cast<std::size_t>(i)] = index.at(reduce(G.forms[static_cast<std::size_t>(i)].inverse()));
    decompose(G);
    return G;
}

nlohmann::json to_json(ClassGroupData const & G)
{
    nlohmann::json forms = nlohmann::json::array();
    for (auto const & f : G.forms)
        forms.push_back({f.a, f.b, f.c});
    nlohmann::json gens = nlohmann::json::array();
    for (auto const & g : G.generators) {
        auto const & f = G.forms[static_cast<std::size_t>(g.index)];
        gens.push_back({{"form", {f.a, f.b, f.c}}, {"order", g.order}});
    }
    return {{"D", G.disc.D}, {"h", G.h}, {"w", G.w}, {"forms", forms}, {"generators", gens}};
}

std::vector<ClassCharacter> characters(ClassGroupData const & G)
{
    std::vector<ClassCharacter> out;
    std::vector<int> e(G.generators.size(), 0);
    while (true) {
        ClassCharacter chi;
        chi.exponents = e;
        chi.order = 1;
        for (std::size_t j = 0; j < e.size(); ++j) {
            int const n = G.generators[j].order;
            chi.order = std::lcm(chi.order, n / std::gcd(e[j], n));
        }
        out.push_back(std::move(chi));
        // lexicographic: last coordinate varies fastest
        std::size_t j = e.size();
        while (j > 0) {
            --j;
            if (++e[j] < G.generators[j].order)
                break;
            e[j] = 0;
            if (j == 0) {
                j = e.size() + 1;
                break;
            }
        }
        if (e.empty() || j == e.size() + 1)
            break;
    }
    return out;
}

ClassCharacter conjugate(ClassGroupData const & G, ClassCharacter const & chi)
{
    ClassCharacter out = chi;
    for (std::size_t j = 0; j < out.exponents.size(); ++j) {
        int const n = G.generators[j].order;
        out.exponents[j] = (n - out.exponents[j]) % n;
    }
    return out;
}

int character_angle(ClassGroupData const & G, ClassCharacter const & chi, int class_index)
{
    int const E = G.exponent();
    auto const & c = G.coords[static_cast<std::size_t>(class_index)];
    std::int64_t k = 0;
    for (std::size_t j = 0; j < c.size(); ++j)
        k += static_cast<std::int64_t>(chi.exponents[j]) * c[j] * (E / G.generators[j].order);
    return static_cast<int>(mod(k, E));
}

cplx character_value(ClassGroupData const & G, ClassCharacter const & chi, int class_index)
{
    int const E = G.exponent();
    int const k = character_angle(G, chi, class_index);
    if (k == 0)
        return {1.0, 0.0};
    if (2 * k == E)
        return {-1.0, 0.0};
    double const theta = 2.0 * kPi * static_cast<double>(k) / E;
    return {std::cos(theta), std::sin(theta)};
}

std::vector<std::vector<std::int32_t>> ideal_counts_by_class(ClassGroupData const & G, std::int64_t n_max)
{
    std::vector<std::vector<std::int32_t>> counts(static_cast<std::size_t>(G.h),
                                                  std::vector<std::int32_t>(static_cast<std::size_t>(n_max) + 1, 0));
    for (int i = 0; i < G.h; ++i) {
        // representations by the form of C count ideals in C^{-1}
        auto & dst = counts[static_cast<std::size_t>(G.inverse[static_cast<std::size_t>(i)])];
        for_each_representation(G.forms[static_cast<std::size_t>(i)], n_max,
                                [&](std::int64_t n, std::int64_t, std::int64_t) { ++dst[static_cast<std::size_t>(n)]; });
    }
    for (auto & row : counts) {
        for (auto & v : row) {
            if (v % G.w != 0)
                throw Error("ideal_counts_by_class: representation count not divisible by w");
            v /= G.w;
        }
    }
    return counts;
}

ThetaCoefficients r_chi(ClassGroupData const & G, ClassCharacter const & chi, std::int64_t n_max)
{
    if (n_max < 1)
        throw Error("r_chi: n_max must be >= 1");
    ThetaCoefficients out;
    out.character = chi;
    out.n_max = n_max;
    out.r.assign(static_cast<std::size_t>(n_max) + 1, cplx{0, 0});
    auto const counts = ideal_counts_by_class(G, n_max);
    for (int C = 0; C < G.h; ++C) {
        cplx const v = character_value(G, chi, C);
        auto const & row = counts[static_cast<std::size_t>(C)];
        for (std::int64_t n = 1; n <= n_max; ++n)
            if (row[static_cast<std::size_t>(n)] != 0)
                out.r[static_cast<std::size_t>(n)] += v * static_cast<double>(row[static_cast<std::size_t>(n)]);
    }
    return out;
}

std::int64_t tau(FundamentalDiscriminant const & disc, std::int64_t n)
{
    if (n < 1)
        throw Error("tau: n must be positive");
    std::int64_t t = 1;
    for (auto [p, e] : factor(n)) {
        int const c = kronecker_symbol(disc.D, p);
        if (c == 1)
            t *= e + 1;
        else if (c == -1)
            t *= (e % 2 == 0) ? 1 : 0;
    }
    return t;
}

std::vector<std::int8_t> character_table(std::int64_t D)
{
    std::int64_t const m = -D;
    std::vector<std::int8_t> chi(static_cast<std::size_t>(m));
    for (std::int64_t n = 0; n < m; ++n)
        chi[static_cast<std::size_t>(n)] = static_cast<std::int8_t>(kronecker_symbol(D, n));
    return chi;
}

std::vector<std::int32_t> tau_table(FundamentalDiscriminant const & disc,
                                    std::vector<std::uint32_t> const & spf, std::int64_t n_max)
{
    if (static_cast<std::int64_t>(spf.size()) <= n_max)
        throw Error("tau_table: smallest-prime-factor table too short");
    auto const chi = character_table(disc.D);
    std::int64_t const m = disc.abs();
    std::vector<std::int32_t> t(static_cast<std::size_t>(n_max) + 1, 0);
    std::vector<std::uint32_t> ppart(static_cast<std::size_t>(n_max) + 1, 1);
    std::vector<std::uint8_t> pexp(static_cast<std::size_t>(n_max) + 1, 0);
    if (n_max >= 1)
        t[1] = 1;
    for (std::int64_t n = 2; n <= n_max; ++n) {
        std::uint32_t const p = spf[static_cast<std::size_t>(n)];
        std::int64_t const q = n / p;
        if (q % p == 0) {
            ppart[static_cast<std::size_t>(n)] = ppart[static_cast<std::size_t>(q)] * p;
            pexp[static_cast<std::size_t>(n)] = static_cast<std::uint8_t>(pexp[static_cast<std::size_t>(q)] + 1);
        } else {
            ppart[static_cast<std::size_t>(n)] = p;
            pexp[static_cast<std::size_t>(n)] = 1;
        }
        int const e = pexp[static_cast<std::size_t>(n)];
        int const c = chi[static_cast<std::size_t>(p % m)];
        std::int32_t const local = c == 0 ? 1 : (c == 1 ? e + 1 : (e % 2 == 0 ? 1 : 0));
        t[static_cast<std::size_t>(n)] = local * t[static_cast<std::size_t>(n / ppart[static_cast<std::size_t>(n)])];
    }
    return t;
}

} // namespace rslab
