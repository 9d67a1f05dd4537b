#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <unordered_map>
#include <vector>

#include "rslab/hecke.hpp"

namespace rslab {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

std::int64_t red(std::int64_t a, std::int64_t p)
{
    return mod(a, p);
}

std::int64_t mulmod(std::int64_t a, std::int64_t b, std::int64_t p)
{
    return static_cast<std::int64_t>(static_cast<u128>(a) * static_cast<u128>(b) % static_cast<u128>(p));
}

std::int64_t powmod(std::int64_t a, std::int64_t e, std::int64_t p)
{
    std::int64_t r = 1 % p;
    a = red(a, p);
    while (e > 0) {
        if (e & 1)
            r = mulmod(r, a, p);
        a = mulmod(a, a, p);
        e >>= 1;
    }
    return r;
}

std::int64_t invmod(std::int64_t a, std::int64_t p)
{
    std::int64_t t = 0, nt = 1, r = p, nr = red(a, p);
    while (nr != 0) {
        std::int64_t const q = r / nr;
        std::tie(t, nt) = std::make_pair(nt, t - q * nt);
        std::tie(r, nr) = std::make_pair(nr, r - q * nr);
    }
    if (r != 1)
        throw Error("invmod: not invertible");
    return red(t, p);
}

int legendre(std::int64_t a, std::int64_t p)
{
    a = red(a, p);
    if (a == 0)
        return 0;
    return powmod(a, (p - 1) / 2, p) == 1 ? 1 : -1;
}

// Tonelli-Shanks; a must be a nonzero square
std::int64_t sqrtmod(std::int64_t a, std::int64_t p)
{
    a = red(a, p);
    if (a == 0)
        return 0;
    if (p % 4 == 3)
        return powmod(a, (p + 1) / 4, p);
    std::int64_t q = p - 1;
    int s = 0;
    while (q % 2 == 0) {
        q /= 2;
        ++s;
    }
    std::int64_t z = 2;
    while (legendre(z, p) != -1)
        ++z;
    std::int64_t m = s;
    std::int64_t c = powmod(z, q, p);
    std::int64_t t = powmod(a, q, p);
    std::int64_t r = powmod(a, (q + 1) / 2, p);
    while (t != 1) {
        std::int64_t i = 0, tt = t;
        while (tt != 1) {
            tt = mulmod(tt, tt, p);
            ++i;
        }
        std::int64_t b = c;
        for (std::int64_t j = 0; j < m - i - 1; ++j)
            b = mulmod(b, b, p);
        m = i;
        c = mulmod(b, b, p);
        t = mulmod(t, c, p);
        r = mulmod(r, b, p);
    }
    return r;
}

std::int64_t isqrt(std::int64_t n)
{
    auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n)));
    while (r * r > n)
        --r;
    while ((r + 1) * (r + 1) <= n)
        ++r;
    return r;
}

struct Pt {
    std::int64_t x = 0, y = 0;
    bool inf = true;
    bool operator==(Pt const &) const = default;
};

// y^2 = x^3 + A x + B over F_p
struct ShortCurve {
    std::int64_t A, B, p;

    std::int64_t rhs(std::int64_t x) const
    {
        return red(mulmod(mulmod(x, x, p), x, p) + mulmod(A, x, p) + B, p);
    }

    Pt add(Pt const & P, Pt const & Q) const
    {
        if (P.inf)
            return Q;
        if (Q.inf)
            return P;
        std::int64_t lam;
        if (P.x == Q.x) {
            if (red(P.y + Q.y, p) == 0)
                return {};
            lam = mulmod(red(3 * mulmod(P.x, P.x, p) + A, p), invmod(2 * P.y, p), p);
        } else {
            lam = mulmod(red(Q.y - P.y, p), invmod(red(Q.x - P.x, p), p), p);
        }
        std::int64_t const x3 = red(mulmod(lam, lam, p) - P.x - Q.x, p);
        std::int64_t const y3 = red(mulmod(lam, red(P.x - x3, p), p) - P.y, p);
        return {x3, y3, false};
    }

    Pt neg(Pt const & P) const
    {
        if (P.inf)
            return P;
        return {P.x, red(-P.y, p), false};
    }

    Pt mul(std::int64_t k, Pt P) const
    {
        if (k < 0)
            return mul(-k, neg(P));
        Pt R;
        while (k > 0) {
            if (k & 1)
                R = add(R, P);
            P = add(P, P);
            k >>= 1;
        }
        return R;
    }

    // next point with x >= *cursor
    Pt point_from(std::int64_t & cursor) const
    {
        while (cursor < p) {
            std::int64_t const x = cursor++;
            std::int64_t const f = rhs(x);
            if (f != 0 && legendre(f, p) == 1)
                return {x, sqrtmod(f, p), false};
        }
        throw Error("ap_bsgs: ran out of points");
    }
};

u64 key(Pt const & P)
{
    return P.inf ? ~u64{0} : (static_cast<u64>(P.x) << 32) | static_cast<u64>(P.y);
}

// exact order of P, given some M in [lo, hi] with M P = O
std::int64_t point_order(ShortCurve const & C, Pt const & P, std::int64_t lo, std::int64_t hi)
{
    std::int64_t const width = hi - lo;
    std::int64_t const m = isqrt(width) + 1;
    std::unordered_map<u64, std::int64_t> baby;
    baby.reserve(static_cast<std::size_t>(2 * m));
    Pt J;
    for (std::int64_t j = 0; j < m; ++j) {
        if (j > 0 && J.inf)
            return j;  // small order found directly
        baby.emplace(key(J), j);
        J = C.add(J, P);
    }
    Pt const G = C.mul(m, P);
    Pt R = C.mul(lo, P);
    std::optional<std::int64_t> found;
    for (std::int64_t i = 0; lo + i * m - (m - 1) <= hi; ++i) {
        auto const it = baby.find(key(R));
        if (it != baby.end()) {
            std::int64_t const M = lo + i * m - it->second;
            if (M >= lo && M <= hi && M > 0) {
                found = M;
                break;
            }
        }
        R = C.add(R, G);
    }
    if (!found)
        throw Error("ap_bsgs: no multiple in the Hasse interval");
    std::int64_t ord = *found;
    for (auto [q, e] : factor(ord)) {
        (void)e;
        while (ord % q == 0 && C.mul(ord / q, P).inf)
            ord /= q;
    }
    return ord;
}

} // namespace

std::string to_string(Reduction r)
{
    switch (r) {
    case Reduction::good: return "good";
    case Reduction::split_multiplicative: return "split";
    case Reduction::nonsplit_multiplicative: return "nonsplit";
    case Reduction::additive: return "additive";
    }
    return "?";
}

Reduction reduction_type(CurveSpec const & E, std::int64_t p)
{
    if (!is_prime(p))
        throw Error("reduction_type: " + std::to_string(p) + " is not prime");
    if (mod(E.discriminant(), p) != 0)
        return Reduction::good;
    auto const [a1, a2, a3, a4, a6] = E.ainv;
    auto F = [&](std::int64_t x, std::int64_t y) {
        return red(y * y + a1 * x * y + a3 * y - x * x * x - a2 * x * x - a4 * x - a6, p);
    };
    auto Fx = [&](std::int64_t x, std::int64_t y) { return red(a1 * y - 3 * x * x - 2 * a2 * x - a4, p); };
    auto Fy = [&](std::int64_t x, std::int64_t y) { return red(2 * y + a1 * x + a3, p); };
    std::optional<std::int64_t> x0;
    for (std::int64_t x = 0; x < p && !x0; ++x) {
        if (p == 2) {
            for (std::int64_t y = 0; y < 2; ++y)
                if (F(x, y) == 0 && Fx(x, y) == 0 && Fy(x, y) == 0)
                    x0 = x;
        } else {
            std::int64_t const y = mulmod(red(-(a1 * x + a3), p), invmod(2, p), p);
            if (F(x, y) == 0 && Fx(x, y) == 0)
                x0 = x;
        }
    }
    if (!x0)
        throw Error("reduction_type: no singular point found at p = " + std::to_string(p));
    // tangent slopes at the singular point: m^2 + a1 m - (3 x0 + a2) = 0
    int roots = 0;
    for (std::int64_t m = 0; m < p; ++m)
        if (red(m * m + a1 * m - 3 * *x0 - a2, p) == 0)
            ++roots;
    if (roots == 2)
        return Reduction::split_multiplicative;
    if (roots == 0)
        return Reduction::nonsplit_multiplicative;
    return Reduction::additive;
}

std::int64_t ap_naive(CurveSpec const & E, std::int64_t p)
{
    auto const [a1, a2, a3, a4, a6] = E.ainv;
    if (p == 2) {
        std::int64_t affine = 0;
        for (std::int64_t x = 0; x < 2; ++x)
            for (std::int64_t y = 0; y < 2; ++y)
                if (red(y * y + a1 * x * y + a3 * y - x * x * x - a2 * x * x - a4 * x - a6, 2) == 0)
                    ++affine;
        return p + 1 - (affine + 1);
    }
    // (2y + a1 x + a3)^2 = 4x^3 + b2 x^2 + 2 b4 x + b6
    std::vector<std::int8_t> chi(static_cast<std::size_t>(p), -1);
    chi[0] = 0;
    for (std::int64_t y = 1; y <= p / 2; ++y)
        chi[static_cast<std::size_t>(y * y % p)] = 1;
    std::int64_t const b2 = red(E.b2(), p), b4 = red(E.b4(), p), b6 = red(E.b6(), p);
    std::int64_t s = 0;
    for (std::int64_t x = 0; x < p; ++x) {
        std::int64_t const x2 = x * x % p;
        std::int64_t const g = (4 * (x2 * x % p) + b2 * x2 + 2 * b4 * x + b6) % p;
        s += chi[static_cast<std::size_t>(g)];
    }
    return -s;
}

std::int64_t ap_bsgs(CurveSpec const & E, std::int64_t p, bool & ok)
{
    ok = false;
    if (p < 5 || mod(E.discriminant(), p) == 0)
        return 0;
    ShortCurve const C{red(-27 * E.c4(), p), red(-54 * E.c6(), p), p};
    std::int64_t d = 2;
    while (legendre(d, p) != -1)
        ++d;
    std::int64_t const d2 = mulmod(d, d, p);
    ShortCurve const T{mulmod(C.A, d2, p), mulmod(C.B, mulmod(d2, d, p), p), p};

    std::int64_t const s = isqrt(4 * p);
    std::int64_t const lo = p + 1 - s, hi = p + 1 + s;
    std::int64_t const tlo = 2 * p + 2 - hi, thi = 2 * p + 2 - lo;
    std::int64_t lcm_e = 1, lcm_t = 1;
    std::int64_t cur_e = 0, cur_t = 0;
    for (int trial = 0; trial < 64; ++trial) {
        if (trial % 2 == 0)
            lcm_e = std::lcm(lcm_e, point_order(C, C.point_from(cur_e), lo, hi));
        else
            lcm_t = std::lcm(lcm_t, point_order(T, T.point_from(cur_t), tlo, thi));
        std::int64_t candidate = 0;
        int count = 0;
        for (std::int64_t N = (lo + lcm_e - 1) / lcm_e * lcm_e; N <= hi; N += lcm_e) {
            if ((2 * p + 2 - N) % lcm_t == 0) {
                candidate = N;
                if (++count > 1)
                    break;
            }
        }
        if (count == 1) {
            ok = true;
            return p + 1 - candidate;
        }
    }
    return 0;
}

std::int64_t ap_point_count(CurveSpec const & E, std::int64_t p, std::int64_t naive_limit)
{
    if (p < naive_limit || p < 5 || mod(E.discriminant(), p) == 0)
        return ap_naive(E, p);
    bool ok = false;
    std::int64_t const a = ap_bsgs(E, p, ok);
    return ok ? a : ap_naive(E, p);
}

} // namespace rslab
