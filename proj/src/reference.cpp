#include "rslab/reference.hpp"

namespace rslab::reference {

EigenvalueTable build_table(CurveSpec const & curve, std::int64_t n_max)
{
    if (n_max < 1)
        throw Error("reference::build_table: n_max must be positive");
    std::vector<std::int64_t> ap(static_cast<std::size_t>(n_max) + 1, 0);
    for (std::uint32_t p : primes_up_to(static_cast<std::uint32_t>(n_max)))
        ap[p] = ap_naive(curve, p);
    return table_from_traces(curve, n_max, ap);
}

double average_direct(EigenvalueTable const & table, FundamentalDiscriminant const & D, std::int64_t cutoff,
                      KernelSpec const & spec)
{
    if (table.n_max < cutoff)
        throw Error("reference::average_direct: table too shallow");
    auto const G = class_group(D);
    auto const V = v_kernel(spec);
    double const M = static_cast<double>(D.abs()) * static_cast<double>(table.curve.conductor);
    // representation counts of every form, kept per class
    std::vector<std::vector<std::int64_t>> reps(static_cast<std::size_t>(G.h),
                                                std::vector<std::int64_t>(static_cast<std::size_t>(cutoff) + 1, 0));
    for (int i = 0; i < G.h; ++i) {
        QuadraticForm const f = G.forms[static_cast<std::size_t>(i)];
        auto const ymax = static_cast<std::int64_t>(std::sqrt(4.0 * f.a * static_cast<double>(cutoff) / D.abs())) + 1;
        auto const xmax = static_cast<std::int64_t>(std::sqrt(4.0 * f.c * static_cast<double>(cutoff) / D.abs())) + 1;
        for (std::int64_t y = -ymax; y <= ymax; ++y)
            for (std::int64_t x = -xmax; x <= xmax; ++x) {
                std::int64_t const n = f(x, y);
                if (n >= 1 && n <= cutoff)
                    ++reps[static_cast<std::size_t>(i)][static_cast<std::size_t>(n)];
            }
    }
    auto const chars = characters(G);
    double total = 0;
    for (auto const & chi : chars) {
        double lp = 0;
        for (std::int64_t n = 1; n <= cutoff; ++n) {
            cplx r{0, 0};
            for (int i = 0; i < G.h; ++i)
                r += character_value(G, chi, G.inverse[static_cast<std::size_t>(i)]) *
                     static_cast<double>(reps[static_cast<std::size_t>(i)][static_cast<std::size_t>(n)]);
            r /= static_cast<double>(G.w);
            if (std::abs(r) == 0.0)
                continue;
            for (std::int64_t b = 1; n * b * b <= cutoff; ++b) {
                if (gcd(b, table.curve.conductor) != 1)
                    continue;
                int const cb = kronecker_symbol(D.D, b);
                if (cb == 0)
                    continue;
                lp += table.lambda[static_cast<std::size_t>(n)] * r.real() / std::sqrt(static_cast<double>(n)) * cb /
                      static_cast<double>(b) * V.at(static_cast<double>(n * b * b) / M).value;
            }
        }
        total += 4.0 * lp;
    }
    return total / static_cast<double>(chars.size());
}

double class_number_formula(FundamentalDiscriminant const & D)
{
    auto const G = class_group(D);
    return 2.0 * kPi * G.h / (G.w * std::sqrt(static_cast<double>(D.abs())));
}

} // namespace rslab::reference
