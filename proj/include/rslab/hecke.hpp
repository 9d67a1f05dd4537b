#ifndef RSLAB_HECKE_HPP
#define RSLAB_HECKE_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "rslab/classfield.hpp"
#include "rslab/numeric.hpp"

namespace rslab {

/// Integral Weierstrass model y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6.
struct CurveSpec {
    std::string label;
    std::array<std::int64_t, 5> ainv{};  // a1, a2, a3, a4, a6
    std::int64_t conductor = 1;
    int root_number = 1;

    std::int64_t b2() const noexcept;
    std::int64_t b4() const noexcept;
    std::int64_t b6() const noexcept;
    std::int64_t b8() const noexcept;
    std::int64_t c4() const noexcept;
    std::int64_t c6() const noexcept;
    std::int64_t discriminant() const noexcept;

    /// Throws if the model is singular or the conductor has a prime not dividing the discriminant.
    void validate() const;

    static CurveSpec from_json(nlohmann::json const & j);
    static CurveSpec load(std::filesystem::path const & path);
    nlohmann::json to_json() const;
};

enum class Reduction { good, split_multiplicative, nonsplit_multiplicative, additive };

std::string to_string(Reduction r);

/// Reduction type at p; bad fibres are classified by the tangent slopes at the singular point.
Reduction reduction_type(CurveSpec const & E, std::int64_t p);

/// p + 1 - #E(F_p) by direct counting on the projective model (singular point included).
std::int64_t ap_naive(CurveSpec const & E, std::int64_t p);

/*
 * Baby-step giant-step group order on the short model and its quadratic
 * twist. Only valid at good primes p >= 5. Returns 0 and sets ok = false
 * if the candidates never narrowed to one.
 */
std::int64_t ap_bsgs(CurveSpec const & E, std::int64_t p, bool & ok);

/// Dispatching point count: naive below `naive_limit`, BSGS above with naive fallback.
std::int64_t ap_point_count(CurveSpec const & E, std::int64_t p, std::int64_t naive_limit = 1000);

struct EigenvalueTable {
    CurveSpec curve;
    std::int64_t n_max = 0;
    std::vector<std::int64_t> a;  // a[0] unused
    std::vector<double> lambda;   // a_n / sqrt(n)

    std::int64_t ap(std::int64_t p) const { return a.at(static_cast<std::size_t>(p)); }
};

/// Table from prime traces: ap[p] must be filled for every prime p <= n_max.
EigenvalueTable table_from_traces(CurveSpec const & curve, std::int64_t n_max,
                                  std::vector<std::int64_t> const & ap);

/// Parallel over primes; fast point counts.
EigenvalueTable build_table(CurveSpec const & curve, std::int64_t n_max);

/*
 * Cached build. Files are "<label>_N<n_max>.csv" in `dir`; any cached file
 * with depth >= n_max and the same model is reused. A checksum mismatch or
 * model mismatch triggers a recount and rewrite.
 */
EigenvalueTable get_or_build_table(CurveSpec const & curve, std::int64_t n_max,
                                   std::filesystem::path const & dir);

void save_table(EigenvalueTable const & table, std::filesystem::path const & path);
/// Throws Error on malformed or corrupted files.
EigenvalueTable load_table(std::filesystem::path const & path);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes) noexcept;

/*
 * lambda(p^(2e)) for e = 0..k from the trace at p.
 */
std::vector<double> lambda_even_powers(EigenvalueTable const & t, std::int64_t p, int k);

/*
 * Imprimitive symmetric square: sum c(n) n^-s = zeta(2s) sum lambda(m^2) m^-s.
 * Returned vector has c[0] = 0 and covers 1 <= n <= n_max; needs traces up to n_max.
 */
std::vector<double> sym2_coefficients(EigenvalueTable const & t, std::int64_t n_max);

/*
 * Primitive symmetric square coefficients. Good primes use the degree-three
 * local factor; at a bad prime the factor is 1/(1 - lambda(p)^2 x).
 */
std::vector<double> sym2_primitive_coefficients(EigenvalueTable const & t, std::int64_t n_max);

/// epsilon(f x chi_D) = chi_D(-N) epsilon(f). Requires gcd(D, N) = 1.
int twist_root_number(CurveSpec const & E, FundamentalDiscriminant const & D);

/// True when epsilon(f) * epsilon(f x chi_D) = -1.
bool is_admissible(CurveSpec const & E, FundamentalDiscriminant const & D);

/*
 * Root number from the theta relation g(1/t) = eps t^2 g(t) with
 * g(t) = sum a_n exp(-2 pi n t / sqrt(N)). Returns the real ratio.
 */
double numerical_root_number(EigenvalueTable const & t, double tpoint = 1.15);

} // namespace rslab

#endif
