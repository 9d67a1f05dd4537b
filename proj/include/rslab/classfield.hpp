#ifndef RSLAB_CLASSFIELD_HPP
#define RSLAB_CLASSFIELD_HPP

#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rslab/numeric.hpp"

namespace rslab {

/*
 * A negative fundamental discriminant D together with the squarefree alpha
 * such that Q(sqrt(-alpha)) = Q(sqrt(D)). When D = 1 mod 4 the ring of
 * integers is Z[(1 + sqrt(-alpha))/2], otherwise Z[sqrt(-alpha)].
 */
struct FundamentalDiscriminant {
    std::int64_t D = -4;
    std::int64_t alpha = 1;
    bool half_integral_basis = false;

    static FundamentalDiscriminant from_alpha(std::int64_t alpha);
    static FundamentalDiscriminant from_discriminant(std::int64_t D);

    std::int64_t abs() const noexcept { return -D; }
    /// Unit count of the ring of integers.
    int units() const noexcept { return D == -3 ? 6 : (D == -4 ? 4 : 2); }

    bool operator==(FundamentalDiscriminant const &) const = default;
};

bool is_fundamental_discriminant(std::int64_t D);

/// Fundamental negative discriminants in [lo, hi] (both negative), increasing.
std::vector<std::int64_t> fundamental_discriminants(std::int64_t lo, std::int64_t hi);

/// Kronecker symbol (D/n); for a fundamental D this is the character chi_D.
int kronecker_symbol(std::int64_t D, std::int64_t n);

/// Positive definite binary quadratic form a x^2 + b x y + c y^2.
struct QuadraticForm {
    std::int64_t a = 1, b = 0, c = 1;

    std::int64_t discriminant() const noexcept { return b * b - 4 * a * c; }
    bool is_reduced() const noexcept;
    std::int64_t operator()(std::int64_t x, std::int64_t y) const noexcept
    {
        return a * x * x + b * x * y + c * y * y;
    }
    QuadraticForm inverse() const noexcept { return {a, -b, c}; }

    auto operator<=>(QuadraticForm const &) const = default;
};

QuadraticForm principal_form(std::int64_t D);
QuadraticForm reduce(QuadraticForm f);
QuadraticForm compose(QuadraticForm const & f1, QuadraticForm const & f2);

/*
 * Calls visit(n, x, y) for every (x, y) != (0, 0) with f(x, y) = n <= n_max.
 * Rows are visited in increasing y, x increasing within a row.
 */
void for_each_representation(QuadraticForm const & f, std::int64_t n_max,
                             std::function<void(std::int64_t, std::int64_t, std::int64_t)> const & visit);

/// Visits the admissible y values, then the x range in that row.
struct RepresentationRow {
    std::int64_t y;
    std::int64_t x_lo;
    std::int64_t x_hi;
};
std::vector<RepresentationRow> representation_rows(QuadraticForm const & f, std::int64_t n_max);

struct ClassGenerator {
    int index;  // into ClassGroupData::forms
    int order;
};

/*
 * The class group of a fundamental discriminant, modelled by its reduced
 * forms. forms[0] is the principal form. table[i * h + j] is the index of
 * the product class. coords[i] expresses class i in the generators.
 */
struct ClassGroupData {
    FundamentalDiscriminant disc;
    std::vector<QuadraticForm> forms;
    int h = 1;
    int w = 2;
    std::vector<ClassGenerator> generators;
    std::vector<int> table;
    std::vector<std::vector<int>> coords;
    std::vector<int> inverse;

    int multiply(int i, int j) const { return table[static_cast<std::size_t>(i) * h + j]; }
    int index_of(QuadraticForm const & f) const;
    /// Lcm of generator orders.
    int exponent() const;
};

ClassGroupData class_group(FundamentalDiscriminant const & disc);

nlohmann::json to_json(ClassGroupData const & G);

/// A character of the class group, stored as exponents against the generators.
struct ClassCharacter {
    std::vector<int> exponents;
    int order = 1;

    bool is_trivial() const noexcept { return order == 1; }
    bool operator==(ClassCharacter const &) const = default;
};

/// All h characters, trivial first, lexicographic in the exponent vectors.
std::vector<ClassCharacter> characters(ClassGroupData const & G);

ClassCharacter conjugate(ClassGroupData const & G, ClassCharacter const & chi);

/// chi(class) evaluated through an exact rational angle k / exponent.
cplx character_value(ClassGroupData const & G, ClassCharacter const & chi, int class_index);

/// Rational angle numerator: chi(class) = exp(2 pi i k / G.exponent()).
int character_angle(ClassGroupData const & G, ClassCharacter const & chi, int class_index);

/// r_chi(n) for 1 <= n <= n_max; r[0] is unused.
struct ThetaCoefficients {
    ClassCharacter character;
    std::int64_t n_max = 0;
    std::vector<cplx> r;
};

ThetaCoefficients r_chi(ClassGroupData const & G, ClassCharacter const & chi, std::int64_t n_max);

/// Number of ideals of norm n in each class, for 1 <= n <= n_max: counts[class][n].
std::vector<std::vector<std::int32_t>> ideal_counts_by_class(ClassGroupData const & G, std::int64_t n_max);

/// tau(n) = sum over m | n of chi_D(m).
std::int64_t tau(FundamentalDiscriminant const & disc, std::int64_t n);

/// tau(n) for 0 <= n <= n_max using a shared smallest-prime-factor table (entry 0 unused).
std::vector<std::int32_t> tau_table(FundamentalDiscriminant const & disc,
                                    std::vector<std::uint32_t> const & spf, std::int64_t n_max);

/// chi_D(n mod |D|) for 0 <= n < |D|.
std::vector<std::int8_t> character_table(std::int64_t D);

} // namespace rslab

#endif
