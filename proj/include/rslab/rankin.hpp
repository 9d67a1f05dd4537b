#ifndef RSLAB_RANKIN_HPP
#define RSLAB_RANKIN_HPP

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rslab/classfield.hpp"
#include "rslab/hecke.hpp"
#include "rslab/lseries.hpp"
#include "rslab/mellin.hpp"

namespace rslab {

/*
 * Normalisation of the central derivative against the half-weighted double
 * sum (1/2) sum_b sum_n lambda r V. Fixed once by calibrate_kappa on D = -4.
 */
inline constexpr double kKappa = 8.0;

/// 24 log A - 3 gamma - 3 log 2 pi: the constant in the closed form of r(f, alpha).
double main_term_constant();

struct TruncationParams {
    double cutoff_mult = 12.0;     // n b^2 <= cutoff_mult |D| N
    double tail_tolerance = 1e-6;  // certified truncation bound per central derivative
    double sym2_X = 2.0e4;
    KernelSpec kernel;

    void validate() const;
};

struct Admissibility {
    bool coprime = true;
    int twist_sign = 0;  // epsilon(f x chi_D)
    int product = 0;     // epsilon(f) epsilon(f x chi_D)
    bool admissible() const noexcept { return coprime && product == -1; }
    std::string reason() const;
};

struct MainTerm {
    double r = 0;          // numerical residue
    double r_circle = 0;   // Cauchy-integral oracle
    double r_closed = 0;   // closed form in L, L', sym2 values
    double L1 = 0;         // L(1, chi_D), all Euler factors present
    double Lprime1 = 0;
    double sym2_1 = 0;     // imprimitive L(1, sym^2 f)
    Residue residue;       // of the bundle, before the 4/w factor
};

struct AverageReport {
    std::string curve;
    std::int64_t D = 0;
    int h = 0;
    int w = 0;
    int sign = 0;  // epsilon(f) epsilon(f x chi_D)
    bool forced = false;
    double S_direct = 0;
    double S_geometric = 0;
    double S_main = 0;
    double S_0 = 0;
    double r = 0;
    double r_closed = 0;
    double kappa = kKappa;
    double L1 = 0;
    double sym2_1 = 0;
    double tail_bound = 0;
    double identity_tolerance = 0;
    double max_imaginary = 0;
    std::int64_t cutoff = 0;
    std::vector<double> per_character;

    double abs_err() const { return std::abs(S_direct - r); }
    double normalized_err() const;
    bool identities_hold() const;
    nlohmann::json to_json() const;
};

/*
 * The averaging engine for one curve. Owns an eigenvalue table grown on
 * demand through the cache, the V kernel and its interpolation table, and
 * the D-independent symmetric-square evaluator.
 */
class RankinEngine {
  public:
    RankinEngine(CurveSpec curve, TruncationParams params, std::filesystem::path cache_dir);

    CurveSpec const & curve() const noexcept { return curve_; }
    TruncationParams const & params() const noexcept { return params_; }
    EigenvalueTable const & table(std::int64_t depth);

    Admissibility admissibility(FundamentalDiscriminant const & D) const;
    /// Throws unless admissible; with force only coprimality is required.
    void require(FundamentalDiscriminant const & D, bool force) const;

    std::int64_t cutoff(FundamentalDiscriminant const & D) const;
    /// Majorant of everything dropped by the cutoff, per central derivative.
    double tail_bound(FundamentalDiscriminant const & D) const;

    /// Central derivative for one character through r_chi(n).
    double lprime_central(FundamentalDiscriminant const & D, ClassCharacter const & chi, bool force = false);
    /// Per-character values (real parts) via per-class partial sums, characters in characters(G) order.
    std::vector<cplx> lprime_all(FundamentalDiscriminant const & D, bool force = false);
    double average_direct(FundamentalDiscriminant const & D, bool force = false);

    struct Geometric {
        double S_geometric = 0;  // full lattice
        double S_main = 0;       // y = 0 half line, doubled
        double S_0 = 0;          // y > 0 half plane, doubled
    };
    Geometric average_geometric(FundamentalDiscriminant const & D, bool force = false);

    /// S_main with the b-sum done inside the W kernel.
    double S_main_contour(FundamentalDiscriminant const & D);

    /// with_circle adds the Cauchy-integral residue (64 complex evaluations of the bundle).
    MainTerm main_term(FundamentalDiscriminant const & D, bool with_circle = false);

    AverageReport average(FundamentalDiscriminant const & D, bool force = false);

    MellinKernel const & v_kernel() const noexcept { return *V_; }

  private:
    struct Prepared {
        FundamentalDiscriminant disc;
        ClassGroupData G;
        std::int64_t X = 0;
        double M = 0;
        std::vector<double> K;  // lambda(n) n^-1/2 sum_b chi(b)/b V(n b^2 / M)
    };
    Prepared const & prepare(FundamentalDiscriminant const & D);
    double class_sum(Prepared const & P, QuadraticForm const & f) const;
    Sym2Evaluator const & sym2();
    cplx sym2_at(cplx s);

    CurveSpec curve_;
    TruncationParams params_;
    std::filesystem::path cache_dir_;
    std::optional<EigenvalueTable> table_;
    std::unique_ptr<MellinKernel> V_;
    std::unique_ptr<KernelTable> Vtab_;
    std::unique_ptr<Sym2Evaluator> sym2_;
    std::map<std::pair<double, double>, cplx> sym2_memo_;
    std::optional<Prepared> prepared_;
};

/*
 * For class number one the theta series is an Eisenstein series and the
 * Rankin-Selberg function factors as L(E, s) L(E x chi_D, s). Returns the
 * derivative at the centre from the rapidly convergent expansions of the
 * odd factor's derivative and the even factor's value.
 */
double factorized_lprime(EigenvalueTable const & table, FundamentalDiscriminant const & D);

/// kappa from the factorized value against the half-weighted double sum on D = -4.
double calibrate_kappa(RankinEngine & engine);

struct ScanRow {
    AverageReport report;
    std::string error;  // empty on success
};

/// One row per D in input order; failures are recorded and the scan continues.
std::vector<ScanRow> discriminant_scan(RankinEngine & engine, std::vector<std::int64_t> const & D_list, bool force);

} // namespace rslab

#endif
