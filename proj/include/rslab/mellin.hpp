#ifndef RSLAB_MELLIN_HPP
#define RSLAB_MELLIN_HPP

#include <functional>
#include <optional>
#include <vector>

#include "rslab/numeric.hpp"

namespace rslab {

struct KernelSpec {
    int cos_exponent = 200;
    double cos_scale = 200.0;  // the mollifier is cos(pi s / cos_scale)^-cos_exponent
    double sigma = 0.0;        // 0 lets the kernel pick an abscissa per x
    double T = 0.0;            // 0 picks the height from the integrand envelope
    double dt = 0.05;
    int degree = 1;
    // Gamma(s + gamma_a) Gamma(s + gamma_b); (1, 1) is the weight (2, 1) Rankin-Selberg factor
    double gamma_a = 1.0;
    double gamma_b = 1.0;
    double tolerance = 1e-13;  // relative to the integrand scale on the line

    void validate() const;
};

/// log[Gamma(s+a)^d Gamma(s+b)^d cos(pi s/c)^-k (2 pi)^(-2 d s)]
cplx log_gamma_bundle(cplx s, KernelSpec const & spec);

struct Residue {
    double R0 = 0;
    double R1 = 0;
};

/*
 * Residue data at the double pole s = 0 of G(s) x^-s / s^2: R0 = G(0), R1 = G'(0).
 * Centered differences with one Richardson step.
 */
Residue residue_at_zero(std::function<cplx(cplx)> const & G, double h = 1e-3);

/// Independent oracle: Cauchy integrals of G/s and G/s^2 on |s| = radius.
Residue residue_circle(std::function<cplx(cplx)> const & G, double radius = 0.125, int nodes = 64);

struct KernelValue {
    double value = 0;
    double du = 0;  // derivative in u = log x
    double sigma = 0;
    double error_estimate = 0;
};

/*
 * K(x) = norm * (1/2 pi i) int_(sigma) exp(logG(s)) x^-s ds / s^2, evaluated by
 * the trapezoid rule on the half line t >= 0 (the integrand is Schwarz
 * symmetric). Lines for the candidate abscissae are precomputed.
 */
class MellinKernel {
  public:
    MellinKernel(std::function<cplx(cplx)> logG, KernelSpec spec, double norm,
                 std::vector<double> candidates, std::optional<Residue> residue_at_origin);

    /// Abscissa chosen per x; x < 1 uses the line at -1/2 plus the residue when available.
    KernelValue at(double x) const;
    KernelValue at(double x, double sigma) const;

    /// C with |K(x)| <= C x^-sigma for all x > 0, from the absolute line integral.
    double majorant(double sigma) const;
    std::vector<double> abscissae() const;

    KernelSpec const & spec() const noexcept { return spec_; }
    double norm() const noexcept { return norm_; }
    std::optional<Residue> residue() const noexcept { return residue_; }

  private:
    struct Line {
        double sigma = 0;
        double T = 0;
        double log_scale = 0;  // log max_t |G/s^2| on the line
        double tail = 0;       // relative truncation estimate
        std::vector<double> t;
        std::vector<cplx> g;   // weighted G(s)/s^2
        std::vector<cplx> s;
    };

    Line make_line(double sigma) const;
    KernelValue integrate(Line const & L, double x) const;

    std::function<cplx(cplx)> logG_;
    KernelSpec spec_;
    double norm_;
    std::optional<Residue> residue_;
    std::vector<Line> lines_;
    std::optional<Line> left_;
};

/// V(x) = (1/4 pi i) int Gamma(s+a)Gamma(s+b) cos(pi s/200)^-200 (2 pi)^-2s x^-s ds/s^2.
MellinKernel v_kernel(KernelSpec const & spec = {});

/// Residue data of the V integrand without the 1/2: R0 = G(0), R1 = G(0)(psi(a) + psi(b) - 2 log 2 pi).
Residue v_residue_exact(KernelSpec const & spec = {});

/*
 * W(x) = (1/2 pi i) int L(2s+1) Gamma(s+a)Gamma(s+b) cos^-200 (2 pi)^-2s x^-s ds/s^2
 * for a caller-supplied L evaluator, on abscissae sigma >= 2 unless spec.sigma is set
 * (which must keep 2 sigma + 1 >= 1.2). With L = 1 this is 2 V.
 */
MellinKernel w_kernel(std::function<cplx(cplx)> L, KernelSpec const & spec = {});

/*
 * Cubic Hermite interpolation of a kernel on a uniform grid in log x.
 * Outside [x_min, x_max] the kernel is evaluated directly.
 */
class KernelTable {
  public:
    KernelTable(MellinKernel const & kernel, double x_min, double x_max, double h_u = 1.0 / 128);

    double operator()(double x) const;
    double x_min() const noexcept { return std::exp(u0_); }
    double x_max() const noexcept { return std::exp(u0_ + h_ * static_cast<double>(v_.size() - 1)); }
    double step() const noexcept { return h_; }

  private:
    MellinKernel kernel_;
    double u0_;
    double h_;
    std::vector<double> v_;
    std::vector<double> dv_;
};

} // namespace rslab

#endif
