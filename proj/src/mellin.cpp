#include "rslab/mellin.hpp"

#include <limits>

namespace rslab {

namespace {

std::vector<double> const kDefaultAbscissae = {0.5, 0.75, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0, 6.0,
                                               8.0, 10.0, 12.0, 15.0, 20.0, 25.0, 30.0, 40.0, 50.0};

constexpr double kMaxHeight = 800.0;
constexpr double kEnvelopeCut = 1e-18;

} // namespace

void KernelSpec::validate() const
{
    if (dt <= 0)
        throw Error("KernelSpec: dt must be positive");
    if (T < 0)
        throw Error("KernelSpec: T must be nonnegative (0 = automatic)");
    if (sigma < 0)
        throw Error("KernelSpec: sigma must be positive (0 = automatic)");
    if (degree != 1)
        throw Error("KernelSpec: only degree 1 is instantiated");
    if (cos_exponent < 0 || cos_scale <= 0)
        throw Error("KernelSpec: bad mollifier parameters");
    if (!(gamma_a > 0) || !(gamma_b > 0))
        throw Error("KernelSpec: gamma shifts must be positive");
    if (sigma > 0) {
        // poles of the mollifier sit at odd multiples of cos_scale/2
        double const k = sigma / (cos_scale / 2.0);
        if (sigma >= cos_scale / 2.0 || std::abs(k - std::round(k)) < 1e-9)
            throw Error("KernelSpec: sigma = " + format_double(sigma) + " reaches a pole of the mollifier");
    }
}

cplx log_gamma_bundle(cplx s, KernelSpec const & spec)
{
    double const d = spec.degree;
    cplx const c = std::cos(kPi * s / spec.cos_scale);
    return d * (log_gamma(s + spec.gamma_a) + log_gamma(s + spec.gamma_b)) -
           static_cast<double>(spec.cos_exponent) * std::log(c) - 2.0 * d * s * kLog2Pi;
}

Residue residue_at_zero(std::function<cplx(cplx)> const & G, double h)
{
    auto diff = [&](double step) { return (G(cplx{step, 0}) - G(cplx{-step, 0})) / (2.0 * step); };
    Residue r;
    r.R0 = G(cplx{0, 0}).real();
    r.R1 = ((4.0 * diff(h / 2) - diff(h)) / 3.0).real();
    return r;
}

Residue residue_circle(std::function<cplx(cplx)> const & G, double radius, int nodes)
{
    CompensatedSum<cplx> s0, s1;
    for (int k = 0; k < nodes; ++k) {
        cplx const s = std::polar(radius, 2.0 * kPi * k / nodes);
        cplx const g = G(s);
        s0.add(g);
        s1.add(g / s);
    }
    return {s0.value().real() / nodes, s1.value().real() / nodes};
}

MellinKernel::MellinKernel(std::function<cplx(cplx)> logG, KernelSpec spec, double norm,
                           std::vector<double> candidates, std::optional<Residue> residue_at_origin)
    : logG_(std::move(logG)), spec_(spec), norm_(norm), residue_(residue_at_origin)
{
    spec_.validate();
    if (spec_.sigma > 0)
        candidates = {spec_.sigma};
    if (candidates.empty())
        throw Error("MellinKernel: no admissible abscissa");
    lines_.resize(candidates.size());
    ParallelExceptions errors;
#pragma omp parallel for schedule(dynamic, 1)
    for (std::size_t i = 0; i < candidates.size(); ++i)
        errors.run([&] { lines_[i] = make_line(candidates[i]); });
    errors.rethrow();
    if (residue_)
        left_ = make_line(-0.5 * std::min(spec_.gamma_a, spec_.gamma_b));
}

MellinKernel::Line MellinKernel::make_line(double sigma) const
{
    Line L;
    L.sigma = sigma;
    cplx const s0{sigma, 0};
    L.log_scale = (logG_(s0) - 2.0 * std::log(s0)).real();
    double const dt = spec_.dt;
    double const cut = std::log(kEnvelopeCut);
    double t_end = spec_.T > 0 ? spec_.T : kMaxHeight;
    double last_rel = 0;
    for (std::int64_t k = 0;; ++k) {
        double const t = static_cast<double>(k) * dt;
        if (t > t_end + 1e-12)
            break;
        cplx const s{sigma, t};
        cplx const lg = logG_(s) - 2.0 * std::log(s) - L.log_scale;
        last_rel = std::exp(lg.real());
        L.t.push_back(t);
        L.s.push_back(s);
        L.g.push_back((k == 0 ? 0.5 : 1.0) * std::exp(lg));
        if (spec_.T <= 0 && t > 5.0 && lg.real() < cut)
            break;
    }
    L.T = L.t.back();
    // the envelope decays at least like exp(-pi t) past the cutoff
    L.tail = last_rel / kPi;
    if (L.tail > spec_.tolerance)
        throw ToleranceError("kernel quadrature: truncation at T = " + format_double(L.T) + " on sigma = " +
                                 format_double(sigma) + " leaves relative tail " + format_double(L.tail),
                             L.tail);
    return L;
}

KernelValue MellinKernel::integrate(Line const & L, double x) const
{
    double const u = std::log(x);
    CompensatedSum<double> v, d;
    for (std::size_t k = 0; k < L.t.size(); ++k) {
        cplx const e = L.g[k] * std::polar(1.0, -L.t[k] * u);
        v.add(e.real());
        d.add((-L.s[k] * e).real());
    }
    double const factor = norm_ * std::exp(L.log_scale - L.sigma * u) * spec_.dt / kPi;
    // distance from the line to the nearest singularity bounds the trapezoid error
    double dist = std::min(std::abs(L.sigma), spec_.cos_scale / 2.0 - L.sigma);
    if (L.sigma < 0)
        dist = std::min(std::abs(L.sigma), std::min(spec_.gamma_a, spec_.gamma_b) + L.sigma);
    double const tau = 0.8 * dist;
    double const disc = std::exp(-2.0 * kPi * tau / spec_.dt + tau * std::abs(u));
    KernelValue kv;
    kv.value = factor * v.value();
    kv.du = factor * d.value();
    kv.sigma = L.sigma;
    kv.error_estimate = std::abs(factor) * (L.tail + disc) * std::max(1.0, L.T) + std::abs(kv.value) * 1e-15;
    return kv;
}

KernelValue MellinKernel::at(double x) const
{
    if (!(x > 0))
        throw Error("kernel: x must be positive, got " + format_double(x));
    if (x < 1.0 && left_ && spec_.sigma <= 0) {
        KernelValue kv = integrate(*left_, x);
        double const lx = std::log(x);
        kv.value += norm_ * (residue_->R1 - residue_->R0 * lx);
        kv.du += -norm_ * residue_->R0;
        return kv;
    }
    double const u = std::log(x);
    std::size_t best = 0;
    double best_score = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < lines_.size(); ++i) {
        double const score = lines_[i].log_scale - lines_[i].sigma * u;
        if (score < best_score) {
            best_score = score;
            best = i;
        }
    }
    return integrate(lines_[best], x);
}

KernelValue MellinKernel::at(double x, double sigma) const
{
    if (!(x > 0))
        throw Error("kernel: x must be positive, got " + format_double(x));
    for (auto const & L : lines_)
        if (L.sigma == sigma)
            return integrate(L, x);
    KernelSpec probe = spec_;
    probe.sigma = sigma;
    probe.validate();
    return integrate(make_line(sigma), x);
}

double MellinKernel::majorant(double sigma) const
{
    auto bound = [&](Line const & L) {
        CompensatedSum<double> acc;
        for (cplx const & g : L.g)
            acc.add(std::abs(g));
        return std::abs(norm_) * std::exp(L.log_scale) * spec_.dt / kPi * acc.value() * (1.0 + L.tail);
    };
    for (auto const & L : lines_)
        if (L.sigma == sigma)
            return bound(L);
    KernelSpec probe = spec_;
    probe.sigma = sigma;
    probe.validate();
    return bound(make_line(sigma));
}

std::vector<double> MellinKernel::abscissae() const
{
    std::vector<double> out;
    for (auto const & L : lines_)
        out.push_back(L.sigma);
    return out;
}

Residue v_residue_exact(KernelSpec const & spec)
{
    double const g0 = std::exp(log_gamma(spec.gamma_a) + log_gamma(spec.gamma_b));
    return {g0, g0 * (digamma(spec.gamma_a) + digamma(spec.gamma_b) - 2.0 * kLog2Pi)};
}

MellinKernel v_kernel(KernelSpec const & spec)
{
    return MellinKernel([spec](cplx s) { return log_gamma_bundle(s, spec); }, spec, 0.5, kDefaultAbscissae,
                        v_residue_exact(spec));
}

MellinKernel w_kernel(std::function<cplx(cplx)> L, KernelSpec const & spec)
{
    if (spec.sigma > 0 && 2.0 * spec.sigma + 1.0 < 1.2)
        throw Error("W kernel: sigma = " + format_double(spec.sigma) + " puts the L-factor below Re = 1.2");
    std::vector<double> candidates;
    for (double s : kDefaultAbscissae)
        if (s >= 2.0)
            candidates.push_back(s);
    auto logG = [spec, L = std::move(L)](cplx s) { return std::log(L(2.0 * s + 1.0)) + log_gamma_bundle(s, spec); };
    return MellinKernel(std::move(logG), spec, 1.0, candidates, std::nullopt);
}

KernelTable::KernelTable(MellinKernel const & kernel, double x_min, double x_max, double h_u)
    : kernel_(kernel), u0_(std::log(x_min)), h_(h_u)
{
    if (!(x_min > 0) || !(x_max > x_min) || !(h_u > 0))
        throw Error("KernelTable: bad grid");
    auto const n = static_cast<std::size_t>(std::ceil((std::log(x_max) - u0_) / h_)) + 1;
    v_.resize(n);
    dv_.resize(n);
    ParallelExceptions errors;
#pragma omp parallel for schedule(dynamic, 16)
    for (std::size_t j = 0; j < n; ++j)
        errors.run([&] {
            auto const kv = kernel_.at(std::exp(u0_ + h_ * static_cast<double>(j)));
            v_[j] = kv.value;
            dv_[j] = kv.du;
        });
    errors.rethrow();
}

double KernelTable::operator()(double x) const
{
    double const pos = (std::log(x) - u0_) / h_;
    if (!(pos >= 0) || pos >= static_cast<double>(v_.size() - 1))
        return kernel_.at(x).value;
    auto const j = static_cast<std::size_t>(pos);
    double const t = pos - static_cast<double>(j);
    double const t2 = t * t, t3 = t2 * t;
    double const h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
    double const h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    return h00 * v_[j] + h10 * h_ * dv_[j] + h01 * v_[j + 1] + h11 * h_ * dv_[j + 1];
}

} // namespace rslab
