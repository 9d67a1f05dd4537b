#include "rslab/rankin.hpp"

namespace rslab {

namespace {

constexpr double kIdentityTolerance = 1e-8;
constexpr double kImaginaryTolerance = 1e-10;
constexpr double kTableLo = 1e-8;

std::vector<std::int64_t> bad_primes(CurveSpec const & E)
{
    std::vector<std::int64_t> out;
    for (auto [p, e] : factor(E.conductor)) {
        (void)e;
        out.push_back(p);
    }
    return out;
}

std::int64_t rounded_depth(std::int64_t n)
{
    std::int64_t d = 10000;
    while (d < n)
        d *= 2;
    return d;
}

// int_Y^inf t^-a (1 + log t)^3 dt for Y >= 1, a > 1
double log_power_tail(double Y, double a)
{
    double const U = std::log(Y);
    double const k = a - 1.0;
    double const u1 = 1.0 + U;
    double const poly = u1 * u1 * u1 / k + 3.0 * u1 * u1 / (k * k) + 6.0 * u1 / (k * k * k) + 6.0 / (k * k * k * k);
    return std::exp(-k * U) * poly;
}

/*
 * Row-wise sums of c[f(x, y)] over the lattice points with f(x, y) <= X.
 * Rows run in parallel; totals are combined in row order.
 */
template <typename Keep>
double lattice_sum(QuadraticForm const & f, std::int64_t X, std::vector<double> const & c, Keep && keep)
{
    auto const rows = representation_rows(f, X);
    std::vector<double> part(rows.size(), 0.0);
#pragma omp parallel for schedule(dynamic, 8)
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto const & row = rows[i];
        CompensatedSum<double> acc;
        for (std::int64_t x = row.x_lo; x <= row.x_hi; ++x) {
            if ((x == 0 && row.y == 0) || !keep(x, row.y))
                continue;
            acc.add(c[static_cast<std::size_t>(f(x, row.y))]);
        }
        part[i] = acc.value();
    }
    CompensatedSum<double> total;
    for (double v : part)
        total.add(v);
    return total.value();
}

} // namespace

double main_term_constant()
{
    return 24.0 * kLogGlaisher - 3.0 * kEulerGamma - 3.0 * kLog2Pi;
}

void TruncationParams::validate() const
{
    if (!(cutoff_mult >= 1.0 && cutoff_mult <= 200.0))
        throw Error("cutoff_mult must lie in [1, 200], got " + format_double(cutoff_mult));
    if (!(tail_tolerance > 0))
        throw Error("tail_tolerance must be positive");
    if (!(sym2_X >= 100))
        throw Error("sym2 smoothing length must be at least 100");
    kernel.validate();
}

std::string Admissibility::reason() const
{
    if (!coprime)
        return "D shares a prime with the conductor";
    if (product != -1)
        return "epsilon(f) epsilon(f x chi_D) = +1";
    return "";
}

double AverageReport::normalized_err() const
{
    return std::pow(static_cast<double>(-D), (1.0 - 2.0 * kRamanujanTheta) / 16.0) * abs_err();
}

bool AverageReport::identities_hold() const
{
    double const split = S_main + S_0;
    return std::abs(S_direct - split) <= identity_tolerance && std::abs(S_geometric - split) <= identity_tolerance &&
           max_imaginary <= kImaginaryTolerance;
}

nlohmann::json AverageReport::to_json() const
{
    return {{"curve", curve},
            {"D", D},
            {"h", h},
            {"w", w},
            {"sign", sign},
            {"forced", forced},
            {"S_direct", S_direct},
            {"S_geometric", S_geometric},
            {"S_main", S_main},
            {"S_0", S_0},
            {"r", r},
            {"r_closed", r_closed},
            {"abs_err", abs_err()},
            {"normalized_err", normalized_err()},
            {"kappa", kappa},
            {"L1", L1},
            {"sym2_1", sym2_1},
            {"sym2_convention", "imprimitive"},
            {"tail_bound", tail_bound},
            {"cutoff", cutoff},
            {"identities_hold", identities_hold()},
            {"per_character", per_character}};
}

RankinEngine::RankinEngine(CurveSpec curve, TruncationParams params, std::filesystem::path cache_dir)
    : curve_(std::move(curve)), params_(std::move(params)), cache_dir_(std::move(cache_dir))
{
    curve_.validate();
    params_.validate();
    V_ = std::make_unique<MellinKernel>(rslab::v_kernel(params_.kernel));
    Vtab_ = std::make_unique<KernelTable>(*V_, kTableLo, 2.0 * params_.cutoff_mult);
}

EigenvalueTable const & RankinEngine::table(std::int64_t depth)
{
    if (!table_ || table_->n_max < depth)
        table_ = get_or_build_table(curve_, rounded_depth(depth), cache_dir_);
    return *table_;
}

Admissibility RankinEngine::admissibility(FundamentalDiscriminant const & D) const
{
    Admissibility a;
    a.coprime = gcd(D.D, curve_.conductor) == 1;
    if (a.coprime) {
        a.twist_sign = twist_root_number(curve_, D);
        a.product = a.twist_sign * curve_.root_number;
    }
    return a;
}

void RankinEngine::require(FundamentalDiscriminant const & D, bool force) const
{
    auto const a = admissibility(D);
    if (!a.coprime || (!force && !a.admissible()))
        throw Error("D = " + std::to_string(D.D) + " inadmissible for " + curve_.label + ": " + a.reason());
}

std::int64_t RankinEngine::cutoff(FundamentalDiscriminant const & D) const
{
    return static_cast<std::int64_t>(
        std::floor(params_.cutoff_mult * static_cast<double>(D.abs()) * static_cast<double>(curve_.conductor)));
}

double RankinEngine::tail_bound(FundamentalDiscriminant const & D) const
{
    double const X = static_cast<double>(cutoff(D));
    double const logM = std::log(static_cast<double>(D.abs()) * static_cast<double>(curve_.conductor));
    auto const B = static_cast<std::int64_t>(std::floor(std::sqrt(X)));
    double best = std::numeric_limits<double>::infinity();
    for (double sigma : V_->abscissae()) {
        if (sigma < 1.0)
            continue;
        double const a = sigma + 0.5;
        double const logC = std::log(V_->majorant(sigma)) + sigma * logM;
        CompensatedSum<double> acc;
        for (std::int64_t b = 1; b <= B; ++b) {
            double const Y = X / (static_cast<double>(b) * static_cast<double>(b));
            double const T = a * log_power_tail(std::max(Y, 1.0), a);
            acc.add(std::exp(logC - (1.0 + 2.0 * sigma) * std::log(static_cast<double>(b))) * T);
        }
        // b > sqrt X: every n contributes; sum d(n)^2 n^-a <= zeta(a)^4
        double const full = std::pow(zeta_value(a), 4);
        acc.add(std::exp(logC - 2.0 * sigma * std::log(static_cast<double>(B))) / (2.0 * sigma) * full);
        best = std::min(best, 4.0 * acc.value());
    }
    return best;
}

RankinEngine::Prepared const & RankinEngine::prepare(FundamentalDiscriminant const & D)
{
    if (prepared_ && prepared_->disc == D)
        return *prepared_;
    std::int64_t const X = cutoff(D);
    EigenvalueTable const & t = table(X);
    Prepared P;
    P.disc = D;
    P.G = class_group(D);
    P.X = X;
    P.M = static_cast<double>(D.abs()) * static_cast<double>(curve_.conductor);
    auto const chi = character_table(D.D);
    std::int64_t const q = curve_.conductor;
    std::int64_t const m = D.abs();
    // stores lambda(n) K(n) / sqrt(n)
    P.K.assign(static_cast<std::size_t>(X) + 1, 0.0);
    KernelTable const & V = *Vtab_;
    ParallelExceptions errors;
#pragma omp parallel for schedule(dynamic, 1024)
    for (std::int64_t n = 1; n <= X; ++n) {
        double const lam = t.lambda[static_cast<std::size_t>(n)];
        if (lam == 0.0)
            continue;
        errors.run([&] {
            double k = 0;
            for (std::int64_t b = 1; n * b * b <= X; ++b) {
                int const cb = chi[static_cast<std::size_t>(b % m)];
                if (cb == 0 || gcd(b, q) != 1)
                    continue;
                k += cb / static_cast<double>(b) * V(static_cast<double>(n * b * b) / P.M);
            }
            P.K[static_cast<std::size_t>(n)] = lam * k / std::sqrt(static_cast<double>(n));
        });
    }
    errors.rethrow();
    prepared_ = std::move(P);
    return *prepared_;
}

double RankinEngine::class_sum(Prepared const & P, QuadraticForm const & f) const
{
    return lattice_sum(f, P.X, P.K, [](std::int64_t, std::int64_t) { return true; });
}

double RankinEngine::lprime_central(FundamentalDiscriminant const & D, ClassCharacter const & chi, bool force)
{
    require(D, force);
    Prepared const & P = prepare(D);
    auto const theta = r_chi(P.G, chi, P.X);
    double const v = blocked_sum<double>(P.X, [&](std::int64_t i) {
        auto const n = static_cast<std::size_t>(i + 1);
        return P.K[n] == 0.0 ? 0.0 : theta.r[n].real() * P.K[n];
    });
    return 4.0 * v;
}

std::vector<cplx> RankinEngine::lprime_all(FundamentalDiscriminant const & D, bool force)
{
    require(D, force);
    Prepared const & P = prepare(D);
    auto const & G = P.G;
    std::vector<double> A(static_cast<std::size_t>(G.h));
    for (int i = 0; i < G.h; ++i)
        A[static_cast<std::size_t>(i)] = class_sum(P, G.forms[static_cast<std::size_t>(i)]) / G.w;
    std::vector<cplx> out;
    for (auto const & chi : characters(G)) {
        CompensatedSum<cplx> acc;
        for (int i = 0; i < G.h; ++i)
            acc.add(character_value(G, chi, G.inverse[static_cast<std::size_t>(i)]) * A[static_cast<std::size_t>(i)]);
        out.push_back(4.0 * acc.value());
    }
    return out;
}

double RankinEngine::average_direct(FundamentalDiscriminant const & D, bool force)
{
    auto const v = lprime_all(D, force);
    CompensatedSum<double> acc;
    for (cplx z : v)
        acc.add(z.real());
    return acc.value() / static_cast<double>(v.size());
}

RankinEngine::Geometric RankinEngine::average_geometric(FundamentalDiscriminant const & D, bool force)
{
    require(D, force);
    Prepared const & P = prepare(D);
    QuadraticForm const Q0 = P.G.forms[0];
    double const w = P.G.w;
    Geometric g;
    g.S_geometric = 4.0 / w * lattice_sum(Q0, P.X, P.K, [](std::int64_t, std::int64_t) { return true; });
    g.S_main = 8.0 / w * lattice_sum(Q0, P.X, P.K, [](std::int64_t x, std::int64_t y) { return y == 0 && x > 0; });
    g.S_0 = 8.0 / w * lattice_sum(Q0, P.X, P.K, [](std::int64_t, std::int64_t y) { return y > 0; });
    return g;
}

double RankinEngine::S_main_contour(FundamentalDiscriminant const & D)
{
    std::int64_t const X = cutoff(D);
    EigenvalueTable const & t = table(X);
    auto const removed = bad_primes(curve_);
    double const M = static_cast<double>(D.abs()) * static_cast<double>(curve_.conductor);
    MellinKernel const W = w_kernel([D, removed](cplx z) { return l_chi(z, D, removed); }, params_.kernel);
    CompensatedSum<double> acc;
    for (std::int64_t g = 1; g * g <= X; ++g) {
        double const lam = t.lambda[static_cast<std::size_t>(g * g)];
        if (lam != 0.0)
            acc.add(lam / static_cast<double>(g) * W.at(static_cast<double>(g * g) / M).value);
    }
    return 4.0 / D.units() * acc.value();
}

Sym2Evaluator const & RankinEngine::sym2()
{
    if (!sym2_) {
        EigenvalueTable const & t = table(Sym2Evaluator::depth_for(params_.sym2_X));
        sym2_ = std::make_unique<Sym2Evaluator>(t, params_.sym2_X);
    }
    return *sym2_;
}

cplx RankinEngine::sym2_at(cplx s)
{
    auto const key = std::make_pair(s.real(), s.imag());
    if (auto it = sym2_memo_.find(key); it != sym2_memo_.end())
        return it->second;
    cplx const v = sym2().imprimitive(s);
    sym2_memo_.emplace(key, v);
    return v;
}

MainTerm RankinEngine::main_term(FundamentalDiscriminant const & D, bool with_circle)
{
    if (gcd(D.D, curve_.conductor) != 1)
        throw Error("main term: D must be coprime to the conductor");
    auto const removed = bad_primes(curve_);
    double const logM = std::log(static_cast<double>(D.abs()) * static_cast<double>(curve_.conductor));
    KernelSpec const spec = params_.kernel;
    auto G = [&](cplx s) {
        cplx const z = 2.0 * s + 1.0;
        cplx const L = l_chi(z, D, removed);
        return L * sym2_at(z) / zeta(4.0 * s + 2.0) * std::exp(log_gamma_bundle(s, spec) + s * logM);
    };
    MainTerm mt;
    mt.residue = residue_at_zero(G);
    double const w = D.units();
    mt.r = 4.0 / w * mt.residue.R1;
    if (with_circle)
        mt.r_circle = 4.0 / w * residue_circle(G).R1;

    auto const [L, dL] = l_chi_with_derivative(1.0, D);
    mt.L1 = L.real();
    mt.Lprime1 = dL.real();
    auto const [S, dS] = sym2().imprimitive_with_derivative(1.0);
    mt.sym2_1 = S.real();
    double Lq = mt.L1;
    double logdLq = mt.Lprime1 / mt.L1;
    for (std::int64_t p : removed) {
        double const c = kronecker_symbol(D.D, p);
        Lq *= 1.0 - c / static_cast<double>(p);
        logdLq += c * std::log(static_cast<double>(p)) / (static_cast<double>(p) - c);
    }
    double const zeta2 = kPi * kPi / 6.0;
    double const dlogzeta2 = kLog2Pi + kEulerGamma - 12.0 * kLogGlaisher;
    double const gamma_part = digamma(spec.gamma_a) + digamma(spec.gamma_b) - 2.0 * kLog2Pi;
    double const G0 = Lq * mt.sym2_1 / zeta2 * std::exp(log_gamma(spec.gamma_a) + log_gamma(spec.gamma_b));
    mt.r_closed = 4.0 / w * G0 *
                  (2.0 * logdLq + 2.0 * dS.real() / S.real() - 4.0 * dlogzeta2 + gamma_part + logM);
    return mt;
}

AverageReport RankinEngine::average(FundamentalDiscriminant const & D, bool force)
{
    require(D, force);
    auto const adm = admissibility(D);
    AverageReport rep;
    rep.curve = curve_.label;
    rep.D = D.D;
    rep.sign = adm.product;
    rep.forced = !adm.admissible();
    auto const vals = lprime_all(D, force);
    Prepared const & P = prepare(D);
    rep.h = P.G.h;
    rep.w = P.G.w;
    rep.cutoff = P.X;
    CompensatedSum<double> acc;
    for (cplx z : vals) {
        acc.add(z.real());
        rep.per_character.push_back(z.real());
        rep.max_imaginary = std::max(rep.max_imaginary, std::abs(z.imag()));
    }
    rep.S_direct = acc.value() / static_cast<double>(vals.size());
    auto const g = average_geometric(D, force);
    rep.S_geometric = g.S_geometric;
    rep.S_main = g.S_main;
    rep.S_0 = g.S_0;
    auto const mt = main_term(D);
    rep.r = mt.r;
    rep.r_closed = mt.r_closed;
    rep.L1 = mt.L1;
    rep.sym2_1 = mt.sym2_1;
    rep.tail_bound = tail_bound(D);
    rep.identity_tolerance = kIdentityTolerance;
    return rep;
}

double factorized_lprime(EigenvalueTable const & table, FundamentalDiscriminant const & D)
{
    CurveSpec const & E = table.curve;
    if (class_group(D).h != 1)
        throw Error("factorized_lprime: class number one only");
    int const eps = E.root_number;
    int const eps_D = twist_root_number(E, D);
    if (eps * eps_D != -1)
        throw Error("factorized_lprime: needs opposite root numbers");
    double const N = static_cast<double>(E.conductor);
    double const ND = N * static_cast<double>(D.abs()) * static_cast<double>(D.abs());
    auto const n_needed = static_cast<std::int64_t>(std::ceil(45.0 * std::sqrt(ND) / (2.0 * kPi))) + 1;
    if (table.n_max < n_needed)
        throw Error("factorized_lprime: table depth " + std::to_string(table.n_max) + " below " +
                    std::to_string(n_needed));
    // odd factor: L'(1) = 2 sum a_n/n E1(2 pi n / sqrt N); even: L(1) = 2 sum a_n/n exp(-2 pi n / sqrt N)
    auto series = [&](double cond, bool twisted, bool odd) {
        CompensatedSum<double> acc;
        for (std::int64_t n = 1; n <= table.n_max; ++n) {
            double const x = 2.0 * kPi * static_cast<double>(n) / std::sqrt(cond);
            if (x > 45.0)
                break;
            double an = static_cast<double>(table.a[static_cast<std::size_t>(n)]);
            if (twisted)
                an *= kronecker_symbol(D.D, n);
            if (an == 0.0)
                continue;
            double const k = odd ? -std::expint(-x) : std::exp(-x);
            acc.add(an / static_cast<double>(n) * k);
        }
        return 2.0 * acc.value();
    };
    if (eps == -1)
        return series(N, false, true) * series(ND, true, false);
    return series(N, false, false) * series(ND, true, true);
}

double calibrate_kappa(RankinEngine & engine)
{
    auto const D = FundamentalDiscriminant::from_discriminant(-4);
    double const target = factorized_lprime(engine.table(engine.cutoff(D)), D);
    double const half_sum = engine.average_direct(D, true) / kKappa;
    return target / half_sum;
}

std::vector<ScanRow> discriminant_scan(RankinEngine & engine, std::vector<std::int64_t> const & D_list, bool force)
{
    std::vector<ScanRow> rows;
    std::int64_t depth = 0;
    for (std::int64_t d : D_list)
        if (is_fundamental_discriminant(d))
            depth = std::max(depth, engine.cutoff(FundamentalDiscriminant::from_discriminant(d)));
    if (depth > 0)
        engine.table(depth);
    for (std::int64_t d : D_list) {
        ScanRow row;
        row.report.curve = engine.curve().label;
        row.report.D = d;
        try {
            row.report = engine.average(FundamentalDiscriminant::from_discriminant(d), force);
            if (!row.report.identities_hold())
                row.error = "identity check failed";
        } catch (Error const & e) {
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace rslab
