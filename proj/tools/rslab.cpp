#include <omp.h>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "rslab/quadseq.hpp"
#include "rslab/rankin.hpp"
#include "rslab/run_config.hpp"

using namespace rslab;

namespace {

constexpr int kExitIdentityFailure = 2;

std::string join_row(std::vector<std::string> const & cells)
{
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i)
            line += ',';
        line += cells[i];
    }
    return line + '\n';
}

std::string csv_escape(std::string s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c == '\n' ? ' ' : c;
    }
    return out + '"';
}

void emit(RunConfig const & cfg, std::string const & text)
{
    if (cfg.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(cfg.out, std::ios::binary | std::ios::trunc);
    if (!f)
        throw Error("cannot write " + cfg.out);
    f << text;
}

CurveSpec load_curve(RunConfig const & cfg)
{
    if (cfg.curve.empty())
        throw Error("--curve is required for this verb");
    return CurveSpec::load(cfg.curve);
}

int cmd_classgroup(RunConfig const & cfg)
{
    nlohmann::json arr = nlohmann::json::array();
    std::string csv = join_row({"D", "h", "w", "structure", "forms", "error"});
    for (std::int64_t d : cfg.discriminants()) {
        try {
            auto const G = class_group(FundamentalDiscriminant::from_discriminant(d));
            arr.push_back(to_json(G));
            std::string structure;
            for (auto const & g : G.generators)
                structure += (structure.empty() ? "" : "x") + std::to_string(g.order);
            csv += join_row({std::to_string(d), std::to_string(G.h), std::to_string(G.w),
                             structure.empty() ? "1" : structure, std::to_string(G.forms.size()), ""});
        } catch (Error const & e) {
            std::cerr << "rslab: " << e.what() << '\n';
            arr.push_back({{"D", d}, {"error", e.what()}});
            csv += join_row({std::to_string(d), "", "", "", "", csv_escape(e.what())});
        }
    }
    emit(cfg, cfg.format == "json" ? arr.dump(2) + '\n' : csv);
    return 0;
}

int cmd_average(RunConfig const & cfg, bool single)
{
    auto const discs = cfg.discriminants();
    if (single && discs.size() != 1)
        throw Error("average takes exactly one discriminant (--disc D); use scan for ranges");
    RankinEngine engine(load_curve(cfg), cfg.truncation(), cfg.cache);

    // pre-flight: invalid D become failure rows, inadmissible D are skipped unless forced
    std::vector<std::int64_t> run;
    std::vector<ScanRow> invalid;
    for (std::int64_t d : discs) {
        FundamentalDiscriminant fd;
        try {
            fd = FundamentalDiscriminant::from_discriminant(d);
        } catch (Error const & e) {
            ScanRow row;
            row.report.curve = engine.curve().label;
            row.report.D = d;
            row.error = e.what();
            invalid.push_back(row);
            continue;
        }
        auto const a = engine.admissibility(fd);
        if (!a.coprime || (!a.admissible() && !cfg.force)) {
            std::cerr << "rslab: skip D = " << d << ": " << a.reason() << '\n';
            continue;
        }
        if (!a.admissible())
            std::cerr << "rslab: forcing D = " << d << " with sign product " << a.product << '\n';
        run.push_back(d);
    }
    auto rows = discriminant_scan(engine, run, cfg.force);
    // restore input order for the invalid rows
    std::vector<ScanRow> ordered;
    std::size_t ri = 0, ii = 0;
    for (std::int64_t d : discs) {
        if (ii < invalid.size() && invalid[ii].report.D == d)
            ordered.push_back(invalid[ii++]);
        else if (ri < rows.size() && rows[ri].report.D == d)
            ordered.push_back(rows[ri++]);
    }

    bool any_error = false;
    for (auto const & r : ordered)
        any_error = any_error || !r.error.empty();

    if (cfg.format == "json") {
        nlohmann::json arr = nlohmann::json::array();
        for (auto const & r : ordered) {
            nlohmann::json j = r.error.empty() || r.report.h > 0 ? r.report.to_json()
                                                                : nlohmann::json{{"curve", r.report.curve}, {"D", r.report.D}};
            if (!r.error.empty())
                j["error"] = r.error;
            arr.push_back(j);
        }
        emit(cfg, arr.dump(2) + '\n');
    } else {
        std::vector<std::string> head = {"D", "h", "S_direct", "S_geometric", "S_main", "S_0", "r", "abs_err",
                                         "normalized_err"};
        if (any_error)
            head.push_back("error");
        std::string out = join_row(head);
        for (auto const & r : ordered) {
            auto const & p = r.report;
            std::vector<std::string> cells;
            if (p.h > 0) {
                cells = {std::to_string(p.D), std::to_string(p.h), format_double(p.S_direct),
                         format_double(p.S_geometric), format_double(p.S_main), format_double(p.S_0),
                         format_double(p.r), format_double(p.abs_err()), format_double(p.normalized_err())};
            } else {
                cells = {std::to_string(p.D), "", "", "", "", "", "", "", ""};
            }
            if (any_error)
                cells.push_back(csv_escape(r.error));
            out += join_row(cells);
        }
        emit(cfg, out);
    }
    return any_error ? kExitIdentityFailure : 0;
}

int cmd_series(RunConfig const & cfg)
{
    auto const [b_lo, b_hi] = cfg.b_range;
    std::int64_t const worst = std::max(std::abs(b_lo), std::abs(b_hi));
    std::int64_t const depth = cfg.n_max > 0 ? cfg.n_max : std::max<std::int64_t>(1000000, 100 * worst);
    CoefficientSource src;
    std::optional<EigenvalueTable> table;
    if (cfg.curve == "unit") {
        src = CoefficientSource::unit();
    } else {
        table = get_or_build_table(load_curve(cfg), depth, cfg.cache);
        src = CoefficientSource::from_table(*table);
    }
    nlohmann::json arr = nlohmann::json::array();
    std::string csv = join_row({"b", "s", "value", "tail_bound"});
    bool any_error = false;
    for (std::int64_t b = b_lo; b <= b_hi; ++b) {
        try {
            auto const pt = series_eval(src, QuadPoly{cfg.a, b}, cplx{cfg.s, 0}, depth);
            arr.push_back({{"a", cfg.a}, {"b", b}, {"s", cfg.s}, {"value", pt.value.real()},
                           {"tail_bound", pt.tail_bound}, {"truncation", pt.truncation}});
            csv += join_row({std::to_string(b), format_double(cfg.s), format_double(pt.value.real()),
                             format_double(pt.tail_bound)});
        } catch (Error const & e) {
            any_error = true;
            std::cerr << "rslab: b = " << b << ": " << e.what() << '\n';
            arr.push_back({{"a", cfg.a}, {"b", b}, {"error", e.what()}});
        }
    }
    emit(cfg, cfg.format == "json" ? arr.dump(2) + '\n' : csv);
    return any_error ? 1 : 0;
}

int cmd_kernels(RunConfig const & cfg)
{
    TruncationParams const params = cfg.truncation();
    MellinKernel const V = v_kernel(params.kernel);
    auto const res = v_residue_exact(params.kernel);
    auto const discs = cfg.discriminants();
    auto const D = FundamentalDiscriminant::from_discriminant(discs.empty() ? -4 : discs.front());
    std::vector<std::int64_t> removed;
    if (!cfg.curve.empty())
        for (auto [p, e] : factor(load_curve(cfg).conductor)) {
            (void)e;
            removed.push_back(p);
        }
    KernelSpec wspec = params.kernel;
    if (wspec.sigma > 0 && wspec.sigma < 2.0)
        wspec.sigma = 0;
    MellinKernel const W = w_kernel([D, removed](cplx z) { return l_chi(z, D, removed); }, wspec);
    nlohmann::json arr = nlohmann::json::array();
    std::string csv = join_row({"x", "V", "V_log_law", "W"});
    for (double x : cfg.x_grid) {
        double const v = V.at(x).value;
        double const law = 0.5 * (res.R1 - res.R0 * std::log(x));
        double const w = W.at(x).value;
        arr.push_back({{"x", x}, {"V", v}, {"V_log_law", law}, {"W", w}});
        csv += join_row({format_double(x), format_double(v), format_double(law), format_double(w)});
    }
    emit(cfg, cfg.format == "json" ? arr.dump(2) + '\n' : csv);
    return 0;
}

} // namespace

int main(int argc, char ** argv)
{
    CLI::App app{"rslab: class group averages of Rankin-Selberg central derivatives"};
    std::string verb, config_path;
    std::string curve, disc, disc_range, out, format, cache, b_range, x_grid;
    int jobs = 0;
    bool force = false;
    double kernel_sigma = 0, kernel_T = 0, cutoff_mult = 0, s = 0;
    std::int64_t a = 0, n_max = 0;

    app.add_option("verb", verb, "classgroup | average | scan | series | kernels")
        ->required()
        ->check(CLI::IsMember({"classgroup", "average", "scan", "series", "kernels"}));
    auto * o_config = app.add_option("--config", config_path, "JSON config; flags override its keys");
    auto * o_curve = app.add_option("--curve", curve, "curve JSON file ('unit' for the lambda = 1 source in series)");
    auto * o_disc = app.add_option("--disc", disc, "discriminant or comma-separated list");
    auto * o_range = app.add_option("--disc-range", disc_range, "LO:HI, fundamental D only");
    auto * o_out = app.add_option("--out", out, "output file (default stdout)");
    auto * o_format = app.add_option("--format", format, "csv | json");
    auto * o_cache = app.add_option("--cache", cache, "eigenvalue cache directory");
    auto * o_jobs = app.add_option("--jobs", jobs, "threads (0 = OpenMP default)");
    auto * o_force = app.add_flag("--force", force, "compute inadmissible D anyway");
    auto * o_sigma = app.add_option("--kernel-sigma", kernel_sigma, "fixed contour abscissa");
    auto * o_T = app.add_option("--kernel-T", kernel_T, "fixed truncation height");
    auto * o_cut = app.add_option("--cutoff-mult", cutoff_mult, "n b^2 cutoff in units of |D| N");
    auto * o_a = app.add_option("--a", a, "series: linear coefficient");
    auto * o_b = app.add_option("--b-range", b_range, "series: LO:HI");
    auto * o_s = app.add_option("--s", s, "series: real s");
    auto * o_nmax = app.add_option("--n-max", n_max, "series: truncation in P(gamma)");
    auto * o_grid = app.add_option("--x-grid", x_grid, "kernels: comma-separated x values");

    try {
        app.parse(argc, argv);
    } catch (CLI::ParseError const & e) {
        return app.exit(e);
    }

    try {
        nlohmann::json j = nlohmann::json::object();
        if (*o_config) {
            std::ifstream f(config_path);
            if (!f)
                throw Error("cannot open config " + config_path);
            try {
                j = nlohmann::json::parse(f);
            } catch (nlohmann::json::exception const & e) {
                throw Error("config " + config_path + ": " + e.what());
            }
        }
        j["verb"] = verb;
        if (*o_curve)
            j["curve"] = curve;
        if (*o_disc)
            j["disc"] = disc;
        if (*o_range)
            j["disc-range"] = disc_range;
        if (*o_out)
            j["out"] = out;
        if (*o_format)
            j["format"] = format;
        if (*o_cache)
            j["cache"] = cache;
        if (*o_jobs)
            j["jobs"] = jobs;
        if (*o_force)
            j["force"] = force;
        if (*o_sigma)
            j["kernel-sigma"] = kernel_sigma;
        if (*o_T)
            j["kernel-T"] = kernel_T;
        if (*o_cut)
            j["cutoff-mult"] = cutoff_mult;
        if (*o_a)
            j["a"] = a;
        if (*o_b)
            j["b-range"] = b_range;
        if (*o_s)
            j["s"] = s;
        if (*o_nmax)
            j["n-max"] = n_max;
        if (*o_grid)
            j["x-grid"] = x_grid;
        RunConfig const cfg = RunConfig::from_json(j);
        if (cfg.jobs > 0)
            omp_set_num_threads(cfg.jobs);

        if (cfg.verb == "classgroup")
            return cmd_classgroup(cfg);
        if (cfg.verb == "average")
            return cmd_average(cfg, true);
        if (cfg.verb == "scan")
            return cmd_average(cfg, false);
        if (cfg.verb == "series")
            return cmd_series(cfg);
        return cmd_kernels(cfg);
    } catch (Error const & e) {
        std::cerr << "rslab: " << e.what() << '\n';
        return 1;
    }
}
