// kgpe: command-line front end for the kicked-condensate toolkit.
#include "kgpe/bogoliubov.hpp"
#include "kgpe/classical.hpp"
#include "kgpe/error.hpp"
#include "kgpe/gpe.hpp"
#include "kgpe/io.hpp"
#include "kgpe/liouville.hpp"
#include "kgpe/units.hpp"
#include "kgpe/wigner.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>

using namespace kgpe;
namespace fs = std::filesystem;

namespace {

struct Context {
    io::RunConfig cfg;
    io::RunManifest manifest;

    fs::path out(const fs::path& name) const { return io::confined_path(cfg.output, name); }
    void record(const fs::path& path) { manifest.add_file(path); }
};

Grid1D run_grid(const io::RunConfig& cfg, double center)
{
    return cfg.half_width > 0.0 ? make_grid(cfg.n_points, cfg.half_width)
                                : default_grid(center, cfg.n_points);
}

gpe::GpeState displaced_ground(Context& ctx)
{
    const double a = ctx.cfg.center_x();
    const Grid1D grid = run_grid(ctx.cfg, a);
    const gpe::GroundState g = gpe::ground_state(ctx.cfg.params, grid);
    ctx.manifest.add_diagnostic("mu", g.mu);
    ctx.manifest.add_diagnostic("ground_residual", g.residual);
    ctx.manifest.add_diagnostic("center_x", a);
    return {gpe::displace(g.field, a), 0.0, ctx.cfg.params};
}

int params_table()
{
    struct Row {
        double upsilon, eta_prime;
    };
    const Row rows[] = {{1, 1}, {1, 2}, {10, 1}, {10, 2}};
    const Species species[] = {sodium23(), rubidium87()};
    constexpr double omega_ratio = 10.0;

    std::printf("species,upsilon,eta_prime,mu_hw,lambda,nu\n");
    std::vector<std::string> pretty;
    for (const auto& s : species) {
        for (const auto& r : rows) {
            ScaledParams p;
            p.eta = r.eta_prime;
            p.upsilon = r.upsilon;
            const double mu = gpe::ground_state(p, default_grid(0.0)).mu;
            const ExperimentRow e = experiment_table(s, r.upsilon, r.eta_prime, omega_ratio);
            std::printf("%s,%g,%g,%.4f,%.6e,%.6e\n", s.name.c_str(), r.upsilon, r.eta_prime, mu,
                        e.lambda, e.nu);
            char line[160];
            std::snprintf(line, sizeof line, "%-8s %8g %9g %8.2f %12.3e %12.3e", s.name.c_str(),
                          r.upsilon, r.eta_prime, mu, e.lambda, e.nu);
            pretty.emplace_back(line);
        }
    }
    std::printf("\n%-8s %8s %9s %8s %12s %12s\n", "species", "upsilon", "eta'", "mu/hw",
                "lambda", "nu");
    for (const auto& line : pretty)
        std::printf("%s\n", line.c_str());
    return 0;
}

void poincare(Context& ctx)
{
    const classical::ResonanceSpec spec{ctx.cfg.resonance_r, ctx.cfg.resonance_q};
    std::vector<classical::PhasePoint> seeds;
    const int n_seeds = ctx.cfg.trajectories;
    const double reach = 4.0 * std::numbers::sqrt2 * std::numbers::pi;
    for (int k = 0; k < n_seeds; ++k)
        seeds.push_back({reach * (k + 0.5) / n_seeds, 0.0});
    const auto cloud = classical::poincare_section(seeds, ctx.cfg.kicks, spec, ctx.cfg.params.kappa);

    std::vector<std::vector<double>> rows;
    rows.reserve(cloud.size());
    const std::size_t per = static_cast<std::size_t>(ctx.cfg.kicks);
    for (std::size_t i = 0; i < cloud.size(); ++i)
        rows.push_back({double(i / per), double(i % per), cloud[i].x, cloud[i].p});
    const auto path = ctx.out("poincare.csv");
    io::write_series(path, {"seed", "kick", "x", "p"}, rows);
    ctx.record(path);
    ctx.manifest.add_diagnostic("web_symmetry_score",
                                classical::web_symmetry_score(cloud, spec.q));
}

void ground_state_cmd(Context& ctx)
{
    const Grid1D grid = run_grid(ctx.cfg, 0.0);
    const gpe::GroundState g = gpe::ground_state(ctx.cfg.params, grid);
    const auto path = ctx.out("ground_state.fld");
    write_field(path, g.field);
    ctx.record(path);
    ctx.manifest.add_diagnostic("mu", g.mu);
    ctx.manifest.add_diagnostic("ground_residual", g.residual);
    std::printf("mu = %.10f\nresidual = %.3e\n", g.mu, g.residual);
}

void write_gpe_series(Context& ctx, const gpe::RunRecord& run)
{
    std::vector<std::vector<double>> rows;
    for (const auto& r : run.series)
        rows.push_back({double(r.kick), r.t_h, r.norm, r.energy, r.mean_x, r.mean_p});
    const auto path = ctx.out("series.csv");
    io::write_series(path, {"kick", "t_h", "norm", "energy", "mean_x", "mean_p"}, rows);
    ctx.record(path);
    double drift = 0.0;
    for (const auto& r : run.series)
        drift = std::max(drift, std::abs(r.norm - run.series.front().norm));
    ctx.manifest.add_diagnostic("norm_drift", drift);
    ctx.manifest.add_diagnostic("final_boundary_mass", boundary_mass(run.final_state.field));
}

void evolve(Context& ctx)
{
    const gpe::GpeState s0 = displaced_ground(ctx);
    std::vector<gpe::Observer> observers;
    if (ctx.cfg.dump_every > 0) {
        observers.push_back([&](int k, const gpe::GpeState& s) {
            if (k % ctx.cfg.dump_every != 0)
                return;
            char name[32];
            std::snprintf(name, sizeof name, "field_%05d.fld", k);
            const auto path = ctx.out(name);
            write_field(path, s.field);
            ctx.record(path);
        });
    }
    const auto run = gpe::run_kicked(s0, ctx.cfg.kicks, ctx.cfg.substeps, observers);
    write_gpe_series(ctx, run);
    const auto path = ctx.out("final.fld");
    write_field(path, run.final_state.field);
    ctx.record(path);
}

void wigner_cmd(Context& ctx)
{
    const ComplexField f = read_field(ctx.cfg.input);
    const auto w = wigner::wigner_transform(f);
    const auto stem = ctx.cfg.input.stem().string();
    const auto dump = ctx.out(stem + ".wig");
    wigner::write_wigner(dump, w);
    ctx.record(dump);
    const auto image = ctx.out(stem + ".ppm");
    io::emit_wigner_image(w, io::Colormap::diverging, image);
    ctx.record(image);
    ctx.manifest.add_diagnostic("total", w.total());
    ctx.manifest.add_diagnostic("purity", wigner::purity(w));
}

void wigner_avg(Context& ctx)
{
    const gpe::GpeState s0 = displaced_ground(ctx);
    wigner::TimeAverage avg;
    const auto run = gpe::run_kicked(s0, ctx.cfg.kicks, ctx.cfg.substeps,
                                     {[&](int, const gpe::GpeState& s) {
                                         avg.add(wigner::wigner_transform(s.field));
                                     }});
    write_gpe_series(ctx, run);
    const auto w = avg.result();
    const auto dump = ctx.out("wigner_avg.wig");
    wigner::write_wigner(dump, w);
    ctx.record(dump);
    const auto image = ctx.out("wigner_avg.ppm");
    io::emit_wigner_image(w, io::Colormap::diverging, image);
    ctx.record(image);
    const double pr = wigner::participation_ratio(w);
    ctx.manifest.add_diagnostic("participation_ratio", pr);
    std::printf("participation ratio = %.6g\n", pr);
}

void liouville_cmd(Context& ctx)
{
    const gpe::GpeState s0 = displaced_ground(ctx);
    const auto w0 = wigner::wigner_transform(s0.field);
    const auto e0 = liouville::sample_from_wigner(w0, ctx.cfg.particles, ctx.cfg.seed,
                                                  ctx.cfg.params);
    liouville::TransportOptions opt;
    opt.substeps = ctx.cfg.ensemble_substeps;
    opt.bandwidth_cells = ctx.cfg.bandwidth_cells;
    const auto run = liouville::run_kicked_ensemble(e0, ctx.cfg.kicks, s0.field.grid,
                                                    wigner::wigner_lattice(s0.field.grid), opt);
    std::vector<std::vector<double>> rows;
    for (const auto& r : run.series)
        rows.push_back({double(r.kick), r.t_h, r.mean_x, r.mean_p, r.var_x, r.var_p});
    const auto series = ctx.out("ensemble.csv");
    io::write_series(series, {"kick", "t_h", "mean_x", "mean_p", "var_x", "var_p"}, rows);
    ctx.record(series);
    const auto dump = ctx.out("liouville_avg.wig");
    wigner::write_wigner(dump, run.average);
    ctx.record(dump);
    const auto image = ctx.out("liouville_avg.ppm");
    io::emit_wigner_image(run.average, io::Colormap::sequential, image);
    ctx.record(image);
    const auto checkpoint = ctx.out("final.ens");
    liouville::write_ensemble(checkpoint, run.final_state);
    ctx.record(checkpoint);
    const double pr = wigner::participation_ratio(run.average);
    ctx.manifest.add_diagnostic("participation_ratio", pr);
    ctx.manifest.add_diagnostic("out_of_grid", double(run.out_of_grid));
    std::printf("participation ratio = %.6g\n", pr);
}

void depletion(Context& ctx)
{
    bogoliubov::DepletionOptions opt;
    opt.n_kicks = ctx.cfg.kicks;
    opt.modes = ctx.cfg.modes;
    opt.substeps = ctx.cfg.substeps;
    opt.n_points = ctx.cfg.n_points;
    const auto series = bogoliubov::depletion_run(ctx.cfg.params, ctx.cfg.center_x(), opt);

    std::vector<std::vector<double>> modes, sums;
    double norm_error = 0.0;
    for (std::size_t r = 0; r < series.rows.size(); ++r) {
        const auto& row = series.rows[r];
        for (std::size_t k = 0; k < row.vk.size(); ++k)
            modes.push_back({double(series.kick[r]), double(k + 1), row.vk[k]});
        sums.push_back({double(series.kick[r]), row.sum});
        norm_error = std::max(norm_error, row.norm_error);
    }
    const auto mode_path = ctx.out("depletion_modes.csv");
    io::write_series(mode_path, {"kick", "k", "vk_norm"}, modes);
    ctx.record(mode_path);
    const auto sum_path = ctx.out("depletion_sum.csv");
    io::write_series(sum_path, {"kick", "sum"}, sums);
    ctx.record(sum_path);
    ctx.manifest.add_diagnostic("mu", series.mu);
    ctx.manifest.add_diagnostic("E_1", series.energies.front());
    ctx.manifest.add_diagnostic("max_norm_error", norm_error);
    ctx.manifest.add_diagnostic("final_sum", series.rows.back().sum);
    std::printf("final depletion sum = %.6e\n", series.rows.back().sum);
}

void render(Context& ctx)
{
    const auto w = wigner::read_wigner(ctx.cfg.input);
    bool signed_data = false;
    for (double v : w.values)
        signed_data = signed_data || v < 0.0;
    const auto image = ctx.out(ctx.cfg.input.stem().string() + ".ppm");
    io::emit_wigner_image(w, signed_data ? io::Colormap::diverging : io::Colormap::sequential,
                          image);
    ctx.record(image);
}

} // namespace

int main(int argc, char** argv)
{
    io::RunConfig cfg;
    try {
        cfg = io::parse_config(argc, argv);
    } catch (const io::UsageError& e) {
        (e.exit_code() == 0 ? std::cout : std::cerr) << e.what() << "\n";
        return e.exit_code();
    }

    try {
        if (cfg.command == "params-table")
            return params_table();

        fs::create_directories(cfg.output);
        Context ctx{cfg, io::RunManifest(cfg, KGPE_VERSION)};
        {
            const auto path = ctx.out("run.cfg");
            std::ofstream(path) << io::config_text(cfg);
            ctx.record(path);
        }
        if (cfg.command == "poincare")
            poincare(ctx);
        else if (cfg.command == "ground-state")
            ground_state_cmd(ctx);
        else if (cfg.command == "evolve")
            evolve(ctx);
        else if (cfg.command == "wigner")
            wigner_cmd(ctx);
        else if (cfg.command == "wigner-avg")
            wigner_avg(ctx);
        else if (cfg.command == "liouville")
            liouville_cmd(ctx);
        else if (cfg.command == "depletion")
            depletion(ctx);
        else if (cfg.command == "render")
            render(ctx);
        ctx.manifest.write();
        return 0;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 1;
    } catch (const DomainError& e) {
        std::cerr << "invalid request: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
