#include "fvlab/experiment.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "fvlab/ap_scheme.hpp"
#include "fvlab/chapman_enskog.hpp"
#include "fvlab/csv_writer.hpp"
#include "fvlab/errors.hpp"
#include "fvlab/hll_scheme.hpp"
#include "fvlab/parabolic_reference.hpp"
#include "fvlab/spacetime_scheme.hpp"
#include "fvlab/structural_conditions.hpp"

namespace fvlab {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

bool parse_bool(const ConfigFile& cfg, const std::string& section,
                const std::string& key, bool fallback) {
    const std::string v = cfg.get_str(section, key, fallback ? "true" : "false");
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("config: key \"" + key + "\" in [" + section +
                      "] must be a boolean");
}

SigmaRule parse_sigma_rule(const ConfigFile& cfg, const std::string& section,
                           const RelaxationModel& model) {
    const std::string fallback =
        model.relaxation_exponent() == 1 ? "target-diffusion" : "zero";
    const std::string v = cfg.get_str(section, "sigma_rule", fallback);
    if (v == "target-diffusion") return SigmaRule::TargetDiffusion;
    if (v == "zero") return SigmaRule::Zero;
    throw ConfigError("config: sigma_rule must be target-diffusion or zero");
}

void write_sidecar(const std::string& out_dir, const std::string& subcommand,
                   const ConfigFile& cfg, std::uint64_t seed,
                   const std::vector<std::string>& artifacts,
                   double wall_seconds) {
    nlohmann::json j;
    j["schema"] = "fvlab.run/1";
    j["subcommand"] = subcommand;
    j["seed"] = seed;
    j["wall_clock_seconds"] = wall_seconds;
    j["artifacts"] = artifacts;
    nlohmann::json c;
    for (const auto& [sec, kv] : cfg.sections()) {
        nlohmann::json s;
        for (const auto& [k, v] : kv) s[k] = v;
        c[sec.empty() ? "(root)" : sec] = s;
    }
    j["config"] = c;
    std::ofstream out(out_dir + "/" + subcommand + ".json");
    if (!out) throw ConfigError("cannot write sidecar in \"" + out_dir + "\"");
    out << j.dump(2) << "\n";
}

std::vector<std::string> init_keys() {
    return {"init",   "base",  "amplitude", "u_left",
            "u_right", "phase"};
}

}  // namespace

std::unique_ptr<RelaxationModel> model_from_config(const ConfigFile& cfg,
                                                   const std::string& section) {
    const std::string name = cfg.require_str(section, "model");
    std::vector<std::pair<std::string, double>> params;
    const auto it = cfg.sections().find("model");
    if (it != cfg.sections().end()) {
        for (const auto& [k, v] : it->second) {
            if (k == "name") continue;
            params.emplace_back(k, cfg.require_num("model", k));
        }
    }
    return make_model(name, params);
}

DiscreteField build_initial_field(const RelaxationModel& model,
                                  const UniformGrid1D& grid,
                                  const ConfigFile& cfg,
                                  const std::string& section,
                                  std::uint64_t seed) {
    const int n = model.equilibrium_dim();
    const std::string kind = cfg.get_str(section, "init", "sine");

    if (kind == "random") {
        std::mt19937_64 rng(seed);
        DiscreteField f;
        f.grid = grid;
        f.states.resize(model.state_dim(), grid.cells);
        for (int i = 0; i < grid.cells; ++i)
            f.states.col(i) = model.sample_state(rng);
        return f;
    }

    std::function<Vec(double)> u_of_x;
    if (kind == "sine") {
        const std::vector<double> base =
            cfg.get_list(section, "base", std::vector<double>(n, 1.0));
        const std::vector<double> amp =
            cfg.get_list(section, "amplitude", std::vector<double>(n, 0.3));
        const double phase = cfg.get_num(section, "phase", 0.0);
        if (static_cast<int>(base.size()) != n || static_cast<int>(amp.size()) != n)
            throw ConfigError("config: base/amplitude must have " +
                              std::to_string(n) + " entries");
        u_of_x = [=, &grid](double x) {
            Vec u(n);
            for (int k = 0; k < n; ++k)
                u[k] = base[k] +
                       amp[k] * std::cos(kTwoPi * x / grid.length + phase);
            return u;
        };
    } else if (kind == "riemann") {
        const std::vector<double> ul =
            cfg.get_list(section, "u_left", std::vector<double>(n, 1.5));
        const std::vector<double> ur =
            cfg.get_list(section, "u_right", std::vector<double>(n, 0.8));
        if (static_cast<int>(ul.size()) != n || static_cast<int>(ur.size()) != n)
            throw ConfigError("config: u_left/u_right must have " +
                              std::to_string(n) + " entries");
        u_of_x = [=, &grid](double x) {
            Vec u(n);
            for (int k = 0; k < n; ++k)
                u[k] = (x < 0.5 * grid.length) ? ul[k] : ur[k];
            return u;
        };
    } else {
        throw ConfigError("config: init must be sine, riemann, or random");
    }

    return make_field(grid, model.state_dim(), [&](double x) {
        return model.equilibrium_lift(u_of_x(x));
    });
}

Mat restrict_field(const Mat& fine, int coarse_cells) {
    const int fc = static_cast<int>(fine.cols());
    if (fc % coarse_cells != 0)
        throw ConfigError("restrict_field: fine resolution must divide");
    const int ratio = fc / coarse_cells;
    Mat out = Mat::Zero(fine.rows(), coarse_cells);
    for (int i = 0; i < coarse_cells; ++i) {
        for (int r = 0; r < ratio; ++r) out.col(i) += fine.col(i * ratio + r);
        out.col(i) /= ratio;
    }
    return out;
}

ConvergenceTable convergence_table(const std::vector<Mat>& runs,
                                   const std::vector<double>& dxs,
                                   const Mat& reference, double dx_ref) {
    if (runs.size() != dxs.size() || runs.size() < 3)
        throw ConfigError("convergence_table: need >= 3 resolutions");
    (void)dx_ref;
    ConvergenceTable table;
    table.dx = dxs;
    for (size_t k = 0; k < runs.size(); ++k) {
        const Mat ref_k = restrict_field(reference, static_cast<int>(runs[k].cols()));
        table.errors.push_back(l1_distance(runs[k], ref_k, dxs[k]));
    }
    for (size_t k = 0; k + 1 < runs.size(); ++k) {
        Vec order(table.errors[k].size());
        for (Eigen::Index c = 0; c < order.size(); ++c)
            order[c] = std::log2(table.errors[k][c] /
                                 std::max(table.errors[k + 1][c], 1e-300));
        table.orders.push_back(order);
    }
    return table;
}

// ============================================================================
// Drivers
// ============================================================================

namespace {

ExperimentOutcome drive_models_check(const ConfigFile& cfg,
                                     const std::string& out_dir,
                                     std::uint64_t seed) {
    cfg.allow_only("models-check", {"model", "samples", "enforce"});
    const std::string which = cfg.get_str("models-check", "model", "all");
    const int samples = cfg.get_int("models-check", "samples", 1000);
    const bool enforce = parse_bool(cfg, "models-check", "enforce", false);

    std::vector<std::string> names =
        which == "all" ? model_names() : std::vector<std::string>{which};

    CsvWriter csv(out_dir + "/models_check.csv",
                  {"model", "check", "residual", "tolerance", "applicable",
                   "pass"});
    bool all_ok = true;
    for (const auto& name : names) {
        const auto model = make_model(name);
        const ConditionReport report =
            verify_structural_conditions(*model, samples, seed);
        for (const auto& e : report.entries) {
            csv.raw_row({name, e.name, format_double(e.max_residual),
                         format_double(e.tolerance), e.applicable ? "1" : "0",
                         e.pass ? "1" : "0"});
        }
        all_ok = all_ok && report.all_pass();
    }
    if (enforce && !all_ok)
        throw InvariantError("models-check: structural conditions failed");
    return {{out_dir + "/models_check.csv"}};
}

ExperimentOutcome drive_effective(const ConfigFile& cfg,
                                  const std::string& out_dir,
                                  std::uint64_t seed) {
    cfg.allow_only("effective", {"model", "count"});
    const auto model = model_from_config(cfg, "effective");
    const int count = cfg.get_int("effective", "count", 5);
    if (count < 1) throw ConfigError("effective: count must be >= 1");
    const int n = model->equilibrium_dim();

    std::vector<std::string> header;
    for (int k = 0; k < n; ++k) header.push_back("u_" + std::to_string(k));
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            header.push_back("M_" + std::to_string(r) + std::to_string(c));
    const bool with_entropy = model->entropy() != nullptr;
    if (with_entropy) {
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c)
                header.push_back("L_" + std::to_string(r) + std::to_string(c));
    }
    header.push_back("corrector_constraint_residual");
    header.push_back("corrector_equation_residual");

    CsvWriter csv(out_dir + "/effective.csv", header);
    std::mt19937_64 rng(seed);
    for (int i = 0; i < count; ++i) {
        const Vec u = model->sample_equilibrium(rng);
        const EffectiveDiffusion eff = effective_diffusion_matrix(*model, u);
        double rc = 0, re = 0;
        for (int k = 0; k < n; ++k) {
            const CorrectorSolution sol =
                first_order_corrector(*model, u, Vec::Unit(n, k));
            rc = std::max(rc, sol.constraint_residual);
            re = std::max(re, sol.equation_residual);
        }
        std::vector<double> row;
        for (int k = 0; k < n; ++k) row.push_back(u[k]);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) row.push_back(eff.M(r, c));
        if (with_entropy)
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c) row.push_back(eff.L(r, c));
        row.push_back(rc);
        row.push_back(re);
        csv.row(row);
    }
    return {{out_dir + "/effective.csv"}};
}

void write_state_csv(const std::string& path, const DiscreteField& field) {
    std::vector<std::string> header = {"x"};
    for (Eigen::Index k = 0; k < field.dim(); ++k)
        header.push_back("component_" + std::to_string(k));
    CsvWriter csv(path, header);
    for (int i = 0; i < field.cells(); ++i) {
        std::vector<double> row = {field.grid.cell_center(i)};
        for (Eigen::Index k = 0; k < field.dim(); ++k)
            row.push_back(field.states(k, i));
        csv.row(row);
    }
}

ExperimentOutcome drive_run_hll(const ConfigFile& cfg,
                                const std::string& out_dir,
                                std::uint64_t seed) {
    auto keys = init_keys();
    keys.insert(keys.end(),
                {"model", "cells", "length", "final_time", "safety"});
    cfg.allow_only("run-hll", keys);
    const auto model = model_from_config(cfg, "run-hll");
    const int cells = cfg.get_int("run-hll", "cells", 200);
    const double length = cfg.get_num("run-hll", "length", 1.0);
    const double final_time = cfg.get_num("run-hll", "final_time", 0.1);
    const double safety = cfg.get_num("run-hll", "safety", 0.9);
    if (!(final_time > 0.0)) throw ConfigError("run-hll: final_time must be > 0");

    const UniformGrid1D grid = UniformGrid1D::make(cells, length);
    DiscreteField field = build_initial_field(*model, grid, cfg, "run-hll", seed);
    while (field.time < final_time * (1.0 - 1e-14)) {
        const double b = suggest_wave_speed(*model, field.states);
        double dt = cfl_timestep(b, grid.dx, safety);
        if (field.time + dt > final_time) dt = final_time - field.time;
        field = step_homogeneous(*model, field, b, dt);
    }
    write_state_csv(out_dir + "/run_hll.csv", field);
    return {{out_dir + "/run_hll.csv"}};
}

ExperimentOutcome drive_run_ap(const ConfigFile& cfg, const std::string& out_dir,
                               std::uint64_t seed) {
    auto keys = init_keys();
    keys.insert(keys.end(), {"model", "cells", "length", "epsilon",
                             "final_time", "cfl", "sigma_rule", "entropy_log",
                             "b"});
    cfg.allow_only("run-ap", keys);
    const auto model = model_from_config(cfg, "run-ap");
    const int cells = cfg.get_int("run-ap", "cells", 200);
    const double length = cfg.get_num("run-ap", "length", 1.0);
    const double eps = cfg.require_num("run-ap", "epsilon");
    const double final_time = cfg.get_num("run-ap", "final_time", 0.1);
    const double cfl = cfg.get_num("run-ap", "cfl", 0.9);
    const bool entropy_log = parse_bool(cfg, "run-ap", "entropy_log", false);
    if (!(eps > 0.0 && eps <= 1.0))
        throw ConfigError("run-ap: epsilon must lie in (0, 1]");

    const UniformGrid1D grid = UniformGrid1D::make(cells, length);
    DiscreteField field = build_initial_field(*model, grid, cfg, "run-ap", seed);

    APConfig ap;
    ap.eps = eps;
    ap.b = 1.0;  // per-step value set inside run_ap
    ap.fixed_b = cfg.get_num("run-ap", "b", 0.0);
    ap.sigma_rule = parse_sigma_rule(cfg, "run-ap", *model);

    std::vector<std::string> artifacts;
    std::unique_ptr<CsvWriter> entropy_csv;
    std::int64_t step = 0;
    std::function<void(const DiscreteField&)> observer;
    if (entropy_log) {
        if (!model->entropy())
            throw ConfigError("run-ap: entropy_log needs a model with an "
                              "entropy pair");
        entropy_csv = std::make_unique<CsvWriter>(
            out_dir + "/run_ap_entropy.csv",
            std::vector<std::string>{"step", "time", "total_entropy"});
        artifacts.push_back(out_dir + "/run_ap_entropy.csv");
        observer = [&](const DiscreteField& f) {
            entropy_csv->row({static_cast<double>(step++), f.time,
                              total_entropy(*model, f)});
        };
    }

    const APRunResult result =
        run_ap(*model, std::move(field), ap, final_time, cfl, observer);
    write_state_csv(out_dir + "/run_ap.csv", result.final_state);
    artifacts.insert(artifacts.begin(), out_dir + "/run_ap.csv");
    return {artifacts};
}

ExperimentOutcome drive_run_parabolic(const ConfigFile& cfg,
                                      const std::string& out_dir,
                                      std::uint64_t seed) {
    auto keys = init_keys();
    keys.insert(keys.end(), {"model", "cells", "length", "final_time", "safety",
                             "en2_delta"});
    cfg.allow_only("run-parabolic", keys);
    const auto model = model_from_config(cfg, "run-parabolic");
    const int cells = cfg.get_int("run-parabolic", "cells", 200);
    const double length = cfg.get_num("run-parabolic", "length", 1.0);
    const double final_time = cfg.get_num("run-parabolic", "final_time", 0.1);
    const double safety = cfg.get_num("run-parabolic", "safety", 0.45);
    const double delta = cfg.get_num("run-parabolic", "en2_delta", 1e-8);

    const UniformGrid1D grid = UniformGrid1D::make(cells, length);
    const DiscreteField init =
        build_initial_field(*model, grid, cfg, "run-parabolic", seed);
    const Mat u0 = conserved_field(*model, init);
    const ParabolicProblem problem = closed_form_effective(*model, delta);
    const Mat u = solve_parabolic(problem, u0, final_time, grid.dx, safety);

    std::vector<std::string> header = {"x"};
    for (Eigen::Index k = 0; k < u.rows(); ++k)
        header.push_back("component_" + std::to_string(k));
    CsvWriter csv(out_dir + "/run_parabolic.csv", header);
    for (int i = 0; i < cells; ++i) {
        std::vector<double> row = {grid.cell_center(i)};
        for (Eigen::Index k = 0; k < u.rows(); ++k) row.push_back(u(k, i));
        csv.row(row);
    }
    return {{out_dir + "/run_parabolic.csv"}};
}

ExperimentOutcome drive_compare_asymptotic(const ConfigFile& cfg,
                                           const std::string& out_dir,
                                           std::uint64_t seed) {
    auto keys = init_keys();
    keys.insert(keys.end(), {"model", "cells", "length", "final_time",
                             "epsilons", "cfl", "sigma_rule", "safety",
                             "en2_delta"});
    cfg.allow_only("compare-asymptotic", keys);
    const auto model = model_from_config(cfg, "compare-asymptotic");
    const int cells = cfg.get_int("compare-asymptotic", "cells", 100);
    const double length = cfg.get_num("compare-asymptotic", "length", 1.0);
    const double final_time = cfg.get_num("compare-asymptotic", "final_time", 0.1);
    const double cfl = cfg.get_num("compare-asymptotic", "cfl", 0.9);
    const double safety = cfg.get_num("compare-asymptotic", "safety", 0.45);
    const double delta = cfg.get_num("compare-asymptotic", "en2_delta", 1e-8);
    const std::vector<double> epsilons =
        cfg.get_list("compare-asymptotic", "epsilons", {1e-2, 1e-3});

    const UniformGrid1D grid = UniformGrid1D::make(cells, length);
    const DiscreteField init =
        build_initial_field(*model, grid, cfg, "compare-asymptotic", seed);
    const Mat u0 = conserved_field(*model, init);
    const Mat uref = solve_parabolic(closed_form_effective(*model, delta), u0,
                                     final_time, grid.dx, safety);
    const int n = model->equilibrium_dim();
    const Vec ref_norm = uref.cwiseAbs().rowwise().sum() * grid.dx;

    std::vector<std::string> header = {"epsilon"};
    for (int k = 0; k < n; ++k) header.push_back("l1_distance_" + std::to_string(k));
    for (int k = 0; k < n; ++k) header.push_back("ref_l1_norm_" + std::to_string(k));
    CsvWriter csv(out_dir + "/compare_asymptotic.csv", header);

    for (double eps : epsilons) {
        if (!(eps > 0.0 && eps <= 1.0))
            throw ConfigError("compare-asymptotic: epsilon must lie in (0, 1]");
        APConfig ap;
        ap.eps = eps;
        ap.sigma_rule = parse_sigma_rule(cfg, "compare-asymptotic", *model);
        const APRunResult res = run_ap(*model, init, ap, final_time, cfl);
        const Vec dist = l1_distance(conserved_field(*model, res.final_state),
                                     uref, grid.dx);
        std::vector<double> row = {eps};
        for (int k = 0; k < n; ++k) row.push_back(dist[k]);
        for (int k = 0; k < n; ++k) row.push_back(ref_norm[k]);
        csv.row(row);
    }
    return {{out_dir + "/compare_asymptotic.csv"}};
}

ExperimentOutcome drive_run_spacetime(const ConfigFile& cfg,
                                      const std::string& out_dir,
                                      std::uint64_t seed) {
    cfg.allow_only("run-spacetime",
                   {"preset", "elements", "final_time", "cfl", "theta_jitter",
                    "time_jitter", "u0", "u0_base", "u0_amplitude", "u0_left",
                    "u0_right", "u0_window_lo", "u0_window_hi",
                    "kruzkov_count", "diagnostics"});
    using namespace spacetime;
    const FluxField1Form omega =
        preset_flux(cfg.get_str("run-spacetime", "preset", "flat-burgers"));
    const int elements = cfg.get_int("run-spacetime", "elements", 64);
    const double final_time = cfg.get_num("run-spacetime", "final_time", 0.5);
    const double cfl = cfg.get_num("run-spacetime", "cfl", 0.9);
    const int kruzkov_count = cfg.get_int("run-spacetime", "kruzkov_count", 0);
    const bool diagnostics = parse_bool(cfg, "run-spacetime", "diagnostics", true);

    const std::string u0_kind = cfg.get_str("run-spacetime", "u0", "sine");
    std::function<double(double)> u0;
    double u_lo, u_hi;
    if (u0_kind == "sine") {
        const double base = cfg.get_num("run-spacetime", "u0_base", 0.5);
        const double amp = cfg.get_num("run-spacetime", "u0_amplitude", 0.25);
        u0 = [=](double th) { return base + amp * std::sin(th); };
        u_lo = base - std::abs(amp);
        u_hi = base + std::abs(amp);
    } else if (u0_kind == "riemann") {
        const double ul = cfg.get_num("run-spacetime", "u0_left", 1.0);
        const double ur = cfg.get_num("run-spacetime", "u0_right", 0.0);
        const double wlo = cfg.get_num("run-spacetime", "u0_window_lo", 0.05);
        const double whi = cfg.get_num("run-spacetime", "u0_window_hi", 0.45);
        u0 = [=](double th) {
            const double x = th / kTwoPi;
            return (x >= wlo && x < whi) ? ul : ur;
        };
        u_lo = std::min(ul, ur);
        u_hi = std::max(ul, ur);
    } else {
        throw ConfigError("run-spacetime: u0 must be sine or riemann");
    }

    MeshOptions mesh_opts;
    mesh_opts.elements = elements;
    mesh_opts.final_time = final_time;
    mesh_opts.cfl = cfl;
    mesh_opts.theta_jitter = cfg.get_num("run-spacetime", "theta_jitter", 0.0);
    mesh_opts.time_jitter = cfg.get_num("run-spacetime", "time_jitter", 0.0);
    mesh_opts.seed = seed;
    mesh_opts.u_lo = u_lo;
    mesh_opts.u_hi = u_hi;
    const SpacetimeTriangulation tri = build_slab_mesh(omega, mesh_opts);

    SpacetimeOptions opts;
    opts.u_lo = u_lo;
    opts.u_hi = u_hi;
    if (kruzkov_count > 0) {
        const double pad = 0.1 * (u_hi - u_lo);
        for (int k = 0; k < kruzkov_count; ++k)
            opts.kruzkov_params.push_back(
                u_lo - pad +
                (u_hi - u_lo + 2 * pad) * (k + 0.5) / kruzkov_count);
    }
    const SpacetimeRun run = run_spacetime(omega, tri, u0, opts);

    CsvWriter slices_csv(out_dir + "/spacetime_slices.csv",
                         {"slice", "time", "theta_center", "u"});
    for (int s = 0; s < static_cast<int>(run.slices.size()); ++s)
        for (int j = 0; j < elements; ++j)
            slices_csv.row({static_cast<double>(s), tri.slice_times[s],
                            tri.face_midpoint(s, j), run.slices[s][j]});

    std::vector<std::string> artifacts = {out_dir + "/spacetime_slices.csv"};
    if (diagnostics) {
        // Contraction is reported against the exact constant solution at the
        // measure-weighted mean of the initial data.
        SpacetimeSolver solver(omega, tri, opts);
        double mass = 0.0, area = 0.0;
        for (int j = 0; j < elements; ++j) {
            mass += solver.measure(0, j) * run.slices[0][j];
            area += solver.measure(0, j);
        }
        const double mean = mass / area;
        const SpacetimeRun constant_run =
            run_spacetime(omega, tri, [mean](double) { return mean; }, opts);

        CsvWriter diag_csv(out_dir + "/spacetime_diagnostics.csv",
                           {"slice", "time", "contraction_integral",
                            "dissipation_total", "max_entropy_residual"});
        double dissipation_running = 0.0;
        for (int s = 0; s < static_cast<int>(run.slices.size()); ++s) {
            if (s > 0) {
                // Re-accumulate the per-slab dissipation for the running sum.
                const auto& mids = run.intermediates[s - 1];
                double d = 0.0;
                for (int j = 0; j < elements; ++j) {
                    const double dl = mids[j][0] - run.slices[s][j];
                    const double dr = mids[j][1] - run.slices[s][j];
                    d += 0.5 * solver.measure(s, j) * (dl * dl + dr * dr);
                }
                dissipation_running += d;
            }
            diag_csv.row({static_cast<double>(s), tri.slice_times[s],
                          solver.contraction_integral(s, run.slices[s],
                                                      constant_run.slices[s]),
                          dissipation_running, run.max_dei_residual});
        }
        artifacts.push_back(out_dir + "/spacetime_diagnostics.csv");
    }
    return {artifacts};
}

ExperimentOutcome drive_convergence(const ConfigFile& cfg,
                                    const std::string& out_dir,
                                    std::uint64_t seed) {
    auto keys = init_keys();
    keys.insert(keys.end(), {"model", "epsilon", "base_cells", "levels",
                             "length", "final_time", "cfl", "sigma_rule",
                             "safety", "en2_delta", "ref_refine"});
    cfg.allow_only("convergence", keys);
    const auto model = model_from_config(cfg, "convergence");
    const double eps = cfg.require_num("convergence", "epsilon");
    const int base_cells = cfg.get_int("convergence", "base_cells", 50);
    const int levels = cfg.get_int("convergence", "levels", 3);
    const double length = cfg.get_num("convergence", "length", 1.0);
    const double final_time = cfg.get_num("convergence", "final_time", 0.05);
    const double cfl = cfg.get_num("convergence", "cfl", 0.9);
    const double safety = cfg.get_num("convergence", "safety", 0.45);
    const double delta = cfg.get_num("convergence", "en2_delta", 1e-8);
    const int ref_refine = cfg.get_int("convergence", "ref_refine", 2);
    if (levels < 3) throw ConfigError("convergence: need >= 3 levels");

    std::vector<Mat> runs;
    std::vector<double> dxs;
    int cells = base_cells;
    for (int l = 0; l < levels; ++l, cells *= 2) {
        const UniformGrid1D grid = UniformGrid1D::make(cells, length);
        const DiscreteField init =
            build_initial_field(*model, grid, cfg, "convergence", seed);
        APConfig ap;
        ap.eps = eps;
        ap.sigma_rule = parse_sigma_rule(cfg, "convergence", *model);
        const APRunResult res = run_ap(*model, init, ap, final_time, cfl);
        runs.push_back(conserved_field(*model, res.final_state));
        dxs.push_back(grid.dx);
    }

    const int ref_cells = base_cells * (1 << (levels - 1)) * ref_refine;
    const UniformGrid1D ref_grid = UniformGrid1D::make(ref_cells, length);
    const DiscreteField ref_init =
        build_initial_field(*model, ref_grid, cfg, "convergence", seed);
    const Mat uref =
        solve_parabolic(closed_form_effective(*model, delta),
                        conserved_field(*model, ref_init), final_time,
                        ref_grid.dx, safety);

    const ConvergenceTable table = convergence_table(runs, dxs, uref, ref_grid.dx);
    const int n = model->equilibrium_dim();
    std::vector<std::string> header = {"dx"};
    for (int k = 0; k < n; ++k) header.push_back("l1_error_" + std::to_string(k));
    for (int k = 0; k < n; ++k) header.push_back("order_" + std::to_string(k));
    CsvWriter csv(out_dir + "/convergence.csv", header);
    for (size_t l = 0; l < table.dx.size(); ++l) {
        std::vector<double> row = {table.dx[l]};
        for (int k = 0; k < n; ++k) row.push_back(table.errors[l][k]);
        for (int k = 0; k < n; ++k)
            row.push_back(l > 0 ? table.orders[l - 1][k]
                                : std::numeric_limits<double>::quiet_NaN());
        csv.row(row);
    }
    return {{out_dir + "/convergence.csv"}};
}

}  // namespace

std::vector<std::string> subcommand_names() {
    return {"models-check",  "effective",     "run-hll",
            "run-ap",        "run-parabolic", "compare-asymptotic",
            "run-spacetime", "convergence"};
}

ExperimentOutcome run_experiment(const std::string& subcommand,
                                 const ConfigFile& cfg,
                                 const std::string& out_dir,
                                 std::uint64_t seed) {
    std::filesystem::create_directories(out_dir);
    const auto start = std::chrono::steady_clock::now();

    ExperimentOutcome outcome;
    if (subcommand == "models-check")
        outcome = drive_models_check(cfg, out_dir, seed);
    else if (subcommand == "effective")
        outcome = drive_effective(cfg, out_dir, seed);
    else if (subcommand == "run-hll")
        outcome = drive_run_hll(cfg, out_dir, seed);
    else if (subcommand == "run-ap")
        outcome = drive_run_ap(cfg, out_dir, seed);
    else if (subcommand == "run-parabolic")
        outcome = drive_run_parabolic(cfg, out_dir, seed);
    else if (subcommand == "compare-asymptotic")
        outcome = drive_compare_asymptotic(cfg, out_dir, seed);
    else if (subcommand == "run-spacetime")
        outcome = drive_run_spacetime(cfg, out_dir, seed);
    else if (subcommand == "convergence")
        outcome = drive_convergence(cfg, out_dir, seed);
    else
        throw ConfigError("unknown subcommand \"" + subcommand + "\"");

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    write_sidecar(out_dir, subcommand, cfg, seed, outcome.artifacts, wall);
    outcome.artifacts.push_back(out_dir + "/" + subcommand + ".json");
    return outcome;
}

}  // namespace fvlab
