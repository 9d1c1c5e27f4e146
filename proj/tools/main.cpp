#include <iostream>

#include "CLI11.hpp"
#include "beaconopt/cli.hpp"
#include "beaconopt/version.hpp"

namespace cli = beaconopt::cli;

int main(int argc, char** argv) {
    CLI::App app{"Beacon placement optimizer for 3D indoor drone localization"};
    app.set_version_flag("--version", beaconopt::kVersion);
    app.require_subcommand(1);

    // Shared flag state; each subcommand registers the flags it uses.
    cli::SolveOptions solve;
    cli::GdopMapOptions gmap;
    cli::ValidateOptions validate;
    cli::BoundsOptions bounds;
    cli::SimulateOptions simulate;

    auto add_res_flags = [](CLI::App* cmd, cli::ResolutionOverrides& res) {
        cmd->add_option("--drone-res", res.drone_res_m, "Drone grid resolution [m]");
        cmd->add_option("--beacon-res", res.beacon_res_m, "Beacon grid resolution [m]");
    };

    CLI::App* c_solve = app.add_subcommand("solve", "Compute a minimal 4-connectivity placement");
    c_solve->add_option("plan", solve.plan_path, "Floor-plan JSON file")->required();
    c_solve->add_option("-o,--out", solve.out_path, "Output placement file")->required();
    c_solve->add_option("--seed", solve.ea.rng_seed, "RNG seed");
    c_solve->add_option("--population", solve.ea.population_size_p, "Population size P");
    c_solve->add_option("--survivors", solve.ea.survivor_count_s, "Survivor count");
    c_solve->add_option("--k", solve.ea.k_target, "Connectivity target");
    c_solve->add_option("--coverage-threshold", solve.ea.coverage_threshold,
                        "Accepted 4-connectivity fraction (1.0 = strict)");
    auto* gflag = c_solve->add_option("--gdop-threshold", solve.ea.gdop_threshold_g,
                                      "GDOP average bound g (default 20 strict, 5 relaxed)");
    c_solve->add_option("--max-generations", solve.ea.max_generations,
                        "Generation limit per stage");
    c_solve->add_flag_callback(
        "--no-mutation", [&] { solve.ea.mutation_enabled = false; },
        "Disable stage-2 positional mutation");
    c_solve->add_flag_callback(
        "--no-prune", [&] { solve.ea.prune_enabled = false; },
        "Disable stage-1 redundancy elimination");
    add_res_flags(c_solve, solve.res);

    CLI::App* c_map = app.add_subcommand("gdop-map", "Per-point GDOP field as CSV (and raster)");
    c_map->add_option("plan", gmap.plan_path, "Floor-plan JSON file")->required();
    c_map->add_option("placement", gmap.placement_path, "Placement file")->required();
    c_map->add_option("-o,--out", gmap.out_csv, "Output CSV path")->required();
    c_map->add_option("--image", gmap.out_image, "Optional PGM projection (min GDOP along z)");
    add_res_flags(c_map, gmap.res);

    CLI::App* c_val = app.add_subcommand("validate", "Recompute and check placement metadata");
    c_val->add_option("plan", validate.plan_path, "Floor-plan JSON file")->required();
    c_val->add_option("placement", validate.placement_path, "Placement file")->required();

    CLI::App* c_bounds = app.add_subcommand("bounds", "Lower bounds on the minimum beacon count");
    c_bounds->add_option("plan", bounds.plan_path, "Floor-plan JSON file")->required();
    c_bounds->add_option("--k", bounds.k, "Connectivity target");
    c_bounds->add_option("--max-exhaustive", bounds.max_exhaustive,
                         "Site cap for the exact enumeration");
    add_res_flags(c_bounds, bounds.res);

    CLI::App* c_sim = app.add_subcommand("simulate", "Monte-Carlo localization error vs GDOP");
    c_sim->add_option("plan", simulate.plan_path, "Floor-plan JSON file")->required();
    c_sim->add_option("placement", simulate.placement_path, "Placement file")->required();
    c_sim->add_option("-o,--out", simulate.out_csv, "Output CSV path")->required();
    c_sim->add_option("--sigma-r", simulate.sigma_r, "Ranging noise std dev [m]");
    c_sim->add_option("--trials", simulate.trials, "Trials per point");
    c_sim->add_option("--points", simulate.n_points, "Number of sampled domain points");
    c_sim->add_option("--seed", simulate.seed, "RNG seed");
    add_res_flags(c_sim, simulate.res);

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_solve->parsed()) {
            solve.gdop_threshold_set = gflag->count() > 0;
            return cli::cmd_solve(solve, std::cout);
        }
        if (c_map->parsed()) return cli::cmd_gdop_map(gmap, std::cout);
        if (c_val->parsed()) return cli::cmd_validate(validate, std::cout);
        if (c_bounds->parsed()) return cli::cmd_bounds(bounds, std::cout);
        if (c_sim->parsed()) return cli::cmd_simulate(simulate, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::exit_code_for_current_exception();
    }
    return cli::kExitError;
}
