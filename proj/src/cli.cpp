#include "beaconopt/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <vector>

#include "beaconopt/errors.hpp"
#include "beaconopt/gdop.hpp"
#include "beaconopt/localization.hpp"
#include "beaconopt/oracle.hpp"
#include "beaconopt/placement_doc.hpp"
#include "beaconopt/stage1.hpp"
#include "beaconopt/stage2.hpp"
#include "beaconopt/version.hpp"

namespace beaconopt::cli {

namespace {

Scenario load_with_overrides(const std::string& path, const ResolutionOverrides& res) {
    Scenario sc = load_scenario_file(path);
    if (res.drone_res_m) sc.drone_resolution_m = *res.drone_res_m;
    if (res.beacon_res_m) sc.beacon_resolution_m = *res.beacon_res_m;
    return sc;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + path);
    out << text;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

}  // namespace

int cmd_solve(const SolveOptions& opt, std::ostream& out) {
    const auto t0 = std::chrono::steady_clock::now();
    Scenario sc = load_with_overrides(opt.plan_path, opt.res);
    EaConfig ea = opt.ea;
    if (!opt.gdop_threshold_set) ea.gdop_threshold_g = ea.coverage_threshold < 1.0 ? 5.0 : 20.0;
    ea.validate();

    PlacementProblem problem(sc);
    out << "domains: |D|=" << problem.drone_domain().points.size()
        << " |B|=" << problem.beacon_domain().sites.size() << "\n";

    StageOneResult s1 = run_stage1(problem, ea);
    out << "stage 1: " << s1.beacon_count << " beacons, " << s1.candidates.size()
        << " candidate placements, " << s1.generations << " generations\n";

    StageTwoResult s2 = run_stage2(problem, s1.candidates, ea);
    out << "stage 2: coverage " << fmt(s2.coverage) << ", GDOP avg " << fmt(s2.gdop_avg) << " ("
        << band_name(classify_band(s2.gdop_avg)) << "), " << s2.generations << " generations\n";

    PlacementDocument doc;
    for (const auto& g : s2.best.genes) doc.beacons.push_back(g.site);
    doc.coverage_fractions = s2.best.per_k_fractions;
    doc.gdop_avg = s2.gdop_avg;
    doc.gdop_band = band_name(classify_band(s2.gdop_avg));
    doc.config = {ea.rng_seed,
                  ea.population_size_p,
                  ea.survivor_count_s,
                  ea.k_target,
                  ea.coverage_threshold,
                  ea.gdop_threshold_g,
                  ea.max_generations,
                  sc.drone_resolution_m,
                  sc.beacon_resolution_m};
    doc.generations_stage1 = s1.generations;
    doc.generations_stage2 = s2.generations;
    doc.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    doc.tool_version = kVersion;
    write_text_file(opt.out_path, write_placement_json(doc));
    out << "placement written to " << opt.out_path << " (" << doc.beacons.size()
        << " beacons)\n";
    return kExitOk;
}

namespace {

// Grayscale mapping for the raster: GDOP 1 -> white, >= 25 -> black.
unsigned char gdop_pixel(double g) {
    const double lo = 1.0, hi = 25.0;
    const double c = std::clamp(g, lo, hi);
    return static_cast<unsigned char>(std::lround(255.0 * (hi - c) / (hi - lo)));
}

void write_pgm(const std::string& path, int width, int height,
               const std::vector<unsigned char>& pixels) {
    std::ofstream img(path, std::ios::binary);
    if (!img) throw Error("cannot write file: " + path);
    img << "P5\n" << width << " " << height << "\n255\n";
    img.write(reinterpret_cast<const char*>(pixels.data()), pixels.size());
}

}  // namespace

int cmd_gdop_map(const GdopMapOptions& opt, std::ostream& out) {
    Scenario sc = load_with_overrides(opt.plan_path, opt.res);
    PlacementDocument doc = read_placement_file(opt.placement_path);
    for (const auto& b : doc.beacons)
        if (!sc.plan.inside_room(b.position))
            throw ValidationError("placement beacon lies outside this plan's room");

    auto [drone, beacon_unused] =
        discretize_domains(sc.plan, sc.drone_resolution_m, sc.beacon_resolution_m);
    const GdopField field = gdop_field(drone, doc.placement(), sc.plan, sc.sensor);

    std::string csv = "x,y,z,gdop,band\n";
    for (size_t j = 0; j < drone.points.size(); ++j) {
        const Vec3& p = drone.points[j];
        const auto& r = field.per_point[j];
        csv += fmt(p.x()) + "," + fmt(p.y()) + "," + fmt(p.z()) + "," + fmt(r.value) + "," +
               band_name(r.band) + "\n";
    }
    write_text_file(opt.out_csv, csv);

    if (!opt.out_image.empty()) {
        // Minimum-GDOP projection along z per (x, y) column.
        std::vector<double> xs, ys;
        for (const auto& p : drone.points) {
            xs.push_back(p.x());
            ys.push_back(p.y());
        }
        std::sort(xs.begin(), xs.end());
        xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
        std::sort(ys.begin(), ys.end());
        ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
        auto index_of = [](const std::vector<double>& v, double x) {
            return static_cast<int>(std::lower_bound(v.begin(), v.end(), x) - v.begin());
        };
        const int w = static_cast<int>(xs.size()), h = static_cast<int>(ys.size());
        std::vector<double> min_g(static_cast<size_t>(w) * h, kGdopCap);
        for (size_t j = 0; j < drone.points.size(); ++j) {
            const Vec3& p = drone.points[j];
            const int ix = index_of(xs, p.x());
            const int iy = index_of(ys, p.y());
            auto& cell = min_g[static_cast<size_t>(iy) * w + ix];
            cell = std::min(cell, field.per_point[j].value);
        }
        std::vector<unsigned char> pixels(min_g.size());
        for (size_t i = 0; i < min_g.size(); ++i) {
            // image rows run top-down: flip y
            const int iy = static_cast<int>(i) / w, ix = static_cast<int>(i) % w;
            pixels[static_cast<size_t>(h - 1 - iy) * w + ix] = gdop_pixel(min_g[i]);
        }
        write_pgm(opt.out_image, w, h, pixels);
    }

    out << "gdop map: " << drone.points.size() << " points, average " << fmt(field.average)
        << ", covered average " << fmt(field.covered_average) << ", fraction singular "
        << fmt(field.fraction_singular) << "\n";
    return kExitOk;
}

int cmd_validate(const ValidateOptions& opt, std::ostream& out) {
    Scenario sc = load_scenario_file(opt.plan_path);
    PlacementDocument doc = read_placement_file(opt.placement_path);
    sc.drone_resolution_m = doc.config.drone_resolution_m;
    sc.beacon_resolution_m = doc.config.beacon_resolution_m;
    PlacementProblem problem(sc);

    bool ok = true;
    auto fail = [&](const std::string& what) {
        out << "FAIL: " << what << "\n";
        ok = false;
    };

    std::string why;
    for (size_t i = 0; i < doc.beacons.size(); ++i) {
        if (!problem.site_in_beacon_region(doc.beacons[i], &why))
            fail("beacon " + std::to_string(i) + ": " + why);
        for (size_t j = i + 1; j < doc.beacons.size(); ++j)
            if ((doc.beacons[i].position - doc.beacons[j].position).lpNorm<Eigen::Infinity>() <
                1e-3)
                fail("beacons " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
    }

    std::vector<SiteGene> genes;
    for (const auto& b : doc.beacons) genes.push_back(SiteGene{b, -1});
    std::vector<const Bitset*> rows;
    for (const auto& g : genes) rows.push_back(&problem.coverage_row(g));
    const auto fractions = coverage_fractions(rows, doc.config.k, problem.point_count());
    const double gdop = problem.covered_gdop_avg(genes);

    out << "recomputed coverage fractions:";
    for (size_t k = 0; k < fractions.size(); ++k)
        out << " k=" << (k + 1) << ": " << fmt(fractions[k]);
    out << "\nrecomputed GDOP avg: " << fmt(gdop) << "\n";

    for (size_t k = 0; k < fractions.size(); ++k) {
        if (k >= doc.coverage_fractions.size() ||
            std::abs(fractions[k] - doc.coverage_fractions[k]) > 1e-9)
            fail("coverage fraction k=" + std::to_string(k + 1) + " mismatch (recomputed " +
                 fmt(fractions[k]) + ")");
    }
    if (std::abs(gdop - doc.gdop_avg) > 1e-9)
        fail("gdop_avg mismatch (recomputed " + fmt(gdop) + ", document has " +
             fmt(doc.gdop_avg) + ")");
    if (doc.gdop_band != band_name(classify_band(doc.gdop_avg)))
        fail("gdop_band inconsistent with gdop_avg");

    out << (ok ? "PASS" : "FAIL") << "\n";
    return ok ? kExitOk : kExitMismatch;
}

int cmd_bounds(const BoundsOptions& opt, std::ostream& out) {
    Scenario sc = load_with_overrides(opt.plan_path, opt.res);
    PlacementProblem problem(sc);
    const auto& bc = problem.connectivity();
    out << "|D|=" << bc.n_points << " |B|=" << bc.n_sites() << " k=" << opt.k << "\n";
    const auto parts = lower_bound_parts(bc, opt.k);
    out << "counting bound: " << parts.counting << "\n";
    out << "LP bound: " << parts.lp << "\n";
    out << "lower bound: " << std::max(parts.counting, parts.lp) << "\n";
    if (bc.n_sites() <= opt.max_exhaustive) {
        const auto exact = brute_force_min_cover(bc, opt.k, opt.max_exhaustive);
        if (exact.feasible)
            out << "exact optimum: " << exact.count << "\n";
        else
            out << "exact optimum: infeasible\n";
    } else {
        out << "exact optimum: skipped (|B| > " << opt.max_exhaustive << ")\n";
    }
    return kExitOk;
}

int cmd_simulate(const SimulateOptions& opt, std::ostream& out) {
    Scenario sc = load_with_overrides(opt.plan_path, opt.res);
    PlacementDocument doc = read_placement_file(opt.placement_path);
    auto [drone, beacon_unused] =
        discretize_domains(sc.plan, sc.drone_resolution_m, sc.beacon_resolution_m);
    const BeaconPlacement placement = doc.placement();

    // Points with at least 4 covering beacons whose geometry the
    // closed-form solver can handle (all-coplanar covering sets cannot be
    // trilaterated), sampled without replacement.
    std::vector<Vec3> eligible;
    for (const auto& p : drone.points) {
        std::vector<Vec3> covering;
        for (const auto& site : placement.selected_sites)
            if (beacon_covers(sc.sensor, site, p, sc.plan)) covering.push_back(site.position);
        if (covering.size() < 4) continue;
        TrilaterationProblem probe;
        for (const auto& b : covering) probe.measurements.push_back({b, (b - p).norm(), 1.0});
        try {
            trilaterate(probe);
        } catch (const DegenerateGeometryError&) {
            continue;
        }
        eligible.push_back(p);
    }
    if (eligible.empty())
        throw ValidationError(
            "no domain point has 4 covering beacons in trilaterable position");
    Rng rng = make_rng(opt.seed);
    std::vector<Vec3> points;
    const int want = std::min<int>(opt.n_points, static_cast<int>(eligible.size()));
    for (int i = 0; i < want; ++i) {
        std::uniform_int_distribution<size_t> pick(0, eligible.size() - 1);
        const size_t j = pick(rng);
        points.push_back(eligible[j]);
        eligible.erase(eligible.begin() + j);
    }

    const auto reports = simulate_localization(placement, points, opt.sigma_r, opt.trials,
                                               opt.seed, sc.plan, sc.sensor);
    std::string csv = "x,y,z,rmse_m,predicted_sigma_m,ratio,trials,sigma_r\n";
    double ratio_sum = 0.0;
    for (const auto& r : reports) {
        csv += fmt(r.point.x()) + "," + fmt(r.point.y()) + "," + fmt(r.point.z()) + "," +
               fmt(r.rmse_m) + "," + fmt(r.predicted_sigma_m) + "," + fmt(r.ratio) + "," +
               std::to_string(r.trials) + "," + fmt(r.sigma_r) + "\n";
        ratio_sum += r.ratio;
    }
    write_text_file(opt.out_csv, csv);
    out << "simulated " << reports.size() << " points x " << opt.trials
        << " trials; mean RMSE/(sigma_r*GDOP) = " << fmt(ratio_sum / reports.size()) << "\n";
    return kExitOk;
}

int exit_code_for_current_exception() {
    try {
        throw;
    } catch (const ParseError&) {
        return kExitBadInput;
    } catch (const EmptyDomainError&) {
        return kExitBadInput;
    } catch (const ValidationError&) {
        return kExitBadInput;
    } catch (const InfeasibleError&) {
        return kExitInfeasible;
    } catch (const NonConvergenceError&) {
        return kExitNoConverge;
    } catch (...) {
        return kExitError;
    }
}

}  // namespace beaconopt::cli
