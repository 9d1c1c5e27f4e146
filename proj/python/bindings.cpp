#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "beaconopt/coverage.hpp"
#include "beaconopt/gdop.hpp"
#include "beaconopt/geometry.hpp"
#include "beaconopt/localization.hpp"
#include "beaconopt/oracle.hpp"
#include "beaconopt/placement_doc.hpp"
#include "beaconopt/problem.hpp"
#include "beaconopt/stage1.hpp"
#include "beaconopt/stage2.hpp"
#include "beaconopt/version.hpp"

namespace py = pybind11;
using namespace beaconopt;

namespace {

ConnectivityMatrix bc_from_lists(const std::vector<std::vector<bool>>& rows) {
    if (rows.empty() || rows[0].empty()) throw ValidationError("connectivity must be non-empty");
    ConnectivityMatrix bc;
    bc.n_points = static_cast<int>(rows[0].size());
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != bc.n_points)
            throw ValidationError("ragged connectivity rows");
        Bitset b(bc.n_points);
        for (int j = 0; j < bc.n_points; ++j)
            if (row[j]) b.set(j);
        bc.rows.push_back(std::move(b));
    }
    return bc;
}

py::dict candidate_to_dict(const CandidatePlacement& c) {
    py::list beacons;
    for (const auto& g : c.genes) {
        py::dict b;
        b["position"] = g.site.position;
        b["normal"] = g.site.normal;
        beacons.append(b);
    }
    py::dict d;
    d["beacons"] = beacons;
    d["coverage_fractions"] = c.per_k_fractions;
    return d;
}

EaConfig config_from_kwargs(std::uint64_t seed, int population, int survivors, int k,
                            double coverage_threshold, double gdop_threshold,
                            int max_generations, bool mutation) {
    EaConfig cfg;
    cfg.rng_seed = seed;
    cfg.population_size_p = population;
    cfg.survivor_count_s = survivors;
    cfg.k_target = k;
    cfg.coverage_threshold = coverage_threshold;
    cfg.gdop_threshold_g = gdop_threshold;
    cfg.max_generations = max_generations;
    cfg.mutation_enabled = mutation;
    cfg.validate();
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Beacon placement optimization for 3D indoor drone localization";
    m.attr("__version__") = kVersion;

    py::register_exception<Error>(m, "BeaconoptError");

    py::class_<Box>(m, "Box")
        .def(py::init([](const Vec3& lo, const Vec3& hi) { return Box{lo, hi}; }))
        .def_readonly("lo", &Box::lo)
        .def_readonly("hi", &Box::hi)
        .def("contains", &Box::contains);

    py::class_<FloorPlan>(m, "FloorPlan")
        .def(py::init([](const Vec3& extent, const std::vector<Box>& obstacles) {
                 FloorPlan p{extent, obstacles};
                 p.validate();
                 return p;
             }),
             py::arg("extent"), py::arg("obstacles") = std::vector<Box>{})
        .def_readonly("extent", &FloorPlan::extent)
        .def_readonly("obstacles", &FloorPlan::obstacles);

    py::class_<SensorModel>(m, "SensorModel")
        .def_static("defaults", &SensorModel::defaults)
        .def_static("tilted_array", &SensorModel::tilted_array, py::arg("range_m"),
                    py::arg("half_angle_deg"), py::arg("tilt_deg"), py::arg("azimuth_count"))
        .def_readonly("range_m", &SensorModel::range_m)
        .def_readonly("cone_half_angle_deg", &SensorModel::cone_half_angle_deg)
        .def_readonly("array_directions", &SensorModel::array_directions);

    py::class_<BeaconSite>(m, "BeaconSite")
        .def(py::init(
                 [](const Vec3& p, const Vec3& n) { return BeaconSite::on_surface(p, n); }),
             py::arg("position"), py::arg("normal"))
        .def_readonly("position", &BeaconSite::position)
        .def_readonly("normal", &BeaconSite::normal)
        .def_readonly("tangent", &BeaconSite::tangent);

    py::class_<DroneDomain>(m, "DroneDomain")
        .def_readonly("points", &DroneDomain::points)
        .def_readonly("resolution_m", &DroneDomain::resolution_m);
    py::class_<BeaconDomain>(m, "BeaconDomain")
        .def_readonly("sites", &BeaconDomain::sites)
        .def_readonly("resolution_m", &BeaconDomain::resolution_m);

    m.def("load_floor_plan", &load_floor_plan, py::arg("text"),
          "Parse a floor-plan JSON document (strict).");
    m.def("discretize_domains", &discretize_domains, py::arg("plan"), py::arg("drone_res_m"),
          py::arg("beacon_res_m"));
    m.def("line_of_sight", &line_of_sight, py::arg("plan"), py::arg("p"), py::arg("q"));
    m.def("beacon_covers", &beacon_covers, py::arg("model"), py::arg("site"), py::arg("point"),
          py::arg("plan"));

    m.def("range_from_toa", &range_from_toa, py::arg("time_of_flight_s"),
          py::arg("speed_of_sound_mps"));
    m.def(
        "trilaterate",
        [](const std::vector<std::tuple<Vec3, double, double>>& measurements) {
            TrilaterationProblem p;
            for (const auto& [pos, d, w] : measurements) p.measurements.push_back({pos, d, w});
            return trilaterate(p);
        },
        py::arg("measurements"),
        "Solve for a position from (beacon_position, distance, weight) triples.");

    py::enum_<GdopBand>(m, "GdopBand")
        .value("ERROR_OR_REDUNDANCY", GdopBand::ErrorOrRedundancy)
        .value("IDEAL", GdopBand::Ideal)
        .value("VERY_GOOD", GdopBand::VeryGood)
        .value("GOOD", GdopBand::Good)
        .value("MEDIUM", GdopBand::Medium)
        .value("SUFFICIENT", GdopBand::Sufficient)
        .value("BAD", GdopBand::Bad);
    py::class_<GdopResult>(m, "GdopResult")
        .def_readonly("value", &GdopResult::value)
        .def_readonly("band", &GdopResult::band)
        .def_readonly("singular", &GdopResult::singular);
    m.def(
        "gdop_at",
        [](const Vec3& target, const std::vector<Vec3>& beacons) {
            return gdop_at(target, beacons);
        },
        py::arg("target"), py::arg("beacons"));
    m.def("classify_band", &classify_band, py::arg("value"));
    m.def("band_name", &band_name, py::arg("band"));
    m.def(
        "crb_2d",
        [](const std::vector<double>& angles, double sigma_r) {
            return crb_2d({angles, sigma_r});
        },
        py::arg("beacon_angles_rad"), py::arg("sigma_r"));
    m.def(
        "dop_2d_from_angles",
        [](const std::vector<double>& angles) { return dop_2d_from_angles(angles); },
        py::arg("beacon_angles_rad"));
    m.def(
        "gdop_field",
        [](const DroneDomain& domain, const std::vector<BeaconSite>& sites,
           const FloorPlan& plan, const SensorModel& model) {
            const auto field = gdop_field(domain, BeaconPlacement{sites}, plan, model);
            py::dict d;
            std::vector<double> values;
            for (const auto& r : field.per_point) values.push_back(r.value);
            d["values"] = values;
            d["average"] = field.average;
            d["covered_average"] = field.covered_average;
            d["fraction_singular"] = field.fraction_singular;
            return d;
        },
        py::arg("domain"), py::arg("placement"), py::arg("plan"), py::arg("model"));

    py::class_<ConnectivityMatrix>(m, "ConnectivityMatrix")
        .def(py::init(&bc_from_lists), py::arg("rows"))
        .def_property_readonly("n_sites", &ConnectivityMatrix::n_sites)
        .def_readonly("n_points", &ConnectivityMatrix::n_points)
        .def("column_sum", &ConnectivityMatrix::column_sum)
        .def("row",
             [](const ConnectivityMatrix& bc, int i) {
                 std::vector<bool> out(bc.n_points);
                 for (int j = 0; j < bc.n_points; ++j) out[j] = bc.rows.at(i).test(j);
                 return out;
             });
    m.def(
        "build_connectivity",
        [](const BeaconDomain& b, const DroneDomain& d, const SensorModel& model,
           const FloorPlan& plan) { return build_connectivity(b, d, model, plan); },
        py::arg("beacon_domain"), py::arg("drone_domain"), py::arg("model"), py::arg("plan"));
    m.def(
        "k_coverage_fraction",
        [](const ConnectivityMatrix& bc, const std::vector<int>& sel, int k) {
            return k_coverage_fraction(bc, sel, k);
        },
        py::arg("bc"), py::arg("selection"), py::arg("k"));
    m.def(
        "total_coverage",
        [](const ConnectivityMatrix& bc, const std::vector<int>& sel) {
            return total_coverage(bc, sel);
        },
        py::arg("bc"), py::arg("selection"));

    m.def(
        "brute_force_min_cover",
        [](const ConnectivityMatrix& bc, int k, int max_sites) {
            const auto r = brute_force_min_cover(bc, k, max_sites);
            py::dict d;
            d["feasible"] = r.feasible;
            d["count"] = r.count;
            d["sites"] = r.sites;
            return d;
        },
        py::arg("bc"), py::arg("k"), py::arg("max_sites") = 25);
    m.def(
        "lower_bound", [](const ConnectivityMatrix& bc, int k) { return lower_bound(bc, k); },
        py::arg("bc"), py::arg("k"));
    m.def(
        "simulate_localization",
        [](const std::vector<BeaconSite>& sites, const std::vector<Vec3>& points,
           double sigma_r, int trials, std::uint64_t seed, const FloorPlan& plan,
           const SensorModel& model) {
            const auto reports = simulate_localization(BeaconPlacement{sites}, points, sigma_r,
                                                       trials, seed, plan, model);
            py::list out;
            for (const auto& r : reports) {
                py::dict d;
                d["point"] = r.point;
                d["rmse_m"] = r.rmse_m;
                d["predicted_sigma_m"] = r.predicted_sigma_m;
                d["ratio"] = r.ratio;
                d["trials"] = r.trials;
                out.append(d);
            }
            return out;
        },
        py::arg("placement"), py::arg("points"), py::arg("sigma_r"), py::arg("trials"),
        py::arg("seed"), py::arg("plan"), py::arg("model"));

    m.def(
        "solve_scenario",
        [](const std::string& text, std::uint64_t seed, int population, int survivors, int k,
           double coverage_threshold, py::object gdop_threshold, int max_generations,
           bool mutation) {
            Scenario sc = load_scenario(text);
            double g = gdop_threshold.is_none()
                           ? (coverage_threshold < 1.0 ? 5.0 : 20.0)
                           : gdop_threshold.cast<double>();
            EaConfig cfg = config_from_kwargs(seed, population, survivors, k,
                                              coverage_threshold, g, max_generations, mutation);
            PlacementProblem problem(sc);
            const auto s1 = run_stage1(problem, cfg);
            const auto s2 = run_stage2(problem, s1.candidates, cfg);
            py::dict d = candidate_to_dict(s2.best);
            d["gdop_avg"] = s2.gdop_avg;
            d["gdop_band"] = band_name(classify_band(s2.gdop_avg));
            d["beacon_count"] = s1.beacon_count;
            d["generations_stage1"] = s1.generations;
            d["generations_stage2"] = s2.generations;
            py::list alts;
            for (const auto& a : s2.alternates) alts.append(candidate_to_dict(a));
            d["alternates"] = alts;
            return d;
        },
        py::arg("plan_text"), py::arg("seed") = 1, py::arg("population") = 250,
        py::arg("survivors") = 5, py::arg("k") = 4, py::arg("coverage_threshold") = 1.0,
        py::arg("gdop_threshold") = py::none(), py::arg("max_generations") = 500,
        py::arg("mutation") = true,
        "Run both solver stages on a floor-plan document and return the placement.");

    m.def(
        "min_beacon_count",
        [](const ConnectivityMatrix& bc, int k, std::uint64_t seed, int population,
           int survivors, int max_generations) {
            EaConfig cfg = config_from_kwargs(seed, population, survivors, k, 1.0, 20.0,
                                              max_generations, true);
            MatrixProblem problem(bc);
            const auto r = run_stage1(problem, cfg);
            py::dict d;
            d["count"] = r.beacon_count;
            d["generations"] = r.generations;
            py::list sels;
            for (const auto& c : r.candidates) {
                py::list sel;
                for (const auto& g : c.genes) sel.append(g.grid_index);
                sels.append(sel);
            }
            d["selections"] = sels;
            return d;
        },
        py::arg("bc"), py::arg("k") = 4, py::arg("seed") = 1, py::arg("population") = 60,
        py::arg("survivors") = 5, py::arg("max_generations") = 300,
        "Stage-1 minimization over a raw connectivity matrix.");
}
