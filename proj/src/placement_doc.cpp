#include "beaconopt/placement_doc.hpp"

#include <fstream>
#include <sstream>

#include "beaconopt/errors.hpp"
#include "json.hpp"

namespace beaconopt {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed,
                    const char* where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed)
            if (it.key() == a) ok = true;
        if (!ok) throw ParseError(std::string("unknown field '") + it.key() + "' in " + where);
    }
}

json vec_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec_from_json(const json& j, const char* what) {
    if (!j.is_array() || j.size() != 3) throw ParseError(std::string(what) + " must have 3 numbers");
    return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

}  // namespace

std::string write_placement_json(const PlacementDocument& doc) {
    json beacons = json::array();
    for (const auto& b : doc.beacons)
        beacons.push_back({{"position", vec_to_json(b.position)}, {"normal", vec_to_json(b.normal)}});
    json j = {
        {"schema_version", 1},
        {"beacons", beacons},
        {"metadata",
         {
             {"coverage_fractions", doc.coverage_fractions},
             {"gdop_avg", doc.gdop_avg},
             {"gdop_band", doc.gdop_band},
             {"config",
              {
                  {"seed", doc.config.seed},
                  {"population", doc.config.population},
                  {"survivors", doc.config.survivors},
                  {"k", doc.config.k},
                  {"coverage_threshold", doc.config.coverage_threshold},
                  {"gdop_threshold", doc.config.gdop_threshold},
                  {"max_generations", doc.config.max_generations},
                  {"drone_resolution_m", doc.config.drone_resolution_m},
                  {"beacon_resolution_m", doc.config.beacon_resolution_m},
              }},
             {"generations_stage1", doc.generations_stage1},
             {"generations_stage2", doc.generations_stage2},
             {"wall_time_s", doc.wall_time_s},
             {"tool_version", doc.tool_version},
         }},
    };
    return j.dump(2) + "\n";
}

PlacementDocument read_placement_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("placement document must be an object");
    reject_unknown(j, {"schema_version", "beacons", "metadata"}, "placement");
    if (!j.contains("schema_version") || j["schema_version"].get<int>() != 1)
        throw ParseError("schema_version must be the integer 1");
    if (!j.contains("beacons") || !j["beacons"].is_array())
        throw ParseError("missing beacons array");
    if (!j.contains("metadata") || !j["metadata"].is_object())
        throw ParseError("missing metadata object");

    PlacementDocument doc;
    for (const auto& b : j["beacons"]) {
        reject_unknown(b, {"position", "normal"}, "beacon");
        const Vec3 pos = vec_from_json(b.at("position"), "beacon position");
        Vec3 nrm = vec_from_json(b.at("normal"), "beacon normal");
        const double n = nrm.norm();
        if (n < 1e-9) throw ParseError("beacon normal must be nonzero");
        doc.beacons.push_back(BeaconSite::on_surface(pos, nrm / n));
    }

    const auto& md = j["metadata"];
    reject_unknown(md,
                   {"coverage_fractions", "gdop_avg", "gdop_band", "config",
                    "generations_stage1", "generations_stage2", "wall_time_s", "tool_version"},
                   "metadata");
    try {
        doc.coverage_fractions = md.at("coverage_fractions").get<std::vector<double>>();
        doc.gdop_avg = md.at("gdop_avg").get<double>();
        doc.gdop_band = md.at("gdop_band").get<std::string>();
        const auto& cfg = md.at("config");
        reject_unknown(cfg,
                       {"seed", "population", "survivors", "k", "coverage_threshold",
                        "gdop_threshold", "max_generations", "drone_resolution_m",
                        "beacon_resolution_m"},
                       "config");
        doc.config.seed = cfg.at("seed").get<std::uint64_t>();
        doc.config.population = cfg.at("population").get<int>();
        doc.config.survivors = cfg.at("survivors").get<int>();
        doc.config.k = cfg.at("k").get<int>();
        doc.config.coverage_threshold = cfg.at("coverage_threshold").get<double>();
        doc.config.gdop_threshold = cfg.at("gdop_threshold").get<double>();
        doc.config.max_generations = cfg.at("max_generations").get<int>();
        doc.config.drone_resolution_m = cfg.at("drone_resolution_m").get<double>();
        doc.config.beacon_resolution_m = cfg.at("beacon_resolution_m").get<double>();
        doc.generations_stage1 = md.at("generations_stage1").get<int>();
        doc.generations_stage2 = md.at("generations_stage2").get<int>();
        doc.wall_time_s = md.at("wall_time_s").get<double>();
        doc.tool_version = md.at("tool_version").get<std::string>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad metadata: ") + e.what());
    }
    if (doc.coverage_fractions.size() != static_cast<size_t>(doc.config.k))
        throw ParseError("coverage_fractions length must equal config.k");
    return doc;
}

PlacementDocument read_placement_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return read_placement_json(ss.str());
}

}  // namespace beaconopt
