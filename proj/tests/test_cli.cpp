#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vlir/cli.hpp"
#include "vlir/json_io.hpp"

using namespace vlir;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kTmp = "cli_test_tmp";

std::string write_file(const std::string& name, const std::string& text) {
    fs::create_directories(kTmp);
    const fs::path p = kTmp / name;
    std::ofstream out(p, std::ios::binary);
    out << text;
    return p.string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

int run(std::vector<std::string> args) {
    args.insert(args.begin(), "vlir");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

json bernoulli_source(double p1) {
    return json{{"kind", "iid"}, {"K", 2}, {"symbols", json{{"0", 1.0 - p1}, {"1", p1}}}};
}

} // namespace

TEST_CASE("config parsing: defaults, scalar-or-array lists, errors") {
    RunConfig d = config_from_json(json::object());
    CHECK(!d.source.has_value());
    CHECK(d.eps == 0.0);
    CHECK(d.taus.empty());
    CHECK(d.ns.empty());
    CHECK(d.gamma == 0.25);
    CHECK(d.seed == 1);
    CHECK(d.jobs == 1);
    CHECK(d.q_policy == "auto");
    CHECK(d.g_lower_mode == GLowerMode::auto_mode);

    RunConfig c = config_from_json(json{{"tau", 0.1}, {"n", json::array({1, 2, 4})}, {"eps", 0.05},
                                        {"R", 0.9}, {"seed", 7}, {"g_lower_mode", "exact"}});
    CHECK(c.taus == std::vector<double>{0.1});
    CHECK(c.ns == std::vector<long>{1, 2, 4});
    CHECK(c.eps == 0.05);
    CHECK(c.rate == 0.9);
    CHECK(c.seed == 7);
    CHECK(c.g_lower_mode == GLowerMode::exact);

    CHECK_THROWS_AS(config_from_json(json::array()), ConfigError);
    CHECK_THROWS_AS(config_from_json(json{{"tau", "lots"}}), ConfigError);
    CHECK_THROWS_AS(config_from_json(json{{"q_policy", "bogus"}}), ConfigError);
    CHECK_THROWS_AS(config_from_json(json{{"g_lower_mode", "fast"}}), ConfigError);
    CHECK_THROWS_AS(config_from_json(json{{"verify", json{{"support_max", 1}}}}), ConfigError);
    CHECK_THROWS_AS(config_from_json(json{{"verify", json{{"dists", "many"}}}}), ConfigError);

    RunConfig v = config_from_json(json{{"verify", json{{"dists", 3},
                                                        {"support_max", 4},
                                                        {"sampler_trials", 10},
                                                        {"packing_instances", 5},
                                                        {"corrupt", "g_upper_bias"}}}});
    CHECK(v.verify.dists == 3);
    CHECK(v.verify.support_max == 4);
    CHECK(v.verify.sampler_trials == 10);
    CHECK(v.verify.packing_instances == 5);
    CHECK(v.verify.corrupt == "g_upper_bias");
}

TEST_CASE("quantities command: CSV grid, inf entries, byte determinism") {
    json cfg = json{{"source", bernoulli_source(0.25)},
                    {"eps", 0.0},
                    {"tau", json::array({0.0, 0.3})},
                    {"n", json::array({1, 2})}};
    const std::string cfg_path = write_file("quantities.json", cfg.dump());
    const std::string out1 = (kTmp / "q1.csv").string();
    const std::string out2 = (kTmp / "q2.csv").string();

    CHECK(run({"quantities", "--config", cfg_path, "--out", out1}) == 0);
    CHECK(run({"quantities", "--config", cfg_path, "--out", out2}) == 0);

    const std::string text = slurp(out1);
    CHECK(text == slurp(out2)); // same config, byte-identical output
    CHECK(text.rfind("n,tau,g_upper_per_n,g_lower_per_n,h_quantile\n", 0) == 0);
    CHECK(text.find("inf") != std::string::npos);          // tau=0.3 exceeds p_min
    CHECK(text.find("0.811278124459") != std::string::npos); // n=1, tau=0: the entropy
    // Grid size: header + 2x2 rows.
    CHECK(std::count(text.begin(), text.end(), '\n') == 5);
}

TEST_CASE("duality and second-order commands emit their grids") {
    json cfg = json{{"source", bernoulli_source(0.25)},
                    {"eps", 0.0},
                    {"tau", 0.1},
                    {"n", json::array({1, 2})},
                    {"R", 0.8}};
    const std::string cfg_path = write_file("duality.json", cfg.dump());
    const std::string dual_out = (kTmp / "dual.csv").string();
    const std::string so_out = (kTmp / "so.csv").string();

    CHECK(run({"duality", "--config", cfg_path, "--out", dual_out}) == 0);
    const std::string dual = slurp(dual_out);
    CHECK(dual.rfind("n,tau,g_lower_per_n,g_upper_per_n,gap_per_n\n", 0) == 0);

    CHECK(run({"second-order", "--config", cfg_path, "--out", so_out}) == 0);
    CHECK(slurp(so_out).rfind("n,tau,value\n", 0) == 0);
}

TEST_CASE("verify command: small clean run passes, corrupted closed form fails") {
    json base = json{{"seed", 5},
                     {"verify", json{{"dists", 6},
                                     {"support_max", 5},
                                     {"sampler_trials", 50},
                                     {"packing_instances", 10}}}};
    const std::string clean_path = write_file("verify_clean.json", base.dump());
    const std::string out = (kTmp / "verify.json").string();
    CHECK(run({"verify", "--config", clean_path, "--out", out}) == 0);

    json rep = json::parse(slurp(out));
    CHECK(rep.at("all_agreed").get<bool>());
    CHECK(rep.at("seed").get<uint64_t>() == 5);
    for (const char* suite :
         {"closed_form_vs_oracle", "sampler_soundness", "converse_micro", "packing_bound"}) {
        const json& s = rep.at("suites").at(suite);
        CHECK(s.at("agreed").get<bool>());
        CHECK(s.at("trials").get<uint64_t>() > 0);
    }

    base["verify"]["corrupt"] = "g_upper_bias";
    const std::string bad_path = write_file("verify_corrupt.json", base.dump());
    const std::string bad_out = (kTmp / "verify_bad.json").string();
    CHECK(run({"verify", "--config", bad_path, "--out", bad_out}) == 1);
    json bad = json::parse(slurp(bad_out));
    CHECK(!bad.at("all_agreed").get<bool>());
    CHECK(bad.at("suites").at("closed_form_vs_oracle").at("counterexample").is_string());
}

TEST_CASE("construct command writes reports, maps, and metrics") {
    const std::string maps_path = (kTmp / "maps.json").string();
    const std::string metrics_path = (kTmp / "metrics.csv").string();
    json cfg = json{{"source", bernoulli_source(0.3)},
                    {"eps", 0.0},
                    {"tau", 0.1},
                    {"n", json::array({8})},
                    {"gamma", 0.25},
                    {"q_policy", "auto"},
                    {"map_out", maps_path},
                    {"metrics_csv", metrics_path}};
    const std::string cfg_path = write_file("construct.json", cfg.dump());
    const std::string out = (kTmp / "construct.json").string();
    CHECK(run({"construct", "--config", cfg_path, "--out", out}) == 0);

    json rep = json::parse(slurp(out));
    REQUIRE(rep.is_array());
    REQUIRE(rep.size() == 1);
    CHECK(rep[0].at("n").get<long>() == 8);
    CHECK(rep[0].at("holds_distance").get<bool>());
    CHECK(rep[0].at("holds_length").get<bool>());
    CHECK(rep[0].at("measured_d_bar").get<double>() <=
          rep[0].at("distance_bound").get<double>() + 1e-12);

    json maps = json::parse(slurp(maps_path));
    REQUIRE(maps.is_array());
    CHECK(maps[0].at("map").at("K").get<int>() == 2);
    CHECK(maps[0].at("map").at("assign").size() == 256); // every length-8 block assigned

    const std::string metrics = slurp(metrics_path);
    CHECK(metrics.rfind("map_id,n,mean_length,d_bar,sup_class_distance\n", 0) == 0);
}

TEST_CASE("exit codes: config errors 2, capacity errors 3, bad flags 2") {
    CHECK(run({"quantities", "--config", (kTmp / "missing.json").string()}) == 2);
    const std::string bad_json = write_file("bad.json", "{ not json");
    CHECK(run({"quantities", "--config", bad_json}) == 2);

    // Valid JSON but no source: grid commands reject it.
    const std::string no_source = write_file("nosource.json", "{}");
    CHECK(run({"quantities", "--config", no_source}) == 2);

    // Explicit source with a missing blocklength table: config error.
    json expl = json{{"source", json{{"kind", "explicit"},
                                     {"K", 2},
                                     {"tables", json{{"1", json{{"a", 0.5}, {"b", 0.5}}}}}}},
                     {"tau", 0.0},
                     {"n", json::array({2})}};
    CHECK(run({"quantities", "--config", write_file("expl.json", expl.dump())}) == 2);

    // Blocklength beyond the enumeration budget: capacity error.
    json huge = json{{"source", bernoulli_source(0.25)}, {"tau", 0.0}, {"n", json::array({80})}};
    CHECK(run({"construct", "--config", write_file("huge.json", huge.dump())}) == 3);

    CHECK(run({"frobnicate", "--config", bad_json}) == 2); // unknown subcommand
    CHECK(run({"quantities"}) == 2);                       // --config is required
}

TEST_CASE("seed and jobs flag overrides reach the run") {
    json cfg = json{{"seed", 1},
                    {"verify", json{{"dists", 2}, {"support_max", 3}, {"sampler_trials", 5},
                                    {"packing_instances", 2}}}};
    const std::string cfg_path = write_file("verify_seed.json", cfg.dump());
    const std::string out = (kTmp / "verify_seed.json").string();
    CHECK(run({"verify", "--config", cfg_path, "--out", out, "--seed", "11"}) == 0);
    json rep = json::parse(slurp(out));
    CHECK(rep.at("seed").get<uint64_t>() == 11);
}
