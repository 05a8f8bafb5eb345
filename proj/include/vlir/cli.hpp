#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vlir/quantities.hpp"
#include "vlir/source.hpp"

namespace vlir {

// Options of the verification command. `corrupt` is a test hook: the value
// "g_upper_bias" injects a small bias into the closed form inside the
// comparison suite, which the oracle run must detect (negative test for the
// verification machinery itself).
struct VerifyOptions {
    uint64_t dists = 200;
    std::size_t support_max = 8;
    uint64_t sampler_trials = 2000;
    uint64_t packing_instances = 200;
    std::string corrupt;
};

// One batch-run configuration, loaded from a single JSON document; the
// --seed/--jobs/--out flags override the corresponding fields.
struct RunConfig {
    std::optional<SourceModel> source;
    double eps = 0.0;
    std::vector<double> taus;
    std::vector<long> ns;
    double gamma = 0.25;
    double rate = 0.0; // R of the second-order command
    uint64_t seed = 1;
    int jobs = 1;
    GLowerMode g_lower_mode = GLowerMode::auto_mode;
    std::string q_policy = "auto"; // smallest | scale | tail | auto
    std::string out;               // empty: stdout
    std::string map_out;           // construct: dump the built maps as JSON
    std::string metrics_csv;       // construct: per-map measured metrics
    VerifyOptions verify;
};

RunConfig config_from_json(const nlohmann::json& j);

// The deficiency-delta member of the feasible class used by the construct
// command: "smallest" reduces the minimum-probability atom (requires
// p_min > delta), "scale" takes (1-delta)*P, "tail" removes mass from the
// smallest atoms upward leaving each a 1e-3 fraction floor, "auto" picks
// smallest when feasible and tail otherwise.
SubDistribution make_q_tilde(const FiniteDistribution& p, double delta, const std::string& policy);

// Subcommand bodies; each returns the process exit code (0 ok,
// 1 verification failure, 2 config error, 3 capacity error).
int cmd_quantities(const RunConfig& cfg);
int cmd_construct(const RunConfig& cfg);
int cmd_verify(const RunConfig& cfg);
int cmd_second_order(const RunConfig& cfg);
int cmd_duality(const RunConfig& cfg);

// Full argv entry: parse flags, load the config, dispatch, map exceptions to
// exit codes.
int run_cli(int argc, char** argv);

} // namespace vlir
