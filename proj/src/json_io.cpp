#include "vlir/json_io.hpp"

#include <cmath>
#include <fstream>

namespace vlir {

namespace {

using nlohmann::json;

constexpr double kInputSumTolerance = 1e-9;

[[noreturn]] void bad(const std::string& what) { throw ConfigError("config: " + what); }

const json& field(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) bad(std::string("missing field '") + key + "'");
    return *it;
}

unsigned base_of(const json& j) {
    const json& k = field(j, "K");
    if (!k.is_number_integer() || k.get<long long>() < 2) bad("'K' must be an integer >= 2");
    return k.get<unsigned>();
}

// An atoms object {"id": prob, ...}: checked to sum to 1 within 1e-9, then
// normalized exactly before construction.
FiniteDistribution parse_atoms(const json& atoms, unsigned base_k, const char* what) {
    if (!atoms.is_object() || atoms.empty()) bad(std::string(what) + " must be a nonempty object");
    std::vector<std::string> ids;
    std::vector<double> probs;
    KahanSum sum;
    for (auto it = atoms.begin(); it != atoms.end(); ++it) {
        if (!it.value().is_number()) bad(std::string(what) + ": probability of '" + it.key() + "' is not a number");
        const double p = it.value().get<double>();
        ids.push_back(it.key());
        probs.push_back(p);
        sum.add(p);
    }
    const double s = sum.value();
    if (!(std::abs(s - 1.0) <= kInputSumTolerance))
        bad(std::string(what) + ": probabilities sum to " + std::to_string(s) + ", not 1");
    for (double& p : probs) p /= s;
    try {
        return FiniteDistribution(base_k, std::move(ids), std::move(probs));
    } catch (const std::invalid_argument& e) {
        bad(std::string(what) + ": " + e.what());
    }
}

json atoms_json(const FiniteDistribution& dist) {
    json atoms = json::object();
    for (std::size_t i = 0; i < dist.size(); ++i) atoms[dist.id(i)] = dist.prob(i);
    return atoms;
}

} // namespace

json to_json(const FiniteDistribution& dist) {
    return json{{"K", dist.base_K()}, {"atoms", atoms_json(dist)}};
}

FiniteDistribution distribution_from_json(const json& j) {
    if (!j.is_object()) bad("distribution must be an object");
    return parse_atoms(field(j, "atoms"), base_of(j), "distribution atoms");
}

json to_json(const VariableLengthMap& map) {
    json assign = json::object();
    for (std::size_t i = 0; i < map.size(); ++i) {
        const Assignment& a = map.assignment(i);
        assign[map.id(i)] = json::array({a.length, a.index});
    }
    return json{{"K", map.base_K()}, {"assign", assign}};
}

VariableLengthMap map_from_json(const json& j) {
    if (!j.is_object()) bad("map must be an object");
    const unsigned k = base_of(j);
    const json& assign = field(j, "assign");
    if (!assign.is_object() || assign.empty()) bad("'assign' must be a nonempty object");
    std::vector<std::string> ids;
    std::vector<Assignment> as;
    for (auto it = assign.begin(); it != assign.end(); ++it) {
        const json& pair = it.value();
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_integer() ||
            !pair[1].is_number_integer())
            bad("assignment of '" + it.key() + "' must be [length, index]");
        ids.push_back(it.key());
        as.push_back(Assignment{pair[0].get<uint32_t>(), pair[1].get<uint64_t>()});
    }
    try {
        return VariableLengthMap(k, std::move(ids), std::move(as));
    } catch (const std::invalid_argument& e) {
        bad(std::string("map: ") + e.what());
    }
}

json to_json(const SourceModel& src) {
    switch (src.kind()) {
    case SourceModel::Kind::iid:
        return json{{"kind", "iid"}, {"K", src.base_K()}, {"symbols", atoms_json(src.symbols())}};
    case SourceModel::Kind::mixture:
        return json{{"kind", "mixture"},
                    {"K", src.base_K()},
                    {"alpha", src.alpha()},
                    {"components", json::array({atoms_json(src.component(0)), atoms_json(src.component(1))})}};
    case SourceModel::Kind::explicit_table: {
        json tables = json::object();
        for (const auto& [n, dist] : src.tables()) tables[std::to_string(n)] = atoms_json(dist);
        return json{{"kind", "explicit"}, {"K", src.base_K()}, {"tables", tables}};
    }
    }
    bad("unknown source kind");
}

SourceModel source_from_json(const json& j) {
    if (!j.is_object()) bad("source must be an object");
    const json& kind = field(j, "kind");
    if (!kind.is_string()) bad("'kind' must be a string");
    const std::string k = kind.get<std::string>();
    const unsigned base_k = base_of(j);
    if (k == "iid") return SourceModel::iid(parse_atoms(field(j, "symbols"), base_k, "symbols"));
    if (k == "mixture") {
        const json& alpha = field(j, "alpha");
        if (!alpha.is_number()) bad("'alpha' must be a number");
        const json& comps = field(j, "components");
        if (!comps.is_array() || comps.size() != 2) bad("'components' must be an array of two objects");
        try {
            return SourceModel::mixture(alpha.get<double>(),
                                        parse_atoms(comps[0], base_k, "component 0"),
                                        parse_atoms(comps[1], base_k, "component 1"));
        } catch (const std::invalid_argument& e) {
            bad(std::string("mixture: ") + e.what());
        }
    }
    if (k == "explicit") {
        const json& tables = field(j, "tables");
        if (!tables.is_object() || tables.empty()) bad("'tables' must be a nonempty object");
        std::map<long, FiniteDistribution> t;
        for (auto it = tables.begin(); it != tables.end(); ++it) {
            long n = 0;
            try {
                std::size_t used = 0;
                n = std::stol(it.key(), &used);
                if (used != it.key().size() || n < 1) throw std::invalid_argument("");
            } catch (const std::exception&) {
                bad("table key '" + it.key() + "' is not a positive blocklength");
            }
            t.emplace(n, parse_atoms(it.value(), base_k, ("table " + it.key()).c_str()));
        }
        return SourceModel::explicit_table(base_k, std::move(t));
    }
    bad("unknown source kind '" + k + "'");
}

json to_json(const ExtendedReal& v) {
    if (v.is_infinite()) return "inf";
    return v.value();
}

json to_json(const QuantityReport& rep) {
    json j{{"value", to_json(rep.value)}};
    switch (rep.method) {
    case Method::closed_form: j["method"] = "closed_form"; break;
    case Method::brute_force: j["method"] = "brute_force"; break;
    case Method::greedy: j["method"] = "greedy"; break;
    }
    if (rep.witness_reduce_smallest) j["witness_reduce_smallest"] = *rep.witness_reduce_smallest;
    if (rep.witness_kept_counts) j["witness_kept_counts"] = *rep.witness_kept_counts;
    return j;
}

json to_json(const OracleReport& rep) {
    json j{{"agreed", rep.agreed},
           {"max_discrepancy", rep.max_discrepancy},
           {"trials", rep.trials},
           {"vacuous", rep.vacuous}};
    if (rep.counterexample) j["counterexample"] = *rep.counterexample;
    return j;
}

json to_json(const ConstructGuarantees& g) {
    json cases = json::array();
    for (const auto& [j_idx, c] : g.case_per_slice) cases.push_back(json::array({j_idx, c}));
    return json{{"distance_bound", g.distance_bound}, {"length_bound", g.length_bound},
                {"n_threshold", g.n_threshold},       {"gamma", g.gamma},
                {"tau", g.tau},                       {"case_per_slice", cases}};
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) bad("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        bad("cannot parse '" + path + "': " + e.what());
    }
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw ConfigError("config: cannot write '" + path + "'");
    out << j.dump(2) << '\n';
}

} // namespace vlir
