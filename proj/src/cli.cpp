#include "vlir/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>

#include <CLI11.hpp>

#include "vlir/construction.hpp"
#include "vlir/json_io.hpp"
#include "vlir/mapping.hpp"
#include "vlir/oracles.hpp"
#include "vlir/parallel.hpp"

namespace vlir {

namespace {

using nlohmann::json;

std::string fmt_g(double v) {
    char b[40];
    std::snprintf(b, sizeof b, "%.12g", v);
    return b;
}

std::string fmt_ext(const ExtendedReal& v) { return v.is_infinite() ? "inf" : fmt_g(v.value()); }

ExtendedReal scale_per_n(const ExtendedReal& v, long n) {
    return v.is_infinite() ? ExtendedReal::infinity()
                           : ExtendedReal::finite(v.value() / static_cast<double>(n));
}

void emit_text(const RunConfig& cfg, const std::string& text) {
    if (cfg.out.empty()) {
        std::fwrite(text.data(), 1, text.size(), stdout);
        return;
    }
    std::ofstream f(cfg.out, std::ios::binary);
    if (!f) throw ConfigError("config: cannot write '" + cfg.out + "'");
    f << text;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("config: cannot write '" + path + "'");
    f << text;
}

void require_grid(const RunConfig& cfg, bool need_source) {
    if (need_source && !cfg.source)
        throw ConfigError("config: 'source' is required for this command");
    if (cfg.ns.empty()) throw ConfigError("config: 'n' list must be nonempty");
    for (long n : cfg.ns)
        if (n < 1) throw ConfigError("config: blocklengths must be >= 1");
    if (!(cfg.eps >= 0.0 && cfg.eps < 1.0)) throw ConfigError("config: eps must lie in [0,1)");
    if (cfg.taus.empty()) throw ConfigError("config: 'tau' list must be nonempty");
    for (double t : cfg.taus) {
        if (!(t >= 0.0) || !std::isfinite(t)) throw ConfigError("config: tau must be finite and >= 0");
        if (!(cfg.eps + t < 1.0)) throw ConfigError("config: eps + tau must be below 1");
    }
    if (cfg.jobs < 1) throw ConfigError("config: jobs must be >= 1");
}

// Shared driver of the CSV commands: per-n work dispatched to the pool,
// rows buffered per grid slot and concatenated in (n, tau) order.
template <typename RowFn>
std::string grid_csv(const RunConfig& cfg, const char* header, const RowFn& row) {
    std::vector<std::string> chunk(cfg.ns.size());
    parallel_for(cfg.ns.size(), cfg.jobs, [&](std::size_t i) {
        const long n = cfg.ns[i];
        Spectrum spec = block_spectrum(*cfg.source, n);
        for (double tau : cfg.taus) {
            row(n, spec, tau, chunk[i]);
            chunk[i] += '\n';
        }
    });
    std::string text = header;
    text += '\n';
    for (const auto& c : chunk) text += c;
    return text;
}

} // namespace

RunConfig config_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config: document must be a JSON object");
    RunConfig cfg;
    auto number_list = [&](const char* key, auto& out) {
        auto it = j.find(key);
        if (it == j.end()) return;
        using T = typename std::decay_t<decltype(out)>::value_type;
        if (it->is_array()) {
            for (const auto& v : *it) {
                if (!v.is_number()) throw ConfigError(std::string("config: '") + key + "' entries must be numbers");
                out.push_back(v.get<T>());
            }
        } else if (it->is_number()) {
            out.push_back(it->get<T>());
        } else {
            throw ConfigError(std::string("config: '") + key + "' must be a number or array");
        }
    };
    auto scalar = [&](const char* key, auto& out) {
        auto it = j.find(key);
        if (it == j.end()) return;
        using T = std::decay_t<decltype(out)>;
        if constexpr (std::is_same_v<T, std::string>) {
            if (!it->is_string()) throw ConfigError(std::string("config: '") + key + "' must be a string");
            out = it->get<std::string>();
        } else {
            if (!it->is_number()) throw ConfigError(std::string("config: '") + key + "' must be a number");
            out = it->get<T>();
        }
    };

    if (auto it = j.find("source"); it != j.end()) cfg.source = source_from_json(*it);
    scalar("eps", cfg.eps);
    number_list("tau", cfg.taus);
    number_list("n", cfg.ns);
    scalar("gamma", cfg.gamma);
    scalar("R", cfg.rate);
    scalar("seed", cfg.seed);
    scalar("jobs", cfg.jobs);
    scalar("q_policy", cfg.q_policy);
    scalar("out", cfg.out);
    scalar("map_out", cfg.map_out);
    scalar("metrics_csv", cfg.metrics_csv);

    std::string mode = "auto";
    scalar("g_lower_mode", mode);
    if (mode == "exact")
        cfg.g_lower_mode = GLowerMode::exact;
    else if (mode == "greedy")
        cfg.g_lower_mode = GLowerMode::greedy;
    else if (mode == "auto")
        cfg.g_lower_mode = GLowerMode::auto_mode;
    else
        throw ConfigError("config: g_lower_mode must be exact, greedy, or auto");

    if (cfg.q_policy != "smallest" && cfg.q_policy != "scale" && cfg.q_policy != "tail" &&
        cfg.q_policy != "auto")
        throw ConfigError("config: q_policy must be smallest, scale, tail, or auto");

    if (auto it = j.find("verify"); it != j.end()) {
        if (!it->is_object()) throw ConfigError("config: 'verify' must be an object");
        const json& v = *it;
        auto vscalar = [&](const char* key, auto& out) {
            auto f = v.find(key);
            if (f == v.end()) return;
            using T = std::decay_t<decltype(out)>;
            if constexpr (std::is_same_v<T, std::string>) {
                if (!f->is_string()) throw ConfigError(std::string("config: verify.") + key + " must be a string");
                out = f->get<std::string>();
            } else {
                if (!f->is_number_integer()) throw ConfigError(std::string("config: verify.") + key + " must be an integer");
                out = f->get<T>();
            }
        };
        vscalar("dists", cfg.verify.dists);
        vscalar("support_max", cfg.verify.support_max);
        vscalar("sampler_trials", cfg.verify.sampler_trials);
        vscalar("packing_instances", cfg.verify.packing_instances);
        vscalar("corrupt", cfg.verify.corrupt);
        if (cfg.verify.support_max < 2 || cfg.verify.support_max > 12)
            throw ConfigError("config: verify.support_max must lie in [2,12]");
    }
    return cfg;
}

SubDistribution make_q_tilde(const FiniteDistribution& p, double delta, const std::string& policy) {
    if (!(delta >= 0.0 && delta < 1.0))
        throw ConfigError("q_tilde: deficiency must lie in [0,1), got " + std::to_string(delta));
    const bool smallest_ok = p.min_prob() > delta;
    std::string pick = policy;
    if (pick == "auto") pick = smallest_ok ? "smallest" : "tail";
    if (pick == "smallest") {
        if (!smallest_ok)
            throw ConfigError("q_tilde: policy 'smallest' needs p_min > deficiency (p_min = " +
                              std::to_string(p.min_prob()) + ", deficiency = " + std::to_string(delta) +
                              "); use 'scale' or 'tail'");
        return g_upper_witness(p, delta);
    }
    if (pick == "scale") {
        std::vector<double> q(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) q[i] = (1.0 - delta) * p.prob(i);
        return SubDistribution(p, std::move(q), delta);
    }
    if (pick == "tail") {
        // Remove mass from the least likely atoms upward, keeping a 1e-3
        // fraction of every atom so Q stays strictly positive.
        std::vector<std::size_t> order(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (p.prob(a) != p.prob(b)) return p.prob(a) < p.prob(b);
            return p.id(a) < p.id(b);
        });
        std::vector<std::pair<std::size_t, double>> removals;
        KahanSum removed;
        double budget = delta;
        for (std::size_t i : order) {
            if (budget <= 0.0) break;
            const double take = std::min(budget, p.prob(i) * (1.0 - 1e-3));
            removals.emplace_back(i, take);
            removed.add(take);
            budget = delta - removed.value();
        }
        if (budget > 1e-15)
            throw ConfigError("q_tilde: deficiency too large for the tail policy");
        return shrink_q_by_index(p, removals);
    }
    throw ConfigError("q_tilde: unknown policy '" + policy + "'");
}

int cmd_quantities(const RunConfig& cfg) {
    require_grid(cfg, true);
    std::string text = grid_csv(cfg, "n,tau,g_upper_per_n,g_lower_per_n,h_quantile",
                                [&](long n, const Spectrum& spec, double tau, std::string& out) {
                                    const double delta = cfg.eps + tau;
                                    QuantityReport up = g_upper(spec, delta);
                                    QuantityReport low = g_lower(spec, delta, cfg.g_lower_mode);
                                    const double hq = spectral_sup_quantile(spec, delta, n);
                                    out += std::to_string(n) + ',' + fmt_g(tau) + ',' +
                                           fmt_ext(scale_per_n(up.value, n)) + ',' +
                                           fmt_ext(scale_per_n(low.value, n)) + ',' + fmt_g(hq);
                                });
    emit_text(cfg, text);
    return 0;
}

int cmd_second_order(const RunConfig& cfg) {
    require_grid(cfg, true);
    if (!(cfg.rate > 0.0) || !std::isfinite(cfg.rate))
        throw ConfigError("config: second-order needs a positive rate 'R'");
    std::string text = grid_csv(cfg, "n,tau,value",
                                [&](long n, const Spectrum& spec, double tau, std::string& out) {
                                    const double delta = cfg.eps + tau;
                                    QuantityReport up = g_upper(spec, delta);
                                    const double nd = static_cast<double>(n);
                                    ExtendedReal v =
                                        up.value.is_infinite()
                                            ? ExtendedReal::infinity()
                                            : ExtendedReal::finite(
                                                  (up.value.value() - nd * cfg.rate) / std::sqrt(nd));
                                    out += std::to_string(n) + ',' + fmt_g(tau) + ',' + fmt_ext(v);
                                });
    emit_text(cfg, text);
    return 0;
}

int cmd_duality(const RunConfig& cfg) {
    require_grid(cfg, true);
    std::string text = grid_csv(
        cfg, "n,tau,g_lower_per_n,g_upper_per_n,gap_per_n",
        [&](long n, const Spectrum& spec, double tau, std::string& out) {
            const double delta = cfg.eps + tau;
            QuantityReport up = g_upper(spec, delta);
            QuantityReport low = g_lower(spec, delta, cfg.g_lower_mode);
            ExtendedReal gap = up.value.is_infinite()
                                   ? ExtendedReal::infinity()
                                   : ExtendedReal::finite(up.value.value() - low.value.value());
            out += std::to_string(n) + ',' + fmt_g(tau) + ',' + fmt_ext(scale_per_n(low.value, n)) +
                   ',' + fmt_ext(scale_per_n(up.value, n)) + ',' + fmt_ext(scale_per_n(gap, n));
        });
    emit_text(cfg, text);
    return 0;
}

int cmd_construct(const RunConfig& cfg) {
    require_grid(cfg, true);
    if (!(cfg.gamma > 0.0 && cfg.gamma < 0.5))
        throw ConfigError("config: construct needs gamma in (0, 0.5)");

    struct Cell {
        json report;
        json map_entry;
        std::string metrics_row;
        bool holds_both = false;
    };
    const std::size_t per_n = cfg.taus.size();
    std::vector<Cell> cells(cfg.ns.size() * per_n);

    parallel_for(cfg.ns.size(), cfg.jobs, [&](std::size_t i) {
        const long n = cfg.ns[i];
        FiniteDistribution block = block_distribution(*cfg.source, n);
        for (std::size_t t = 0; t < per_n; ++t) {
            const double tau = cfg.taus[t];
            const double delta = cfg.eps + tau;
            SubDistribution q = make_q_tilde(block, delta, cfg.q_policy);
            DirectConstruction dc = direct_construct(block, q, cfg.gamma, n);
            auto classes = length_classes(dc.map, block);
            const double d_bar = avg_variational_distance(classes, block.base_K());
            const double mean = mean_length(classes);
            const double sup_d = per_class_sup_distance(classes, block.base_K());
            const bool holds_distance = d_bar <= dc.guarantees.distance_bound + 1e-12;
            const bool holds_length = mean >= dc.guarantees.length_bound - 1e-12;

            Cell& cell = cells[i * per_n + t];
            cell.holds_both = holds_distance && holds_length;
            cell.report = json{{"n", n},
                               {"tau", tau},
                               {"measured_d_bar", d_bar},
                               {"distance_bound", dc.guarantees.distance_bound},
                               {"measured_mean_length", mean},
                               {"length_bound", dc.guarantees.length_bound},
                               {"holds_distance", holds_distance},
                               {"holds_length", holds_length},
                               {"guarantees", to_json(dc.guarantees)}};
            if (!cfg.map_out.empty())
                cell.map_entry = json{{"n", n}, {"tau", tau}, {"map", to_json(dc.map)}};
            if (!cfg.metrics_csv.empty())
                cell.metrics_row = std::to_string(i * per_n + t) + ',' + std::to_string(n) + ',' +
                                   fmt_g(mean) + ',' + fmt_g(d_bar) + ',' + fmt_g(sup_d) + '\n';
        }
    });

    json reports = json::array();
    bool all_hold = true;
    for (const Cell& c : cells) {
        reports.push_back(c.report);
        all_hold = all_hold && c.holds_both;
    }
    emit_text(cfg, reports.dump(2) + "\n");

    if (!cfg.map_out.empty()) {
        json maps = json::array();
        for (const Cell& c : cells) maps.push_back(c.map_entry);
        write_json_file(cfg.map_out, maps);
    }
    if (!cfg.metrics_csv.empty()) {
        std::string csv = "map_id,n,mean_length,d_bar,sup_class_distance\n";
        for (const Cell& c : cells) csv += c.metrics_row;
        write_text_file(cfg.metrics_csv, csv);
    }
    return all_hold ? 0 : 1;
}

namespace {

OracleReport suite_closed_form(const RunConfig& cfg) {
    OracleReport rep{true, 0.0, 0, false, std::nullopt};
    SeededRng rng(cfg.seed);
    const double bias = cfg.verify.corrupt == "g_upper_bias" ? 1e-6 : 0.0;
    const double deltas[] = {0.01, 0.05, 0.1, 0.25, 0.4, 0.5};
    uint64_t finite_cases = 0;
    auto fail = [&](const std::string& why) {
        rep.agreed = false;
        if (!rep.counterexample) rep.counterexample = why;
    };
    for (uint64_t i = 0; i < cfg.verify.dists; ++i) {
        const unsigned k = i % 2 == 0 ? 2 : 3;
        const std::size_t support = 2 + rng.below(cfg.verify.support_max - 1);
        FiniteDistribution p = random_distribution(rng, k, support);
        const double delta = deltas[rng.below(6)];
        ++rep.trials;

        Spectrum spec = spectrum_of(p);
        QuantityReport closed = g_upper(spec, delta);
        VertexProbeReport vertex = g_upper_vertex_oracle(p, delta);
        if (closed.value.is_infinite() != vertex.value.is_infinite()) {
            fail("trial " + std::to_string(i) + ": finite/infinite classification differs");
            continue;
        }
        if (!closed.value.is_infinite()) {
            ++finite_cases;
            const double diff = std::abs(closed.value.value() + bias - vertex.value.value());
            rep.max_discrepancy = std::max(rep.max_discrepancy, diff);
            if (diff > 1e-9)
                fail("trial " + std::to_string(i) + ": sup-side closed form differs from vertex oracle by " +
                     fmt_g(diff));
        }
        QuantityReport low = g_lower(spec, delta, GLowerMode::exact);
        const double brute = g_lower_bruteforce(p, delta);
        const double ldiff = std::abs(low.value.value() - brute);
        rep.max_discrepancy = std::max(rep.max_discrepancy, ldiff);
        if (ldiff > 1e-9)
            fail("trial " + std::to_string(i) + ": inf-side value differs from subset enumeration by " +
                 fmt_g(ldiff));
    }
    if (bias > 0.0 && finite_cases == 0)
        fail("corrupt hook armed but no finite case was exercised");
    return rep;
}

OracleReport suite_sampler(const RunConfig& cfg) {
    OracleReport rep{true, 0.0, 0, false, std::nullopt};
    SeededRng rng(cfg.seed + 1);
    const uint64_t cases = std::min<uint64_t>(cfg.verify.dists, 50);
    for (uint64_t i = 0; i < cases; ++i) {
        const unsigned k = i % 2 == 0 ? 2 : 3;
        const std::size_t support = 2 + rng.below(cfg.verify.support_max - 1);
        FiniteDistribution p = random_distribution(rng, k, support);
        const double delta = p.min_prob() * 0.99 * rng.unit_co(); // finite regime
        QuantityReport closed = g_upper(spectrum_of(p), delta);
        SamplerReport s = g_upper_sampler(p, delta, cfg.verify.sampler_trials, rng.raw());
        ++rep.trials;
        if (s.no_data) continue;
        const double margin = s.max_objective - closed.value.value();
        rep.max_discrepancy = std::max(rep.max_discrepancy, margin);
        if (margin > 1e-9) {
            rep.agreed = false;
            if (!rep.counterexample)
                rep.counterexample = "trial " + std::to_string(i) + ": sampled objective exceeds the closed form by " + fmt_g(margin);
        }
    }
    return rep;
}

OracleReport suite_converse(const RunConfig& cfg) {
    OracleReport rep{true, 0.0, 0, false, std::nullopt};
    SeededRng rng(cfg.seed + 2);
    for (int i = 0; i < 5; ++i) {
        FiniteDistribution p = random_distribution(rng, 2, 2 + static_cast<std::size_t>(i) % 3);
        auto maps = enumerate_maps(p.ids(), 3, 2);
        for (double delta : {0.05, 0.1, 0.25}) {
            OracleReport r = converse_check(p, delta, maps);
            rep.trials += r.trials;
            rep.max_discrepancy = std::max(rep.max_discrepancy, r.max_discrepancy);
            if (!r.agreed) {
                rep.agreed = false;
                if (!rep.counterexample) rep.counterexample = r.counterexample;
            }
        }
    }
    return rep;
}

OracleReport suite_packing(const RunConfig& cfg) {
    OracleReport rep{true, 0.0, 0, false, std::nullopt};
    SeededRng rng(cfg.seed + 3);
    for (uint64_t t = 0; t < cfg.verify.packing_instances; ++t) {
        PackingConfig pc;
        pc.n = 4 + static_cast<long>(rng.below(9));
        pc.gamma = 0.1 + 0.2 * rng.unit_co();
        pc.a = 1.0 - 2.0 * pc.gamma;
        pc.rate = 0.5 + 1.5 * rng.unit_co();
        pc.c = 0.3 + 0.7 * rng.unit_co();
        pc.base_k = 2;
        const double wb = pc.c * std::pow(2.0, -static_cast<double>(pc.n) * (pc.a + pc.gamma) * pc.rate);
        const double fill = (0.3 + 0.7 * rng.unit_co()) * pc.c;
        double sofar = 0.0;
        for (int g = 0; g < 8 && sofar < fill; ++g) {
            const double w = wb * (0.1 + 0.9 * rng.unit_co());
            const auto room = static_cast<uint64_t>(std::min(5000.0, std::floor((fill - sofar) / w)));
            if (room == 0) continue;
            const uint64_t count = 1 + rng.below(room);
            pc.weights.push_back({w, count, "g" + std::to_string(g)});
            sofar += static_cast<double>(count) * w;
        }
        if (pc.weights.empty()) pc.weights.push_back({wb * 0.5, 1, "g0"});

        PackingResult r = greedy_pack(pc);
        ++rep.trials;
        const double excess = r.distance_lhs - r.distance_bound;
        rep.max_discrepancy = std::max(rep.max_discrepancy, excess);
        if (excess > 1e-12) {
            rep.agreed = false;
            if (!rep.counterexample)
                rep.counterexample = "instance " + std::to_string(t) + ": measured distance exceeds the bound by " + fmt_g(excess);
        }
        if (r.pack_case == PackCase::short_fill &&
            std::abs(r.distance_lhs - r.short_case_bound) > 1e-9) {
            rep.agreed = false;
            if (!rep.counterexample)
                rep.counterexample = "instance " + std::to_string(t) +
                                     ": short-fill distance differs from (c-W)/2 by " +
                                     fmt_g(r.distance_lhs - r.short_case_bound);
        }
    }
    return rep;
}

} // namespace

int cmd_verify(const RunConfig& cfg) {
    if (cfg.verify.dists < 1) throw ConfigError("config: verify.dists must be >= 1");
    json out = json::object();
    out["seed"] = cfg.seed;

    OracleReport s1 = suite_closed_form(cfg);
    OracleReport s2 = suite_sampler(cfg);
    OracleReport s3 = suite_converse(cfg);
    OracleReport s4 = suite_packing(cfg);

    out["suites"] = json{{"closed_form_vs_oracle", to_json(s1)},
                         {"sampler_soundness", to_json(s2)},
                         {"converse_micro", to_json(s3)},
                         {"packing_bound", to_json(s4)}};
    const bool all = s1.agreed && s2.agreed && s3.agreed && s4.agreed;
    out["all_agreed"] = all;
    emit_text(cfg, out.dump(2) + "\n");
    return all ? 0 : 1;
}

int run_cli(int argc, char** argv) {
    CLI::App app{"variable-length intrinsic-randomness toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;
    long long seed_override = -1;
    int jobs_override = 0;

    auto add_common = [&](CLI::App* sc) {
        sc->add_option("--config", config_path, "JSON run configuration")->required();
        sc->add_option("--out", out_override, "output path (default: field in config, else stdout)");
        sc->add_option("--seed", seed_override, "override the config seed");
        sc->add_option("--jobs", jobs_override, "override the worker count");
    };
    CLI::App* quantities = app.add_subcommand("quantities", "per-n quantity grid as CSV");
    CLI::App* construct = app.add_subcommand("construct", "build maps and check their guarantees");
    CLI::App* verify = app.add_subcommand("verify", "run the oracle verification suites");
    CLI::App* second_order = app.add_subcommand("second-order", "second-order term grid as CSV");
    CLI::App* duality = app.add_subcommand("duality", "side-by-side lower/upper quantity table");
    for (CLI::App* sc : {quantities, construct, verify, second_order, duality}) add_common(sc);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        RunConfig cfg = config_from_json(load_json_file(config_path));
        if (!out_override.empty()) cfg.out = out_override;
        if (seed_override >= 0) cfg.seed = static_cast<uint64_t>(seed_override);
        if (jobs_override > 0) cfg.jobs = jobs_override;

        if (quantities->parsed()) return cmd_quantities(cfg);
        if (construct->parsed()) return cmd_construct(cfg);
        if (verify->parsed()) return cmd_verify(cfg);
        if (second_order->parsed()) return cmd_second_order(cfg);
        return cmd_duality(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const CapacityError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace vlir
