#include "vlir/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "vlir/quantities.hpp"

namespace vlir {

namespace {

constexpr double kInfiniteBand = 1e-12; // same regime boundary as the closed form
constexpr double kTolerance = 1e-9;

double objective_against(const FiniteDistribution& p, const std::vector<double>& q) {
    KahanSum s;
    for (std::size_t i = 0; i < p.size(); ++i)
        s.add(p.prob(i) * log_base(p.base_K(), 1.0 / q[i]));
    return s.value();
}

} // namespace

VertexProbeReport g_upper_vertex_oracle(const FiniteDistribution& dist, double delta) {
    if (!(delta >= 0.0 && delta < 1.0))
        throw std::invalid_argument("g_upper_vertex_oracle: delta must lie in [0,1)");
    if (dist.size() > 24)
        throw CapacityError("g_upper_vertex_oracle: support " + std::to_string(dist.size()) +
                            " exceeds 24; use g_upper_sampler for large supports");

    VertexProbeReport rep;
    if (dist.min_prob() <= delta + kInfiniteBand) {
        // Divergence certificate: drive the smallest atom toward zero.
        std::size_t x0 = 0;
        for (std::size_t i = 1; i < dist.size(); ++i)
            if (dist.prob(i) < dist.prob(x0)) x0 = i;
        const double p0 = dist.prob(x0);
        for (double eta : {1e-3, 1e-6, 1e-9}) {
            std::vector<double> q(dist.size());
            const double removed_here = p0 * (1.0 - eta);
            const double rem = std::max(0.0, delta - removed_here);
            const double f = rem / (1.0 - p0);
            if (!(f < 1.0))
                throw std::invalid_argument(
                    "g_upper_vertex_oracle: deficiency too close to 1 for the probe sequence");
            for (std::size_t i = 0; i < dist.size(); ++i)
                q[i] = i == x0 ? eta * p0 : dist.prob(i) * (1.0 - f);
            rep.probe_objectives.push_back(objective_against(dist, q));
        }
        for (std::size_t i = 1; i < rep.probe_objectives.size(); ++i)
            if (!(rep.probe_objectives[i] > rep.probe_objectives[i - 1]))
                throw std::logic_error("g_upper_vertex_oracle: probe sequence failed to increase");
        rep.value = ExtendedReal::infinity();
        return rep;
    }

    // Finite regime: delta < every atom, so no box constraint can be active
    // and the vertices are exactly the single-atom reductions.
    double best = -1.0;
    for (std::size_t i = 0; i < dist.size(); ++i) {
        SubDistribution q = shrink_q_by_index(dist, {{i, delta}});
        const double obj = g_objective(dist, q);
        rep.probe_objectives.push_back(obj);
        best = std::max(best, obj);
    }
    rep.value = ExtendedReal::finite(best);
    return rep;
}

SamplerReport g_upper_sampler(const FiniteDistribution& dist, double delta, uint64_t trials,
                              uint64_t seed) {
    if (!(delta >= 0.0 && delta < 1.0))
        throw std::invalid_argument("g_upper_sampler: delta must lie in [0,1)");
    SamplerReport rep{0.0, trials, trials == 0};
    if (trials == 0) return rep;

    SeededRng rng(seed);
    const std::size_t n = dist.size();
    std::vector<double> prop(n), removal(n), q(n);
    double best = -std::numeric_limits<double>::infinity();
    for (uint64_t t = 0; t < trials; ++t) {
        // Dirichlet proportions for the removal vector, then redistribute any
        // mass that would push an atom below P(x)*1e-12 (caps keep Q positive).
        KahanSum tot;
        for (std::size_t i = 0; i < n; ++i) {
            prop[i] = rng.exp1();
            tot.add(prop[i]);
        }
        const double scale = delta / tot.value();
        double excess = 0.0;
        for (std::size_t i = 0; i < n; ++i) removal[i] = prop[i] * scale;
        for (std::size_t pass = 0; pass <= n; ++pass) {
            excess = 0.0;
            KahanSum open;
            for (std::size_t i = 0; i < n; ++i) {
                const double cap = dist.prob(i) * (1.0 - 1e-12);
                if (removal[i] >= cap) {
                    excess += removal[i] - cap;
                    removal[i] = cap;
                } else {
                    open.add(prop[i]);
                }
            }
            if (excess <= 0.0) break;
            const double denom = open.value();
            if (denom <= 0.0) break; // all capped; tiny residual stays unassigned
            for (std::size_t i = 0; i < n; ++i) {
                const double cap = dist.prob(i) * (1.0 - 1e-12);
                if (removal[i] < cap) removal[i] += excess * prop[i] / denom;
            }
        }
        for (std::size_t i = 0; i < n; ++i) q[i] = dist.prob(i) - removal[i];
        best = std::max(best, objective_against(dist, q));
    }
    rep.max_objective = best;
    return rep;
}

double g_lower_bruteforce(const FiniteDistribution& dist, double delta) {
    if (!(delta >= 0.0 && delta < 1.0))
        throw std::invalid_argument("g_lower_bruteforce: delta must lie in [0,1)");
    if (dist.size() > 20)
        throw CapacityError("g_lower_bruteforce: support " + std::to_string(dist.size()) +
                            " exceeds 20 (2^N subsets); use the spectrum-based computation");
    const std::size_t n = dist.size();
    const uint64_t masks = uint64_t{1} << n;
    const double need = 1.0 - delta - 1e-12;
    double best = std::numeric_limits<double>::infinity();
    for (uint64_t m = 1; m < masks; ++m) {
        KahanSum mass;
        for (std::size_t i = 0; i < n; ++i)
            if (m >> i & 1) mass.add(dist.prob(i));
        const double pa = mass.value();
        if (pa < need) continue;
        KahanSum obj;
        obj.add(pa * log_base(dist.base_K(), pa));
        for (std::size_t i = 0; i < n; ++i)
            if (m >> i & 1) obj.add(dist.prob(i) * log_base(dist.base_K(), 1.0 / dist.prob(i)));
        best = std::min(best, std::max(0.0, obj.value()));
    }
    if (!std::isfinite(best))
        throw std::invalid_argument("g_lower_bruteforce: no feasible subset (empty support?)");
    return best;
}

namespace {

// Restricted-growth strings of the given length with at most max_blocks
// distinct values: one canonical representative per set partition.
std::vector<std::vector<uint64_t>> rgs_partitions(std::size_t size, uint64_t max_blocks) {
    std::vector<std::vector<uint64_t>> out;
    std::vector<uint64_t> cur(size);
    auto rec = [&](auto&& self, std::size_t pos, uint64_t used) -> void {
        if (pos == size) {
            out.push_back(cur);
            return;
        }
        const uint64_t limit = std::min<uint64_t>(used + 1, max_blocks);
        for (uint64_t v = 0; v < limit; ++v) {
            cur[pos] = v;
            self(self, pos + 1, std::max(used, v + 1));
        }
    };
    rec(rec, 0, 0);
    return out;
}

} // namespace

std::vector<VariableLengthMap> enumerate_maps(const std::vector<std::string>& atom_ids,
                                              unsigned max_len, unsigned base_k) {
    if (atom_ids.size() > 5 || max_len > 3 || base_k != 2)
        throw CapacityError("enumerate_maps: exhaustive enumeration is capped at 5 atoms, "
                            "max_len 3, base 2; use sample_random_maps beyond that");
    if (atom_ids.empty()) throw std::invalid_argument("enumerate_maps: no atoms");

    const std::size_t n = atom_ids.size();
    std::vector<VariableLengthMap> out;
    std::vector<uint32_t> lengths(n, 0);

    // Odometer over length vectors.
    while (true) {
        // Group atoms by length, preserving order.
        std::vector<std::vector<std::size_t>> classes(max_len + 1);
        for (std::size_t i = 0; i < n; ++i) classes[lengths[i]].push_back(i);

        // Per-class partition choices.
        std::vector<std::vector<std::vector<uint64_t>>> choices;
        std::vector<std::vector<std::size_t>> class_atoms;
        for (uint32_t m = 0; m <= max_len; ++m) {
            if (classes[m].empty()) continue;
            choices.push_back(rgs_partitions(classes[m].size(), pow_saturating(base_k, m)));
            class_atoms.push_back(classes[m]);
        }

        std::vector<std::size_t> pick(choices.size(), 0);
        while (true) {
            std::vector<Assignment> assign(n);
            for (std::size_t c = 0; c < choices.size(); ++c) {
                const auto& part = choices[c][pick[c]];
                for (std::size_t k = 0; k < class_atoms[c].size(); ++k) {
                    const std::size_t atom = class_atoms[c][k];
                    assign[atom] = Assignment{lengths[atom], part[k]};
                }
            }
            out.emplace_back(base_k, atom_ids, std::move(assign));

            std::size_t c = 0;
            while (c < pick.size() && ++pick[c] == choices[c].size()) pick[c++] = 0;
            if (c == pick.size()) break;
        }

        std::size_t i = 0;
        while (i < n && ++lengths[i] > max_len) lengths[i++] = 0;
        if (i == n) break;
    }
    return out;
}

std::vector<VariableLengthMap> sample_random_maps(const FiniteDistribution& dist, unsigned max_len,
                                                  std::size_t count, uint64_t seed) {
    SeededRng rng(seed);
    std::vector<VariableLengthMap> out;
    out.reserve(count);
    for (std::size_t t = 0; t < count; ++t) {
        std::vector<Assignment> assign(dist.size());
        for (std::size_t i = 0; i < dist.size(); ++i) {
            const uint32_t m = static_cast<uint32_t>(rng.below(max_len + 1));
            assign[i] = Assignment{m, rng.below(pow_saturating(dist.base_K(), m))};
        }
        out.emplace_back(dist.base_K(), dist.ids(), std::move(assign));
    }
    return out;
}

OracleReport converse_check(const FiniteDistribution& dist, double delta,
                            const std::vector<VariableLengthMap>& maps) {
    OracleReport rep{true, 0.0, maps.size(), false, std::nullopt};
    QuantityReport gu = g_upper(spectrum_of(dist), delta);
    if (gu.value.is_infinite()) {
        rep.vacuous = true;
        return rep;
    }
    const double bound = gu.value.value();
    for (std::size_t idx = 0; idx < maps.size(); ++idx) {
        auto classes = length_classes(maps[idx], dist);
        const double d = avg_variational_distance(classes, dist.base_K());
        if (d > delta + 1e-12) continue;
        const double mean = mean_length(classes);
        if (bound > 1e-12) rep.max_discrepancy = std::max(rep.max_discrepancy, mean / bound);
        if (mean > bound + kTolerance) {
            rep.agreed = false;
            if (!rep.counterexample) {
                char buf[160];
                std::snprintf(buf, sizeof buf,
                              "map #%zu: mean length %.12g exceeds bound %.12g at distance %.12g",
                              idx, mean, bound, d);
                rep.counterexample = std::string(buf);
            }
        }
    }
    return rep;
}

FiniteDistribution random_distribution(SeededRng& rng, unsigned base_k, std::size_t support) {
    if (support == 0) throw std::invalid_argument("random_distribution: empty support");
    std::vector<double> w(support);
    KahanSum tot;
    for (double& x : w) {
        x = rng.exp1();
        tot.add(x);
    }
    std::vector<std::string> ids(support);
    std::vector<double> probs(support);
    for (std::size_t i = 0; i < support; ++i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "x%02zu", i);
        ids[i] = buf;
        probs[i] = w[i] / tot.value();
    }
    return FiniteDistribution(base_k, std::move(ids), std::move(probs));
}

} // namespace vlir
