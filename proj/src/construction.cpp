#include "vlir/construction.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vlir/quantities.hpp"

namespace vlir {

namespace {

constexpr double kPreconditionSlack = 1e-9; // relative slack on the weight bound
constexpr double kBoundarySlack = 1e-12;    // slice/threshold boundary comparisons

} // namespace

PackingResult greedy_pack(const PackingConfig& cfg) {
    if (cfg.n < 1) throw std::invalid_argument("greedy_pack: n must be >= 1");
    if (!(cfg.rate > 0.0)) throw std::invalid_argument("greedy_pack: rate must be positive");
    if (!(cfg.a > 0.0 && cfg.a <= 1.0)) throw std::invalid_argument("greedy_pack: a must lie in (0,1]");
    if (!(cfg.gamma > 0.0)) throw std::invalid_argument("greedy_pack: gamma must be positive");
    if (!(cfg.c > 0.0)) throw std::invalid_argument("greedy_pack: c must be positive");
    if (cfg.base_k < 2) throw std::invalid_argument("greedy_pack: base_K must be >= 2");
    if (cfg.weights.empty()) throw std::invalid_argument("greedy_pack: no atoms to pack");

    const double nd = static_cast<double>(cfg.n);
    const long long target_length = floor_tol(nd * cfg.a * cfg.rate);
    if (target_length < 0) throw std::invalid_argument("greedy_pack: negative target length");
    bool saturated = false;
    const uint64_t m_total =
        pow_saturating(cfg.base_k, static_cast<uint64_t>(target_length), &saturated);
    const double capacity =
        cfg.c * std::pow(static_cast<double>(cfg.base_k), -static_cast<double>(target_length));

    // Precondition: every weight <= c*K^{-n(a+gamma)R}. This also implies
    // weight <= capacity, which the greedy step relies on; both are checked so
    // violations surface as named errors instead of degenerate packings.
    const double weight_bound =
        cfg.c * std::pow(static_cast<double>(cfg.base_k), -nd * (cfg.a + cfg.gamma) * cfg.rate);
    KahanSum total;
    for (const auto& g : cfg.weights) {
        if (!(g.weight > 0.0) || !std::isfinite(g.weight))
            throw std::invalid_argument("greedy_pack: nonpositive weight in group '" + g.label + "'");
        if (g.count == 0)
            throw std::invalid_argument("greedy_pack: empty group '" + g.label + "'");
        if (g.weight > weight_bound * (1.0 + kPreconditionSlack))
            throw std::invalid_argument("greedy_pack: precondition violated at atom '" + g.label +
                                        "': weight " + std::to_string(g.weight) +
                                        " exceeds c*K^{-n(a+gamma)R} = " + std::to_string(weight_bound));
        if (g.weight > capacity)
            throw std::invalid_argument("greedy_pack: atom '" + g.label +
                                        "' exceeds the bin capacity c/M_n");
        total.add(static_cast<double>(g.count) * g.weight);
    }
    const double total_weight = total.value();
    if (total_weight > cfg.c * (1.0 + kBoundarySlack))
        throw std::invalid_argument("greedy_pack: total weight exceeds c");

    // Canonical scan order: descending weight, ties by label.
    std::vector<std::size_t> order(cfg.weights.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        const auto& a = cfg.weights[x];
        const auto& b = cfg.weights[y];
        if (a.weight != b.weight) return a.weight > b.weight;
        return a.label < b.label;
    });

    std::vector<uint64_t> remaining(cfg.weights.size());
    uint64_t atoms_left = 0;
    for (std::size_t g = 0; g < cfg.weights.size(); ++g) {
        remaining[g] = cfg.weights[g].count;
        atoms_left += cfg.weights[g].count;
    }

    PackingResult res;
    res.target_length = target_length;
    res.bin_count_total = m_total;
    res.capacity = capacity;
    res.total_weight = total_weight;

    uint64_t i = 0;
    while (atoms_left > 0) {
        ++i;
        if (!saturated && i == m_total && m_total > 0) {
            // Final bin absorbs the remainder; it may exceed capacity.
            PackedBin bin;
            bin.number = i;
            KahanSum mass;
            for (std::size_t g : order) {
                if (remaining[g] == 0) continue;
                bin.takes.push_back({g, remaining[g]});
                mass.add(static_cast<double>(remaining[g]) * cfg.weights[g].weight);
                atoms_left -= remaining[g];
                remaining[g] = 0;
            }
            bin.mass = mass.value();
            res.bins.push_back(std::move(bin));
            break;
        }
        PackedBin bin;
        bin.number = i;
        double s = 0.0;
        for (std::size_t g : order) {
            if (remaining[g] == 0) continue;
            const double w = cfg.weights[g].weight;
            uint64_t t = 0;
            if (s + w <= capacity) {
                double estimate = std::floor((capacity - s) / w);
                t = estimate >= static_cast<double>(remaining[g])
                        ? remaining[g]
                        : static_cast<uint64_t>(std::max(estimate, 1.0));
                // Fix the floating estimate so t is the exact greedy maximum
                // under the same arithmetic the stored bin mass uses.
                while (t < remaining[g] && s + static_cast<double>(t + 1) * w <= capacity) ++t;
                while (t > 0 && s + static_cast<double>(t) * w > capacity) --t;
            }
            if (t == 0) continue;
            s = s + static_cast<double>(t) * w;
            bin.takes.push_back({g, t});
            remaining[g] -= t;
            atoms_left -= t;
        }
        if (bin.takes.empty())
            throw std::logic_error("greedy_pack: empty bin despite weight <= capacity");
        bin.mass = s;
        res.bins.push_back(std::move(bin));
    }

    const uint64_t bins_used = res.bins.size();
    if (!saturated && bins_used == m_total) {
        res.pack_case = PackCase::full;
        res.i0 = m_total - 1;
    } else {
        res.pack_case = PackCase::short_fill;
        res.i0 = bins_used - 1;
    }

    KahanSum lhs;
    for (const auto& b : res.bins) lhs.add(std::abs(b.mass - capacity));
    // Empty bins beyond the last used one, aggregated: (M_n - used)*capacity.
    lhs.add(std::max(0.0, cfg.c - static_cast<double>(bins_used) * capacity));
    res.distance_lhs = 0.5 * lhs.value();
    res.short_case_bound = 0.5 * (cfg.c - total_weight);
    res.distance_bound =
        cfg.c * std::pow(static_cast<double>(cfg.base_k), -nd * cfg.gamma * cfg.rate) +
        res.short_case_bound;
    return res;
}

SliceDecomposition slice_decompose(const FiniteDistribution& dist, const SubDistribution& q_tilde,
                                   double gamma, long n) {
    if (!(gamma > 0.0)) throw std::invalid_argument("slice_decompose: gamma must be positive");
    if (n < 1) throw std::invalid_argument("slice_decompose: n must be >= 1");
    if (!q_tilde.base().same_data(dist) && q_tilde.base().ids() != dist.ids())
        throw std::invalid_argument("slice_decompose: q_tilde is not defined over dist's support");
    if (!check_feasible(dist, q_tilde.q(), q_tilde.deficiency()))
        throw std::invalid_argument("slice_decompose: q_tilde is not feasible");

    const double nd = static_cast<double>(n);
    const double width = 3.0 * gamma;
    const double lk = std::log(static_cast<double>(dist.base_K()));

    std::vector<long> slice_of(dist.size());
    long max_j = 0;
    for (std::size_t i = 0; i < dist.size(); ++i) {
        const double r = std::log(1.0 / q_tilde.q(i)) / lk / nd; // (1/n) iota_Qtilde >= 0
        long j = static_cast<long>(std::floor(r / width + kBoundarySlack));
        slice_of[i] = j;
        max_j = std::max(max_j, j);
    }

    std::vector<std::vector<std::size_t>> atoms(static_cast<std::size_t>(max_j) + 1);
    for (std::size_t i = 0; i < dist.size(); ++i)
        atoms[static_cast<std::size_t>(slice_of[i])].push_back(i);

    SliceDecomposition out;
    out.gamma = gamma;
    out.n = n;
    for (long j = 0; j <= max_j; ++j) {
        auto& members = atoms[static_cast<std::size_t>(j)];
        if (members.empty()) continue;
        Slice s;
        s.j = j;
        KahanSum pm, qm;
        for (std::size_t i : members) {
            pm.add(dist.prob(i));
            qm.add(q_tilde.q(i));
        }
        s.p_mass = pm.value();
        s.q_mass = qm.value();
        // J1 membership: j >= 1 and P[S^(j)] >= K^{-n*gamma*R_j}, R_j = 3*gamma*j.
        const double rj = width * static_cast<double>(j);
        const double threshold = std::pow(static_cast<double>(dist.base_K()), -nd * gamma * rj);
        s.in_j1 = j >= 1 && s.p_mass >= threshold * (1.0 - kBoundarySlack);
        s.atoms = std::move(members);
        out.slices.push_back(std::move(s));
    }
    return out;
}

DirectConstruction direct_construct(const FiniteDistribution& dist, const SubDistribution& q_tilde,
                                    double gamma, long n) {
    if (!(gamma > 0.0 && gamma < 0.5))
        throw std::invalid_argument("direct_construct: gamma must lie in (0, 0.5)");
    const double threshold_n = 1.0 / ((1.0 - 2.0 * gamma) * 3.0 * gamma);
    if (static_cast<double>(n) < threshold_n - kBoundarySlack)
        throw ConfigError("direct_construct: n=" + std::to_string(n) +
                          " is below the distinct-length threshold; need n >= " +
                          std::to_string(static_cast<long long>(std::ceil(threshold_n - 1e-9))) +
                          " for gamma=" + std::to_string(gamma));

    SliceDecomposition decomp = slice_decompose(dist, q_tilde, gamma, n);
    const double nd = static_cast<double>(n);
    const double a = 1.0 - 2.0 * gamma;

    std::vector<Assignment> assign(dist.size(), Assignment{0, 0});
    std::vector<std::pair<long, std::string>> cases;
    std::vector<long long> lengths_seen;

    for (const auto& slice : decomp.slices) {
        if (!slice.in_j1) continue; // J2, including j=0: everything to the null string

        const double rj = 3.0 * gamma * static_cast<double>(slice.j);
        // Canonical atom order within the slice: descending weight, then id.
        std::vector<std::size_t> members = slice.atoms;
        std::sort(members.begin(), members.end(), [&](std::size_t x, std::size_t y) {
            if (q_tilde.q(x) != q_tilde.q(y)) return q_tilde.q(x) > q_tilde.q(y);
            return dist.id(x) < dist.id(y);
        });

        // Group runs of bit-identical weights; block laws make type classes
        // bit-identical by construction, so slices compact enormously.
        PackingConfig cfg;
        cfg.n = n;
        cfg.rate = rj;
        cfg.a = a;
        cfg.gamma = gamma;
        cfg.c = slice.p_mass;
        cfg.base_k = dist.base_K();
        std::vector<std::vector<std::size_t>> group_atoms;
        for (std::size_t i = 0; i < members.size();) {
            std::size_t j = i;
            while (j < members.size() && q_tilde.q(members[j]) == q_tilde.q(members[i])) ++j;
            WeightGroup g;
            g.weight = q_tilde.q(members[i]);
            g.count = j - i;
            g.label = dist.id(members[i]);
            cfg.weights.push_back(std::move(g));
            group_atoms.emplace_back(members.begin() + static_cast<std::ptrdiff_t>(i),
                                     members.begin() + static_cast<std::ptrdiff_t>(j));
            i = j;
        }

        PackingResult packed = greedy_pack(cfg);
        cases.emplace_back(slice.j, packed.pack_case == PackCase::full ? "full" : "short");

        const long long length = packed.target_length;
        if (length < 1)
            throw std::logic_error("direct_construct: nonpositive slice length despite threshold");
        lengths_seen.push_back(length);

        std::vector<std::size_t> cursor(group_atoms.size(), 0);
        for (const auto& bin : packed.bins) {
            for (const auto& take : bin.takes) {
                for (uint64_t t = 0; t < take.count; ++t) {
                    std::size_t atom = group_atoms[take.group][cursor[take.group]++];
                    assign[atom] = Assignment{static_cast<uint32_t>(length), bin.number - 1};
                }
            }
        }
    }

    std::sort(lengths_seen.begin(), lengths_seen.end());
    if (std::adjacent_find(lengths_seen.begin(), lengths_seen.end()) != lengths_seen.end())
        throw std::logic_error("direct_construct: slice lengths collide despite the threshold");

    const double x = std::pow(static_cast<double>(dist.base_K()), -3.0 * nd * gamma * gamma);
    const double delta = q_tilde.deficiency();
    ConstructGuarantees g;
    g.gamma = gamma;
    g.tau = delta;
    g.n_threshold = threshold_n;
    g.distance_bound = delta + x / (1.0 - x);
    g.length_bound = a * g_objective(dist, q_tilde) -
                     6.0 * nd * gamma * a * x / ((1.0 - x) * (1.0 - x)) - 6.0 * nd * gamma * a - 1.0;
    g.case_per_slice = std::move(cases);

    VariableLengthMap map(dist.base_K(), dist.ids(), std::move(assign));
    return DirectConstruction{std::move(map), std::move(g), std::move(decomp)};
}

RateFloorWitness rate_floor_witness(const FiniteDistribution& dist, double eps, double tau, double gamma,
                                 long n, std::optional<double> r0_override) {
    if (!(eps >= 0.0 && eps < 1.0)) throw std::invalid_argument("rate_floor_witness: eps must lie in [0,1)");
    if (!(tau > 0.0)) throw std::invalid_argument("rate_floor_witness: tau must be positive");
    if (!(eps + tau < 1.0)) throw std::invalid_argument("rate_floor_witness: eps + tau must be below 1");
    if (!(gamma > 0.0)) throw std::invalid_argument("rate_floor_witness: gamma must be positive");
    if (n < 1) throw std::invalid_argument("rate_floor_witness: n must be >= 1");

    const double nd = static_cast<double>(n);
    const double r0 = r0_override ? *r0_override
                                  : spectral_sup_quantile(spectrum_of(dist), eps, n) - gamma;

    // A_n = atoms with (1/n) iota_P <= R0.
    const double lk = std::log(static_cast<double>(dist.base_K()));
    std::vector<bool> in_a(dist.size());
    KahanSum small_mass;
    uint64_t small_count = 0;
    for (std::size_t i = 0; i < dist.size(); ++i) {
        const double r = std::log(1.0 / dist.prob(i)) / lk / nd;
        in_a[i] = r <= r0 + kBoundarySlack;
        if (in_a[i]) {
            small_mass.add(dist.prob(i));
            ++small_count;
        }
    }

    // Hypothesis: P[(1/n) iota_P <= R0] <= eps + tau at this n.
    if (small_mass.value() > eps + tau + kBoundarySlack)
        throw ConfigError("rate_floor_witness: hypothesis fails at n=" + std::to_string(n) +
                          ": P[(1/n) iota <= R0] = " + std::to_string(small_mass.value()) +
                          " exceeds eps+tau = " + std::to_string(eps + tau));

    std::vector<double> q(dist.size());
    const double flat = small_count == 0
                            ? 0.0
                            : std::pow(static_cast<double>(dist.base_K()), -nd * r0) /
                                  static_cast<double>(small_count);
    KahanSum mass;
    for (std::size_t i = 0; i < dist.size(); ++i) {
        // Atoms in A_n satisfy P(x) >= K^{-n*R0} >= flat; the min guards the
        // one-atom boundary case against last-ulp pow rounding.
        q[i] = in_a[i] ? std::min(flat, dist.prob(i)) : dist.prob(i);
        mass.add(q[i]);
    }
    // Scale to total mass exactly 1-eps-tau; scaling down preserves
    // positivity and dominance and only raises self-information.
    const double scale = (1.0 - eps - tau) / mass.value();
    if (scale > 1.0 + kBoundarySlack)
        throw std::logic_error("rate_floor_witness: witness mass fell below 1-eps-tau");
    for (double& v : q) v = std::min(v, v * scale);

    KahanSum final_mass;
    for (double v : q) final_mass.add(v);
    SubDistribution q_bar(dist, std::move(q), 1.0 - final_mass.value());
    return RateFloorWitness{std::move(q_bar), r0, small_mass.value(), small_count};
}

} // namespace vlir
