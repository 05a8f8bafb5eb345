#include "vlir/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace vlir {

namespace {

constexpr double kSumTolerance = 1e-12;

// Sorting permutation of ids, or empty when already sorted.
std::vector<uint32_t> sorted_order(const std::vector<std::string>& ids) {
    if (std::is_sorted(ids.begin(), ids.end())) return {};
    std::vector<uint32_t> order(ids.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(),
              [&](uint32_t a, uint32_t b) { return ids[a] < ids[b]; });
    return order;
}

const std::string& id_at_rank(const std::vector<std::string>& ids,
                              const std::vector<uint32_t>& order, std::size_t rank) {
    return order.empty() ? ids[rank] : ids[order[rank]];
}

} // namespace

FiniteDistribution::FiniteDistribution(unsigned base_k, std::vector<std::string> ids,
                                       std::vector<double> probs) {
    if (base_k < 2) throw std::invalid_argument("FiniteDistribution: base_K must be >= 2");
    if (ids.size() != probs.size())
        throw std::invalid_argument("FiniteDistribution: ids and probs differ in length");

    // Drop zero-probability atoms, reject anything negative or non-finite.
    std::size_t w = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        double p = probs[i];
        if (!std::isfinite(p) || p < 0.0)
            throw std::invalid_argument("FiniteDistribution: probability of atom '" + ids[i] +
                                        "' is negative or not finite");
        if (p == 0.0) continue;
        if (w != i) {
            ids[w] = std::move(ids[i]);
            probs[w] = p;
        }
        ++w;
    }
    ids.resize(w);
    probs.resize(w);
    if (w == 0) throw std::invalid_argument("FiniteDistribution: empty support");

    KahanSum sum;
    double pmin = probs[0];
    for (double p : probs) {
        sum.add(p);
        pmin = std::min(pmin, p);
    }
    if (std::abs(sum.value() - 1.0) > kSumTolerance)
        throw std::invalid_argument("FiniteDistribution: probabilities sum to " +
                                    std::to_string(sum.value()) + ", not 1 within 1e-12");

    auto order = sorted_order(ids);
    for (std::size_t r = 1; r < w; ++r) {
        if (id_at_rank(ids, order, r - 1) == id_at_rank(ids, order, r))
            throw std::invalid_argument("FiniteDistribution: duplicate atom id '" +
                                        id_at_rank(ids, order, r) + "'");
    }

    d_ = std::make_shared<Data>(Data{base_k, std::move(ids), std::move(probs), std::move(order), pmin});
}

FiniteDistribution FiniteDistribution::from_pairs(
    unsigned base_k, const std::vector<std::pair<std::string, double>>& atoms) {
    std::vector<std::string> ids;
    std::vector<double> probs;
    ids.reserve(atoms.size());
    probs.reserve(atoms.size());
    for (const auto& [id, p] : atoms) {
        ids.push_back(id);
        probs.push_back(p);
    }
    return FiniteDistribution(base_k, std::move(ids), std::move(probs));
}

std::optional<std::size_t> FiniteDistribution::find(std::string_view atom) const {
    const auto& ids = d_->ids;
    const auto& order = d_->order;
    std::size_t lo = 0, hi = ids.size();
    while (lo < hi) {
        std::size_t mid = lo + (hi - lo) / 2;
        std::size_t idx = order.empty() ? mid : order[mid];
        if (std::string_view(ids[idx]) < atom)
            lo = mid + 1;
        else
            hi = mid;
    }
    if (lo == ids.size()) return std::nullopt;
    std::size_t idx = order.empty() ? lo : order[lo];
    if (std::string_view(ids[idx]) != atom) return std::nullopt;
    return idx;
}

Spectrum::Spectrum(unsigned base_k, std::vector<SpectrumEntry> entries) {
    if (base_k < 2) throw std::invalid_argument("Spectrum: base_K must be >= 2");
    if (entries.empty()) throw std::invalid_argument("Spectrum: no entries");
    KahanSum mass;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        if (!std::isfinite(e.value) || e.value <= 0.0 || e.value > 1.0)
            throw std::invalid_argument("Spectrum: value outside (0,1]");
        if (!std::isfinite(e.multiplicity) || e.multiplicity < 1.0 ||
            std::abs(e.multiplicity - std::nearbyint(e.multiplicity)) > 1e-6)
            throw std::invalid_argument("Spectrum: multiplicity must be a positive integer");
        if (i > 0 && entries[i - 1].value >= e.value)
            throw std::invalid_argument("Spectrum: values must be strictly increasing");
        mass.add(e.value * e.multiplicity);
    }
    d_ = std::make_shared<Data>(Data{base_k, std::move(entries), mass.value()});
}

SubDistribution::SubDistribution(FiniteDistribution base, std::vector<double> q, double deficiency) {
    if (q.size() != base.size())
        throw std::invalid_argument("SubDistribution: q has wrong length");
    if (!(deficiency >= 0.0 && deficiency < 1.0))
        throw std::invalid_argument("SubDistribution: deficiency outside [0,1)");
    KahanSum sum;
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (!(q[i] > 0.0))
            throw std::invalid_argument("SubDistribution: q must be strictly positive (atom '" +
                                        base.id(i) + "')");
        if (q[i] > base.prob(i))
            throw std::invalid_argument("SubDistribution: q exceeds base probability at atom '" +
                                        base.id(i) + "'");
        sum.add(q[i]);
    }
    if (std::abs(sum.value() - (1.0 - deficiency)) > kSumTolerance)
        throw std::invalid_argument("SubDistribution: mass " + std::to_string(sum.value()) +
                                    " differs from 1 - deficiency by more than 1e-12");
    d_ = std::make_shared<Data>(Data{std::move(base), std::move(q), deficiency});
}

double self_information(const FiniteDistribution& dist, std::size_t index) {
    return log_base(dist.base_K(), 1.0 / dist.prob(index));
}

double self_information(const FiniteDistribution& dist, std::string_view atom) {
    auto idx = dist.find(atom);
    if (!idx) throw std::invalid_argument("self_information: unknown atom '" + std::string(atom) + "'");
    return self_information(dist, *idx);
}

double entropy(const FiniteDistribution& dist) {
    const double lk = std::log(static_cast<double>(dist.base_K()));
    KahanSum h;
    for (double p : dist.probs()) h.add(p * std::log(1.0 / p));
    return h.value() / lk;
}

double entropy(const Spectrum& spec) {
    const double lk = std::log(static_cast<double>(spec.base_K()));
    KahanSum h;
    for (const auto& e : spec.entries()) h.add(e.multiplicity * e.value * std::log(1.0 / e.value));
    return h.value() / lk;
}

double variational_distance(const FiniteDistribution& p, const FiniteDistribution& q) {
    // Merge over the union of supports; atoms matched by identifier.
    KahanSum s;
    for (std::size_t i = 0; i < p.size(); ++i) {
        auto j = q.find(p.id(i));
        s.add(std::abs(p.prob(i) - (j ? q.prob(*j) : 0.0)));
    }
    for (std::size_t j = 0; j < q.size(); ++j) {
        if (!p.find(q.id(j))) s.add(q.prob(j));
    }
    return 0.5 * s.value();
}

double variational_distance(const std::vector<double>& p, const std::vector<double>& q) {
    if (p.size() != q.size())
        throw std::invalid_argument("variational_distance: vectors differ in length");
    KahanSum s;
    for (std::size_t i = 0; i < p.size(); ++i) s.add(std::abs(p[i] - q[i]));
    return 0.5 * s.value();
}

Spectrum spectrum_of(const FiniteDistribution& dist) {
    std::vector<double> v = dist.probs();
    std::sort(v.begin(), v.end());
    std::vector<SpectrumEntry> entries;
    for (std::size_t i = 0; i < v.size();) {
        std::size_t j = i;
        while (j < v.size() && v[j] == v[i]) ++j;
        entries.push_back({v[i], static_cast<double>(j - i)});
        i = j;
    }
    return Spectrum(dist.base_K(), std::move(entries));
}

bool check_feasible(const FiniteDistribution& p, const std::vector<double>& q, double delta) {
    if (q.size() != p.size()) return false;
    if (!(delta >= 0.0 && delta < 1.0)) return false;
    KahanSum sum;
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (!(q[i] > 0.0)) return false;
        if (q[i] > p.prob(i)) return false;
        sum.add(q[i]);
    }
    return std::abs(sum.value() - (1.0 - delta)) <= 1e-9;
}

bool check_feasible(const SubDistribution& q, double delta) {
    return check_feasible(q.base(), q.q(), delta);
}

SubDistribution shrink_q(const FiniteDistribution& dist, const std::map<std::string, double>& removals) {
    std::vector<std::pair<std::size_t, double>> by_index;
    by_index.reserve(removals.size());
    for (const auto& [atom, amount] : removals) {
        auto idx = dist.find(atom);
        if (!idx) throw std::invalid_argument("shrink_q: unknown atom '" + atom + "'");
        by_index.emplace_back(*idx, amount);
    }
    return shrink_q_by_index(dist, by_index);
}

SubDistribution shrink_q_by_index(const FiniteDistribution& dist,
                                  const std::vector<std::pair<std::size_t, double>>& removals) {
    std::vector<double> q = dist.probs();
    KahanSum delta;
    for (const auto& [i, amount] : removals) {
        if (i >= q.size()) throw std::invalid_argument("shrink_q: atom index out of range");
        if (!(amount >= 0.0) || !std::isfinite(amount))
            throw std::invalid_argument("shrink_q: removal must be nonnegative");
        if (amount >= dist.prob(i))
            throw std::invalid_argument("shrink_q: removal at atom '" + dist.id(i) +
                                        "' is not below its probability (Q would not stay positive)");
        q[i] -= amount;
        delta.add(amount);
    }
    return SubDistribution(dist, std::move(q), delta.value());
}

} // namespace vlir
