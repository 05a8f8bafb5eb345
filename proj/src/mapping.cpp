#include "vlir/mapping.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

namespace vlir {

namespace {

// K^{-m} in floating point; underflow to 0 for huge m is fine — the
// aggregated unused-string mass then correctly tends to the class mass.
double uniform_string_prob(unsigned k, uint32_t m) {
    return std::pow(static_cast<double>(k), -static_cast<double>(m));
}

} // namespace

VariableLengthMap::VariableLengthMap(unsigned base_k, std::vector<std::string> atom_ids,
                                     std::vector<Assignment> assignments) {
    if (base_k < 2) throw std::invalid_argument("VariableLengthMap: base_K must be >= 2");
    if (atom_ids.size() != assignments.size())
        throw std::invalid_argument("VariableLengthMap: ids and assignments differ in length");
    if (atom_ids.empty()) throw std::invalid_argument("VariableLengthMap: no atoms");
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        const auto& a = assignments[i];
        if (a.length == 0 && a.index != 0)
            throw std::invalid_argument("VariableLengthMap: length 0 permits only index 0 (atom '" +
                                        atom_ids[i] + "')");
        // index < K^m, compared with saturating integer arithmetic: huge m
        // means every uint64 index is admissible.
        bool saturated = false;
        uint64_t strings = pow_saturating(base_k, a.length, &saturated);
        if (!saturated && a.index >= strings)
            throw std::invalid_argument("VariableLengthMap: string index out of range for length " +
                                        std::to_string(a.length) + " (atom '" + atom_ids[i] + "')");
    }

    std::vector<uint32_t> order;
    if (!std::is_sorted(atom_ids.begin(), atom_ids.end())) {
        order.resize(atom_ids.size());
        std::iota(order.begin(), order.end(), 0u);
        std::sort(order.begin(), order.end(),
                  [&](uint32_t a, uint32_t b) { return atom_ids[a] < atom_ids[b]; });
    }
    for (std::size_t r = 1; r < atom_ids.size(); ++r) {
        const auto& prev = order.empty() ? atom_ids[r - 1] : atom_ids[order[r - 1]];
        const auto& cur = order.empty() ? atom_ids[r] : atom_ids[order[r]];
        if (prev == cur)
            throw std::invalid_argument("VariableLengthMap: atom '" + cur + "' assigned twice");
    }
    d_ = std::make_shared<Data>(
        Data{base_k, std::move(atom_ids), std::move(assignments), std::move(order)});
}

std::optional<std::size_t> VariableLengthMap::find(std::string_view atom) const {
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

std::vector<LengthClass> length_classes(const VariableLengthMap& map, const FiniteDistribution& dist) {
    if (map.base_K() != dist.base_K())
        throw std::invalid_argument("length_classes: map and distribution disagree on base_K");

    // Fast path: identical atom layout (constructed maps share the
    // distribution's atom order); otherwise match by identifier.
    const bool aligned = map.ids() == dist.ids();

    std::unordered_map<uint32_t, std::unordered_map<uint64_t, double>> acc;
    for (std::size_t i = 0; i < dist.size(); ++i) {
        const Assignment* a;
        if (aligned) {
            a = &map.assignment(i);
        } else {
            auto idx = map.find(dist.id(i));
            if (!idx)
                throw std::invalid_argument("length_classes: atom '" + dist.id(i) +
                                            "' has no assignment");
            a = &map.assignment(*idx);
        }
        acc[a->length][a->index] += dist.prob(i);
    }

    std::vector<LengthClass> classes;
    classes.reserve(acc.size());
    for (auto& [m, strings] : acc) {
        LengthClass cls;
        cls.length = m;
        cls.used.reserve(strings.size());
        for (const auto& [index, mass] : strings) cls.used.push_back({index, mass});
        std::sort(cls.used.begin(), cls.used.end(),
                  [](const UsedString& a, const UsedString& b) { return a.index < b.index; });
        KahanSum mass;
        for (const auto& u : cls.used) mass.add(u.mass);
        cls.mass = mass.value();
        classes.push_back(std::move(cls));
    }
    std::sort(classes.begin(), classes.end(),
              [](const LengthClass& a, const LengthClass& b) { return a.length < b.length; });
    return classes;
}

double mean_length(const std::vector<LengthClass>& classes) {
    KahanSum s;
    for (const auto& c : classes) s.add(static_cast<double>(c.length) * c.mass);
    return s.value();
}

double mean_length(const VariableLengthMap& map, const FiniteDistribution& dist) {
    return mean_length(length_classes(map, dist));
}

double avg_variational_distance(const std::vector<LengthClass>& classes, unsigned base_k) {
    KahanSum total;
    for (const auto& c : classes) {
        const double cap = c.mass * uniform_string_prob(base_k, c.length);
        KahanSum cls;
        for (const auto& u : c.used) cls.add(std::abs(u.mass - cap));
        // All unused strings of the class, aggregated: (K^m - #used) * cap.
        double unused = std::max(0.0, c.mass - static_cast<double>(c.used.size()) * cap);
        total.add(cls.value() + unused);
    }
    return 0.5 * total.value();
}

double avg_variational_distance(const VariableLengthMap& map, const FiniteDistribution& dist) {
    return avg_variational_distance(length_classes(map, dist), map.base_K());
}

double avg_variational_distance_mixture_route(const std::vector<LengthClass>& classes,
                                              unsigned base_k) {
    KahanSum total;
    for (const auto& c : classes) {
        const double unif = uniform_string_prob(base_k, c.length);
        KahanSum cls;
        for (const auto& u : c.used) cls.add(std::abs(u.mass / c.mass - unif));
        double unused = std::max(0.0, 1.0 - static_cast<double>(c.used.size()) * unif);
        total.add(c.mass * (0.5 * (cls.value() + unused)));
    }
    return total.value();
}

double per_class_sup_distance(const std::vector<LengthClass>& classes, unsigned base_k) {
    double sup = 0.0;
    for (const auto& c : classes) {
        const double unif = uniform_string_prob(base_k, c.length);
        KahanSum cls;
        for (const auto& u : c.used) cls.add(std::abs(u.mass / c.mass - unif));
        double unused = std::max(0.0, 1.0 - static_cast<double>(c.used.size()) * unif);
        sup = std::max(sup, 0.5 * (cls.value() + unused));
    }
    return sup;
}

double per_class_sup_distance(const VariableLengthMap& map, const FiniteDistribution& dist) {
    return per_class_sup_distance(length_classes(map, dist), map.base_K());
}

FiniteDistribution class_conditional(const VariableLengthMap& map, const FiniteDistribution& dist,
                                     uint32_t length) {
    const bool aligned = map.ids() == dist.ids();
    std::vector<std::string> ids;
    std::vector<double> probs;
    KahanSum mass;
    for (std::size_t i = 0; i < dist.size(); ++i) {
        const Assignment* a;
        if (aligned) {
            a = &map.assignment(i);
        } else {
            auto idx = map.find(dist.id(i));
            if (!idx)
                throw std::invalid_argument("class_conditional: atom '" + dist.id(i) +
                                            "' has no assignment");
            a = &map.assignment(*idx);
        }
        if (a->length != length) continue;
        ids.push_back(dist.id(i));
        probs.push_back(dist.prob(i));
        mass.add(dist.prob(i));
    }
    if (ids.empty())
        throw std::invalid_argument("class_conditional: no atom has length " + std::to_string(length));
    for (double& p : probs) p /= mass.value();
    return FiniteDistribution(dist.base_K(), std::move(ids), std::move(probs));
}

} // namespace vlir
