#include "vlir/source.hpp"

#include <algorithm>
#include <cmath>

namespace vlir {

namespace {

constexpr double kMaxCompositions = 1e6;
constexpr uint64_t kMaxExplicitAtoms = uint64_t(1) << 22;

// C(n + a - 1, a - 1) in double; overflow-safe for budget checks.
double composition_count(long n, std::size_t a) {
    double c = 1.0;
    for (std::size_t i = 1; i < a; ++i) {
        c *= static_cast<double>(n + i) / static_cast<double>(i);
        if (c > 1e18) return c;
    }
    return c;
}

// Multinomial coefficient n! / prod(counts!). Exact u128 path when it fits,
// lgamma fallback otherwise (relative error ~1e-13, well inside the 1e-12
// mass tolerances it feeds).
double multinomial(long n, const std::vector<long>& counts) {
    unsigned __int128 m = 1;
    long rem = n;
    bool exact = true;
    for (long c : counts) {
        long k = std::min(c, rem - c);
        for (long i = 1; i <= k; ++i) {
            unsigned __int128 num = m * static_cast<unsigned __int128>(rem - k + i);
            if (num / static_cast<unsigned __int128>(rem - k + i) != m) {
                exact = false;
                break;
            }
            m = num / static_cast<unsigned __int128>(i);
        }
        if (!exact) break;
        rem -= c;
    }
    if (exact) return static_cast<double>(m);
    double lg = std::lgamma(static_cast<double>(n) + 1.0);
    for (long c : counts) lg -= std::lgamma(static_cast<double>(c) + 1.0);
    return std::exp(lg);
}

// Probability of one type class: prod p_k^{c_k}, computed the same way for
// every atom of the class so equal-probability grouping is bit-exact.
double class_value(const std::vector<double>& p, const std::vector<long>& counts) {
    double v = 1.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (counts[k] > 0) v *= std::pow(p[k], static_cast<double>(counts[k]));
    }
    return v;
}

// Enumerate all compositions of n over `arity` slots in a fixed order.
template <typename Leaf>
void for_each_composition(long n, std::size_t arity, const Leaf& leaf) {
    std::vector<long> counts(arity, 0);
    auto rec = [&](auto&& self, std::size_t slot, long rem) -> void {
        if (slot + 1 == arity) {
            counts[slot] = rem;
            leaf(counts);
            return;
        }
        for (long c = 0; c <= rem; ++c) {
            counts[slot] = c;
            self(self, slot + 1, rem - c);
        }
    };
    rec(rec, 0, n);
}

Spectrum group_into_spectrum(unsigned k, std::vector<SpectrumEntry> raw) {
    std::sort(raw.begin(), raw.end(),
              [](const SpectrumEntry& a, const SpectrumEntry& b) { return a.value < b.value; });
    std::vector<SpectrumEntry> grouped;
    for (const auto& e : raw) {
        if (!grouped.empty() && grouped.back().value == e.value)
            grouped.back().multiplicity += e.multiplicity;
        else
            grouped.push_back(e);
    }
    return Spectrum(k, std::move(grouped));
}

void check_composition_budget(long n, std::size_t arity) {
    double count = composition_count(n, arity);
    if (count > kMaxCompositions)
        throw CapacityError("block_spectrum: composition count " + std::to_string(count) +
                            " exceeds the 1e6 budget (limiting parameter: n with alphabet size " +
                            std::to_string(arity) + ")");
}

} // namespace

SourceModel SourceModel::iid(FiniteDistribution symbols) {
    auto d = std::make_shared<Data>();
    d->kind = Kind::iid;
    d->k = symbols.base_K();
    d->dists.push_back(std::move(symbols));
    d->alpha = 0.0;
    return SourceModel(std::move(d));
}

SourceModel SourceModel::mixture(double alpha, FiniteDistribution first, FiniteDistribution second) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("SourceModel::mixture: alpha must lie in (0,1)");
    if (first.base_K() != second.base_K())
        throw std::invalid_argument("SourceModel::mixture: components disagree on base_K");
    if (first.ids() != second.ids())
        throw std::invalid_argument("SourceModel::mixture: components must share one alphabet");
    auto d = std::make_shared<Data>();
    d->kind = Kind::mixture;
    d->k = first.base_K();
    d->dists.push_back(std::move(first));
    d->dists.push_back(std::move(second));
    d->alpha = alpha;
    return SourceModel(std::move(d));
}

SourceModel SourceModel::explicit_table(unsigned base_k, std::map<long, FiniteDistribution> tables) {
    if (tables.empty()) throw std::invalid_argument("SourceModel::explicit_table: empty table");
    for (const auto& [n, dist] : tables) {
        if (n < 1) throw std::invalid_argument("SourceModel::explicit_table: n must be >= 1");
        if (dist.base_K() != base_k)
            throw std::invalid_argument("SourceModel::explicit_table: table at n=" + std::to_string(n) +
                                        " disagrees on base_K");
    }
    auto d = std::make_shared<Data>();
    d->kind = Kind::explicit_table;
    d->k = base_k;
    d->alpha = 0.0;
    d->tables = std::move(tables);
    return SourceModel(std::move(d));
}

const FiniteDistribution& SourceModel::symbols() const {
    if (d_->kind != Kind::iid) throw std::logic_error("SourceModel::symbols: not an iid source");
    return d_->dists[0];
}

double SourceModel::alpha() const {
    if (d_->kind != Kind::mixture) throw std::logic_error("SourceModel::alpha: not a mixture");
    return d_->alpha;
}

const FiniteDistribution& SourceModel::component(int which) const {
    if (d_->kind != Kind::mixture) throw std::logic_error("SourceModel::component: not a mixture");
    if (which != 0 && which != 1) throw std::invalid_argument("SourceModel::component: which must be 0 or 1");
    return d_->dists[static_cast<std::size_t>(which)];
}

const std::map<long, FiniteDistribution>& SourceModel::tables() const {
    if (d_->kind != Kind::explicit_table) throw std::logic_error("SourceModel::tables: not an explicit source");
    return d_->tables;
}

Spectrum block_spectrum(const SourceModel& src, long n) {
    if (n < 1) throw std::invalid_argument("block_spectrum: n must be >= 1");
    switch (src.kind()) {
    case SourceModel::Kind::iid: {
        const auto& sym = src.symbols();
        check_composition_budget(n, sym.size());
        std::vector<SpectrumEntry> raw;
        for_each_composition(n, sym.size(), [&](const std::vector<long>& counts) {
            raw.push_back({class_value(sym.probs(), counts), multinomial(n, counts)});
        });
        return group_into_spectrum(src.base_K(), std::move(raw));
    }
    case SourceModel::Kind::mixture: {
        // Both components are constant on each type class of the shared
        // alphabet, so the mixture is too: no atom enumeration needed.
        const auto& a = src.component(0);
        const auto& b = src.component(1);
        check_composition_budget(n, a.size());
        const double alpha = src.alpha();
        std::vector<SpectrumEntry> raw;
        for_each_composition(n, a.size(), [&](const std::vector<long>& counts) {
            double v = alpha * class_value(a.probs(), counts) +
                       (1.0 - alpha) * class_value(b.probs(), counts);
            raw.push_back({v, multinomial(n, counts)});
        });
        return group_into_spectrum(src.base_K(), std::move(raw));
    }
    case SourceModel::Kind::explicit_table: {
        auto it = src.tables().find(n);
        if (it == src.tables().end())
            throw ConfigError("block_spectrum: explicit source has no table for n=" + std::to_string(n));
        return spectrum_of(it->second);
    }
    }
    throw std::logic_error("block_spectrum: unreachable");
}

FiniteDistribution block_distribution(const SourceModel& src, long n) {
    if (n < 1) throw std::invalid_argument("block_distribution: n must be >= 1");
    if (src.kind() == SourceModel::Kind::explicit_table) {
        auto it = src.tables().find(n);
        if (it == src.tables().end())
            throw ConfigError("block_distribution: explicit source has no table for n=" + std::to_string(n));
        return it->second;
    }

    const FiniteDistribution& first =
        src.kind() == SourceModel::Kind::iid ? src.symbols() : src.component(0);
    const std::size_t arity = first.size();
    bool saturated = false;
    uint64_t atom_count = pow_saturating(arity, static_cast<uint64_t>(n), &saturated);
    if (saturated || atom_count > kMaxExplicitAtoms)
        throw CapacityError("block_distribution: |alphabet|^n exceeds the 2^22 atom budget "
                            "(limiting parameter: n=" + std::to_string(n) + ")");

    // Multi-character symbol ids are joined with "," so block ids stay unique.
    bool single_char = true;
    for (const auto& id : first.ids()) single_char = single_char && id.size() == 1;

    const bool mix = src.kind() == SourceModel::Kind::mixture;
    const double alpha = mix ? src.alpha() : 1.0;
    const std::vector<double>& p1 = first.probs();
    const std::vector<double>* p2 = mix ? &src.component(1).probs() : nullptr;

    std::vector<std::string> ids;
    std::vector<double> probs;
    ids.reserve(atom_count);
    probs.reserve(atom_count);

    std::vector<std::size_t> digits(static_cast<std::size_t>(n), 0);
    std::vector<long> counts(arity, 0);
    counts[0] = n;
    for (uint64_t a = 0;; ++a) {
        std::string id;
        for (std::size_t pos = 0; pos < digits.size(); ++pos) {
            if (!single_char && pos > 0) id += ',';
            id += first.id(digits[pos]);
        }
        ids.push_back(std::move(id));
        // Probabilities are recomputed from counts, not chained atom to atom,
        // so every atom of a type class gets the bit-identical value.
        double v = alpha * class_value(p1, counts);
        if (mix) v += (1.0 - alpha) * class_value(*p2, counts);
        probs.push_back(v);

        if (a + 1 == atom_count) break;
        std::size_t pos = digits.size();
        while (pos > 0) {
            --pos;
            --counts[digits[pos]];
            if (++digits[pos] < arity) {
                ++counts[digits[pos]];
                break;
            }
            digits[pos] = 0;
            ++counts[0];
        }
    }
    return FiniteDistribution(src.base_K(), std::move(ids), std::move(probs));
}

} // namespace vlir
