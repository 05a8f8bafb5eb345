#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vlir/common.hpp"

namespace vlir {

// Explicit probability vector over named atoms: the blocklength-n source law.
// Immutable after construction; copies share the underlying data, so passing
// by value is cheap even for multi-million-atom block laws.
class FiniteDistribution {
  public:
    // Zero-probability atoms are dropped; negative or non-finite entries are
    // rejected. Remaining probabilities must sum to 1 within 1e-12 and atom
    // identifiers must be unique.
    FiniteDistribution(unsigned base_k, std::vector<std::string> ids, std::vector<double> probs);

    static FiniteDistribution from_pairs(unsigned base_k,
                                         const std::vector<std::pair<std::string, double>>& atoms);

    unsigned base_K() const { return d_->k; }
    std::size_t size() const { return d_->p.size(); }
    const std::string& id(std::size_t i) const { return d_->ids[i]; }
    double prob(std::size_t i) const { return d_->p[i]; }
    const std::vector<std::string>& ids() const { return d_->ids; }
    const std::vector<double>& probs() const { return d_->p; }
    double min_prob() const { return d_->pmin; }

    // Index of the atom with the given identifier, if present.
    std::optional<std::size_t> find(std::string_view atom) const;

    // True when both handles share the same underlying data (cheap identity).
    bool same_data(const FiniteDistribution& other) const { return d_ == other.d_; }

  private:
    struct Data {
        unsigned k;
        std::vector<std::string> ids;
        std::vector<double> p;
        // Permutation of indices sorting ids lexicographically; empty when the
        // ids are already sorted (the common case for block laws).
        std::vector<uint32_t> order;
        double pmin;
    };
    std::shared_ptr<const Data> d_;
};

struct SpectrumEntry {
    double value;        // probability value, in (0,1]
    double multiplicity; // atom count with this value; exact for counts < 2^53
};

// Compacted probability multiset: sufficient statistic for every scalar
// quantity in the library. Entries sorted by value, strictly increasing.
class Spectrum {
  public:
    Spectrum(unsigned base_k, std::vector<SpectrumEntry> entries);

    unsigned base_K() const { return d_->k; }
    const std::vector<SpectrumEntry>& entries() const { return d_->e; }
    double total_mass() const { return d_->mass; }
    double min_value() const { return d_->e.front().value; }

  private:
    struct Data {
        unsigned k;
        std::vector<SpectrumEntry> e;
        double mass;
    };
    std::shared_ptr<const Data> d_;
};

// A member of the feasible class Q_delta: strictly positive, dominated by the
// base law pointwise, total mass 1 - deficiency (within 1e-12).
class SubDistribution {
  public:
    SubDistribution(FiniteDistribution base, std::vector<double> q, double deficiency);

    const FiniteDistribution& base() const { return d_->base; }
    const std::vector<double>& q() const { return d_->q; }
    double q(std::size_t i) const { return d_->q[i]; }
    double deficiency() const { return d_->deficiency; }

  private:
    struct Data {
        FiniteDistribution base;
        std::vector<double> q;
        double deficiency;
    };
    std::shared_ptr<const Data> d_;
};

// log_K(1/P(atom)), in base-K units.
double self_information(const FiniteDistribution& dist, std::size_t index);
double self_information(const FiniteDistribution& dist, std::string_view atom);

double entropy(const FiniteDistribution& dist);
double entropy(const Spectrum& spec);

// (1/2) sum |P - Q| over the union of supports; atoms matched by identifier.
double variational_distance(const FiniteDistribution& p, const FiniteDistribution& q);
// Same-index-set overload.
double variational_distance(const std::vector<double>& p, const std::vector<double>& q);

Spectrum spectrum_of(const FiniteDistribution& dist);

// The three feasibility conditions with deficiency delta: positivity,
// pointwise dominance, and |sum q - (1 - delta)| <= 1e-9.
bool check_feasible(const FiniteDistribution& p, const std::vector<double>& q, double delta);
bool check_feasible(const SubDistribution& q, double delta);

// Q(x) = P(x) - removal(x); deficiency = sum of removals. Each removal must
// lie in [0, P(x)) so Q stays strictly positive.
SubDistribution shrink_q(const FiniteDistribution& dist, const std::map<std::string, double>& removals);
SubDistribution shrink_q_by_index(const FiniteDistribution& dist,
                                  const std::vector<std::pair<std::size_t, double>>& removals);

} // namespace vlir
