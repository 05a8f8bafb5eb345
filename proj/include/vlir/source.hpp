#pragma once

#include <map>
#include <memory>

#include "vlir/distribution.hpp"

namespace vlir {

// A general source at desk scale: i.i.d., a block-level mixture of two i.i.d.
// components (the standard non-ergodic example), or an explicit per-n table.
class SourceModel {
  public:
    enum class Kind { iid, mixture, explicit_table };

    static SourceModel iid(FiniteDistribution symbols);
    // P_{X^n} = alpha * P1^n + (1-alpha) * P2^n; components share one alphabet.
    static SourceModel mixture(double alpha, FiniteDistribution first, FiniteDistribution second);
    static SourceModel explicit_table(unsigned base_k, std::map<long, FiniteDistribution> tables);

    Kind kind() const { return d_->kind; }
    unsigned base_K() const { return d_->k; }

    const FiniteDistribution& symbols() const;            // iid
    double alpha() const;                                 // mixture
    const FiniteDistribution& component(int which) const; // mixture, which in {0,1}
    const std::map<long, FiniteDistribution>& tables() const; // explicit_table

  private:
    struct Data {
        Kind kind;
        unsigned k;
        std::vector<FiniteDistribution> dists; // iid: [symbols]; mixture: [first, second]
        double alpha;
        std::map<long, FiniteDistribution> tables;
    };
    explicit SourceModel(std::shared_ptr<const Data> d) : d_(std::move(d)) {}
    std::shared_ptr<const Data> d_;
};

// Spectrum of the blocklength-n law without enumerating atoms: one entry
// per symbol-count composition, multiplicity = multinomial coefficient.
// Budget: composition count <= 1e6.
Spectrum block_spectrum(const SourceModel& src, long n);

// Explicit blocklength-n law, atom ids = concatenated symbol ids.
// Budget: |alphabet|^n <= 2^22 atoms.
FiniteDistribution block_distribution(const SourceModel& src, long n);

} // namespace vlir
