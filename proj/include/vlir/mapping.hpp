#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vlir/distribution.hpp"

namespace vlir {

// Output string of the map: length m plus the index of the string within the
// K^m strings of that length. Strings are never materialized.
struct Assignment {
    uint32_t length;
    uint64_t index;
};

// The mapping from source atoms to variable-length strings over the size-K
// output alphabet. Immutable; cheap to copy.
class VariableLengthMap {
  public:
    VariableLengthMap(unsigned base_k, std::vector<std::string> atom_ids,
                      std::vector<Assignment> assignments);

    unsigned base_K() const { return d_->k; }
    std::size_t size() const { return d_->ids.size(); }
    const std::string& id(std::size_t i) const { return d_->ids[i]; }
    const Assignment& assignment(std::size_t i) const { return d_->assign[i]; }
    const std::vector<std::string>& ids() const { return d_->ids; }
    const std::vector<Assignment>& assignments() const { return d_->assign; }
    std::optional<std::size_t> find(std::string_view atom) const;

  private:
    struct Data {
        unsigned k;
        std::vector<std::string> ids;
        std::vector<Assignment> assign;
        std::vector<uint32_t> order; // ids sorted; empty when already sorted
    };
    std::shared_ptr<const Data> d_;
};

struct UsedString {
    uint64_t index;
    double mass; // accumulated probability of atoms mapped to this string
};

// One positive-mass length class D_m: its total mass and the strings actually
// hit, sorted by index. Unused strings are aggregated analytically by metrics.
struct LengthClass {
    uint32_t length;
    double mass;
    std::vector<UsedString> used;
};

// Classes with positive mass, sorted by length. Errors when some atom of the
// distribution has no assignment.
std::vector<LengthClass> length_classes(const VariableLengthMap& map, const FiniteDistribution& dist);

double mean_length(const std::vector<LengthClass>& classes);
double mean_length(const VariableLengthMap& map, const FiniteDistribution& dist);

// Average variational distance d-bar between the output law and the
// length-matched uniform law: (1/2) sum_m sum_u |P_phi(u) - P[D_m] K^{-m}|.
double avg_variational_distance(const std::vector<LengthClass>& classes, unsigned base_k);
double avg_variational_distance(const VariableLengthMap& map, const FiniteDistribution& dist);

// The same quantity through the other route of the defining identity:
// sum_m P[D_m] * d(class-conditional output, uniform_m). The two routes must
// agree within 1e-12.
double avg_variational_distance_mixture_route(const std::vector<LengthClass>& classes, unsigned base_k);

// max over classes of d(class-conditional output law, uniform on K^m strings).
double per_class_sup_distance(const std::vector<LengthClass>& classes, unsigned base_k);
double per_class_sup_distance(const VariableLengthMap& map, const FiniteDistribution& dist);

// Conditional law over the atoms of D_m, renormalized by the class mass.
FiniteDistribution class_conditional(const VariableLengthMap& map, const FiniteDistribution& dist,
                                     uint32_t length);

} // namespace vlir
