#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vlir/distribution.hpp"
#include "vlir/mapping.hpp"

namespace vlir {

// One equal-weight group of atoms to pack. Product-source slices contain
// exponentially many identical weights, so packing works on (weight, count)
// groups; explicit atoms are groups of count 1.
struct WeightGroup {
    double weight;
    uint64_t count;
    std::string label; // used in diagnostics and for deterministic tie-breaks
};

struct PackingConfig {
    long n;
    double rate;  // R
    double a;     // in (0,1]
    double gamma; // > 0
    double c;     // >= total weight
    unsigned base_k;
    std::vector<WeightGroup> weights;
};

struct GroupTake {
    std::size_t group; // index into PackingConfig::weights
    uint64_t count;
};

struct PackedBin {
    uint64_t number; // 1-based bin index i
    double mass;
    std::vector<GroupTake> takes;
};

enum class PackCase { full, short_fill };

struct PackingResult {
    long long target_length;  // L = floor(n*a*R)
    uint64_t bin_count_total; // M_n = K^L (saturating)
    double capacity;          // c / M_n
    double total_weight;
    PackCase pack_case;
    uint64_t i0; // full: M_n - 1; short: index of the last filled step minus 1
    std::vector<PackedBin> bins;
    double distance_lhs;       // measured left side of the packing inequality
    double distance_bound;     // c*K^{-n*gamma*R} + (c - total_weight)/2
    double short_case_bound;   // (c - total_weight)/2, binding in the short case
};

// Greedy sequential packing: per bin, scan all remaining atoms in canonical
// order (descending weight, ties by label) and take any that keeps the bin
// sum <= c/M_n; the final bin absorbs the remainder when all M_n bins are
// needed. Precondition: every weight <= c*K^{-n(a+gamma)R}.
PackingResult greedy_pack(const PackingConfig& cfg);

struct Slice {
    long j;
    std::vector<std::size_t> atoms; // indices into the base distribution
    double p_mass;
    double q_mass;
    bool in_j1;
};

// Partition of the support by (1/n) iota_Qtilde into width-3*gamma intervals,
// with the J1/J2 split by slice mass against K^{-n*gamma*R_j}.
struct SliceDecomposition {
    double gamma;
    long n;
    std::vector<Slice> slices; // ascending j; only nonempty slices appear
};

SliceDecomposition slice_decompose(const FiniteDistribution& dist, const SubDistribution& q_tilde,
                                   double gamma, long n);

struct ConstructGuarantees {
    double distance_bound;
    double length_bound;
    double n_threshold;
    double gamma;
    double tau; // deficiency of the Q-tilde actually used (the eps+tau total)
    std::vector<std::pair<long, std::string>> case_per_slice; // packed slices: j -> full/short
};

struct DirectConstruction {
    VariableLengthMap map;
    ConstructGuarantees guarantees;
    SliceDecomposition decomposition;
};

// The slice construction: per J1 slice a packing with R=R_j, a=1-2*gamma,
// c=P[S^(j)], weights = Q-tilde on the slice; J2 slices map to the null
// string. Requires n >= 1/((1-2*gamma)*3*gamma) so the per-slice lengths are
// distinct and positive.
DirectConstruction direct_construct(const FiniteDistribution& dist, const SubDistribution& q_tilde,
                                    double gamma, long n);

struct RateFloorWitness {
    SubDistribution q_bar;
    double r0;
    double small_set_mass; // P[(1/n) iota_P <= r0]
    uint64_t small_set_size;
};

// Witness Q-bar in the deficiency-(eps+tau) class: uniform K^{-n*R0}/|A_n| on
// the small-information set A_n, P elsewhere, scaled to mass exactly
// 1-eps-tau. R0 defaults to spectral_sup_quantile(spec, eps, n) - gamma; the
// override exists to exercise the hypothesis-violation error path.
RateFloorWitness rate_floor_witness(const FiniteDistribution& dist, double eps, double tau, double gamma,
                                 long n, std::optional<double> r0_override = std::nullopt);

} // namespace vlir
