#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vlir/common.hpp"
#include "vlir/distribution.hpp"
#include "vlir/extended_real.hpp"
#include "vlir/mapping.hpp"

namespace vlir {

// Independent evaluation of the sup-side quantity, for cross-checking the
// closed form. In the finite regime the feasible class is a polytope whose
// extreme points are single-atom reductions, and the objective is convex, so
// the sup is the max over those vertices; probe_objectives holds them all.
// In the infinite regime the report carries a divergence certificate: the
// objective along a sequence of feasible laws driving the smallest atom to
// eta*P(x0) for shrinking eta, strictly increasing without bound.
struct VertexProbeReport {
    ExtendedReal value;
    std::vector<double> probe_objectives;
};

// Support capped at 24 atoms (diagnostic tool, not a production path).
VertexProbeReport g_upper_vertex_oracle(const FiniteDistribution& dist, double delta);

// Max objective over randomly sampled members of the deficiency-delta class.
// A sound closed form can never be exceeded by any sample.
struct SamplerReport {
    double max_objective; // meaningful only when !no_data
    uint64_t trials;
    bool no_data;
};

SamplerReport g_upper_sampler(const FiniteDistribution& dist, double delta, uint64_t trials,
                              uint64_t seed);

// Raw subset enumeration of the inf-side quantity: min over atom sets A with
// P(A) >= 1-delta of sum_{x in A} P(x) log_K(P(A)/P(x)). Support capped at 20.
double g_lower_bruteforce(const FiniteDistribution& dist, double delta);

// Every variable-length map on the given atoms with output lengths <= max_len,
// one representative per output-relabeling orbit: a map is determined up to
// relabeling by (length per atom, partition of each length class into at most
// K^m same-string blocks). Capped at 5 atoms, max_len 3, base 2; anything
// larger must use sample_random_maps.
std::vector<VariableLengthMap> enumerate_maps(const std::vector<std::string>& atom_ids,
                                              unsigned max_len, unsigned base_k);

// Uniformly random maps: per atom, length uniform on {0..max_len}, string
// uniform among the K^m strings of that length.
std::vector<VariableLengthMap> sample_random_maps(const FiniteDistribution& dist, unsigned max_len,
                                                  std::size_t count, uint64_t seed);

struct OracleReport {
    bool agreed;
    double max_discrepancy; // largest mean-length / bound ratio among feasible maps
    uint64_t trials;
    bool vacuous; // bound infinite: nothing to violate
    std::optional<std::string> counterexample;
};

// Converse check: every map whose average distance is within delta must have
// mean length <= the sup-side bound (+1e-9). Reports the max ratio observed.
OracleReport converse_check(const FiniteDistribution& dist, double delta,
                            const std::vector<VariableLengthMap>& maps);

// Dirichlet(1,..,1) point with named atoms x00, x01, ...: the seeded test
// corpus generator.
FiniteDistribution random_distribution(SeededRng& rng, unsigned base_k, std::size_t support);

} // namespace vlir
