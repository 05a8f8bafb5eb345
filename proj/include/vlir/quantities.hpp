#pragma once

#include <optional>
#include <vector>

#include "vlir/distribution.hpp"
#include "vlir/extended_real.hpp"
#include "vlir/source.hpp"

namespace vlir {

enum class Method { closed_form, brute_force, greedy };

// Result of a scalar-quantity computation, with the witness that achieves it:
// for the sup-side quantity a single-atom reduction amount, for the inf-side
// quantity the kept multiplicity per spectrum entry.
struct QuantityReport {
    ExtendedReal value;
    Method method = Method::closed_form;
    std::optional<double> witness_reduce_smallest;
    std::optional<std::vector<double>> witness_kept_counts;
};

// sup of E_P[iota_Q] over the deficiency-delta feasible class.
// Infinite iff p_min <= delta + 1e-12; otherwise the closed form
// H(P) + p_min*log_K(p_min/(p_min-delta)): the objective is convex in Q, so
// the sup sits at a vertex (a single-atom reduction), and the gain
// p*log(p/(p-delta)) is decreasing in p. Verified against the vertex oracle.
QuantityReport g_upper(const Spectrum& spec, double delta);

// Materialized witness: P with its smallest atom (lowest id on ties) reduced
// by delta. Only defined in the finite case (p_min > delta).
SubDistribution g_upper_witness(const FiniteDistribution& dist, double delta);

// E_P[iota_Q] = sum_x P(x) log_K(1/Q(x)).
double g_objective(const FiniteDistribution& p, const SubDistribution& q);

enum class GLowerMode { exact, greedy, auto_mode };

// inf over atom subsets A with P(A) >= 1-delta of sum_{x in A} P(x) log_K(P(A)/P(x)).
// exact enumerates per-entry kept counts (subsets removing the same count from
// an equal-probability class are equivalent); budget prod(mult+1) <= 2^20.
QuantityReport g_lower(const Spectrum& spec, double delta, GLowerMode mode = GLowerMode::auto_mode);

// (1/n) * sup{ r : P[(1/n) iota_P <= r] <= eps }: the first self-information
// level (ascending) whose cumulative mass exceeds eps.
double spectral_sup_quantile(const Spectrum& spec, double eps, long n);

enum class RateKind { g_upper_rate, g_lower_rate, h_quantile };

// Per-n normalized quantities (1/n)*quantity(block spectrum at n, eps+tau).
std::vector<std::pair<long, ExtendedReal>> rate_sequence(const SourceModel& src, double eps, double tau,
                                                         const std::vector<long>& ns, RateKind kind,
                                                         int jobs = 1);

// Per-n second-order terms (g_upper(X^n, eps+tau) - n*R)/sqrt(n).
std::vector<std::pair<long, ExtendedReal>> second_order_curve(const SourceModel& src, double eps,
                                                              double tau, double rate,
                                                              const std::vector<long>& ns, int jobs = 1);

} // namespace vlir
