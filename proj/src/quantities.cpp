#include "vlir/quantities.hpp"

#include <algorithm>
#include <cmath>

#include "vlir/parallel.hpp"

namespace vlir {

namespace {

constexpr double kInfiniteBand = 1e-12;   // p_min <= delta + band counts as infinite
constexpr double kMassTolerance = 1e-9;   // full-distribution mass check
constexpr double kFeasSlack = 1e-12;      // subset-mass feasibility comparisons
constexpr double kExactBudget = 1048576.0; // 2^20 candidate subsets

void require_full_mass(const Spectrum& spec, const char* who) {
    if (std::abs(spec.total_mass() - 1.0) > kMassTolerance)
        throw std::invalid_argument(std::string(who) + ": spectrum mass " +
                                    std::to_string(spec.total_mass()) + " is not 1 within 1e-9");
}

void require_delta(double delta, const char* who) {
    if (!(delta >= 0.0 && delta < 1.0))
        throw std::invalid_argument(std::string(who) + ": delta must lie in [0,1)");
}

double subset_objective(const Spectrum& spec, const std::vector<double>& kept) {
    const unsigned k = spec.base_K();
    KahanSum mass;
    KahanSum info; // sum of kept_c * v_c * log_K(1/v_c)
    for (std::size_t c = 0; c < kept.size(); ++c) {
        const auto& e = spec.entries()[c];
        mass.add(kept[c] * e.value);
        info.add(kept[c] * (e.value * log_base(k, 1.0 / e.value)));
    }
    // Nonnegative by definition (every kept value is <= the kept mass);
    // clamp the cancellation residue so exact zeros stay exact.
    return std::max(0.0, mass.value() * log_base(k, mass.value()) + info.value());
}

} // namespace

QuantityReport g_upper(const Spectrum& spec, double delta) {
    require_delta(delta, "g_upper");
    require_full_mass(spec, "g_upper");
    const double pmin = spec.min_value();
    if (pmin <= delta + kInfiniteBand) {
        return {ExtendedReal::infinity(), Method::closed_form, std::nullopt, std::nullopt};
    }
    const double gain = pmin * log_base(spec.base_K(), pmin / (pmin - delta));
    return {ExtendedReal::finite(entropy(spec) + gain), Method::closed_form, delta, std::nullopt};
}

SubDistribution g_upper_witness(const FiniteDistribution& dist, double delta) {
    require_delta(delta, "g_upper_witness");
    if (dist.min_prob() <= delta + kInfiniteBand)
        throw std::invalid_argument("g_upper_witness: the sup is infinite (p_min <= delta); "
                                    "no finite witness exists");
    // Smallest probability, ties broken by lowest atom identifier.
    std::size_t best = 0;
    for (std::size_t i = 1; i < dist.size(); ++i) {
        if (dist.prob(i) < dist.prob(best) ||
            (dist.prob(i) == dist.prob(best) && dist.id(i) < dist.id(best)))
            best = i;
    }
    return shrink_q_by_index(dist, {{best, delta}});
}

double g_objective(const FiniteDistribution& p, const SubDistribution& q) {
    if (!q.base().same_data(p) && q.base().ids() != p.ids())
        throw std::invalid_argument("g_objective: q is not defined over p's support");
    const unsigned k = p.base_K();
    const double lk = std::log(static_cast<double>(k));
    KahanSum s;
    for (std::size_t i = 0; i < p.size(); ++i) s.add(p.prob(i) * std::log(1.0 / q.q(i)));
    return s.value() / lk;
}

QuantityReport g_lower(const Spectrum& spec, double delta, GLowerMode mode) {
    require_delta(delta, "g_lower");
    require_full_mass(spec, "g_lower");
    const auto& entries = spec.entries();
    const std::size_t m = entries.size();
    const double threshold = 1.0 - delta - kFeasSlack;

    double budget = 1.0;
    for (const auto& e : entries) budget *= e.multiplicity + 1.0;
    const bool exact_fits = budget <= kExactBudget;

    if (mode == GLowerMode::exact && !exact_fits)
        throw CapacityError("g_lower: " + std::to_string(budget) +
                            " candidate subsets exceed the 2^20 exact-mode budget; use greedy mode");

    if (mode == GLowerMode::exact || (mode == GLowerMode::auto_mode && exact_fits)) {
        // Subsets removing the same count from an equal-probability class are
        // equivalent, so enumeration is over per-entry kept counts.
        std::vector<double> kept(m, 0.0);
        std::vector<double> best_kept;
        double best = 0.0;
        bool have_best = false;
        auto rec = [&](auto&& self, std::size_t c) -> void {
            if (c == m) {
                KahanSum mass;
                for (std::size_t i = 0; i < m; ++i) mass.add(kept[i] * entries[i].value);
                if (mass.value() < threshold || mass.value() <= 0.0) return;
                double obj = subset_objective(spec, kept);
                if (!have_best || obj < best) {
                    have_best = true;
                    best = obj;
                    best_kept = kept;
                }
                return;
            }
            const auto mult = static_cast<long long>(entries[c].multiplicity);
            for (long long t = 0; t <= mult; ++t) {
                kept[c] = static_cast<double>(t);
                self(self, c + 1);
            }
            kept[c] = 0.0;
        };
        rec(rec, 0);
        if (!have_best)
            throw std::logic_error("g_lower: no feasible subset found (mass invariant violated)");
        return {ExtendedReal::finite(best), Method::brute_force, std::nullopt, std::move(best_kept)};
    }

    // Greedy: drop smallest-probability atoms while P(A) >= 1-delta stays
    // satisfiable; stops at the first entry it cannot exhaust.
    std::vector<double> kept(m);
    for (std::size_t c = 0; c < m; ++c) kept[c] = entries[c].multiplicity;
    KahanSum removed;
    for (std::size_t c = 0; c < m; ++c) {
        const double v = entries[c].value;
        const double mult = entries[c].multiplicity;
        double mass_now = spec.total_mass() - removed.value();
        double t = std::min(mult, std::floor((mass_now - threshold) / v));
        t = std::max(t, 0.0);
        while (t < mult && mass_now - (t + 1.0) * v >= threshold) t += 1.0;
        while (t > 0.0 && mass_now - t * v < threshold) t -= 1.0;
        kept[c] = mult - t;
        removed.add(t * v);
        if (t < mult) break;
    }
    return {ExtendedReal::finite(subset_objective(spec, kept)), Method::greedy, std::nullopt,
            std::move(kept)};
}

double spectral_sup_quantile(const Spectrum& spec, double eps, long n) {
    if (!(eps >= 0.0 && eps < 1.0))
        throw std::invalid_argument("spectral_sup_quantile: eps must lie in [0,1)");
    if (n < 1) throw std::invalid_argument("spectral_sup_quantile: n must be >= 1");
    require_full_mass(spec, "spectral_sup_quantile");
    const auto& entries = spec.entries();
    KahanSum cum;
    // Ascending self-information = descending probability.
    for (std::size_t i = entries.size(); i-- > 0;) {
        cum.add(entries[i].value * entries[i].multiplicity);
        if (cum.value() > eps + kFeasSlack)
            return log_base(spec.base_K(), 1.0 / entries[i].value) / static_cast<double>(n);
    }
    // Unreachable for eps < 1 with mass 1; defensively report the last step.
    return log_base(spec.base_K(), 1.0 / spec.min_value()) / static_cast<double>(n);
}

namespace {

std::vector<std::pair<long, ExtendedReal>> per_n_table(const SourceModel& src,
                                                       const std::vector<long>& ns, int jobs,
                                                       ExtendedReal (*eval)(const Spectrum&, long,
                                                                            double, double),
                                                       double delta, double extra) {
    if (ns.empty()) throw std::invalid_argument("rate table: n list is empty");
    for (long n : ns)
        if (n < 1) throw std::invalid_argument("rate table: n must be >= 1");
    std::vector<std::pair<long, ExtendedReal>> out(ns.size());
    parallel_for(ns.size(), jobs, [&](std::size_t i) {
        Spectrum spec = block_spectrum(src, ns[i]);
        out[i] = {ns[i], eval(spec, ns[i], delta, extra)};
    });
    return out;
}

void require_eps_tau(double eps, double tau, const char* who) {
    if (!(eps >= 0.0 && eps < 1.0))
        throw std::invalid_argument(std::string(who) + ": eps must lie in [0,1)");
    if (!(tau >= 0.0) || !(eps + tau < 1.0))
        throw std::invalid_argument(std::string(who) + ": need tau >= 0 and eps + tau < 1");
}

} // namespace

std::vector<std::pair<long, ExtendedReal>> rate_sequence(const SourceModel& src, double eps, double tau,
                                                         const std::vector<long>& ns, RateKind kind,
                                                         int jobs) {
    require_eps_tau(eps, tau, "rate_sequence");
    const double delta = eps + tau;
    switch (kind) {
    case RateKind::g_upper_rate:
        return per_n_table(
            src, ns, jobs,
            [](const Spectrum& s, long n, double d, double) {
                QuantityReport r = g_upper(s, d);
                if (r.value.is_infinite()) return ExtendedReal::infinity();
                return ExtendedReal::finite(r.value.value() / static_cast<double>(n));
            },
            delta, 0.0);
    case RateKind::g_lower_rate:
        return per_n_table(
            src, ns, jobs,
            [](const Spectrum& s, long n, double d, double) {
                QuantityReport r = g_lower(s, d, GLowerMode::auto_mode);
                return ExtendedReal::finite(r.value.value() / static_cast<double>(n));
            },
            delta, 0.0);
    case RateKind::h_quantile:
        return per_n_table(
            src, ns, jobs,
            [](const Spectrum& s, long n, double d, double) {
                return ExtendedReal::finite(spectral_sup_quantile(s, d, n));
            },
            delta, 0.0);
    }
    throw std::logic_error("rate_sequence: unreachable");
}

std::vector<std::pair<long, ExtendedReal>> second_order_curve(const SourceModel& src, double eps,
                                                              double tau, double rate,
                                                              const std::vector<long>& ns, int jobs) {
    require_eps_tau(eps, tau, "second_order_curve");
    if (!(rate >= 0.0) || !std::isfinite(rate))
        throw std::invalid_argument("second_order_curve: rate must be a nonnegative real");
    return per_n_table(
        src, ns, jobs,
        [](const Spectrum& s, long n, double d, double r) {
            QuantityReport g = g_upper(s, d);
            if (g.value.is_infinite()) return ExtendedReal::infinity();
            double nn = static_cast<double>(n);
            return ExtendedReal::finite((g.value.value() - nn * r) / std::sqrt(nn));
        },
        eps + tau, rate);
}

} // namespace vlir
