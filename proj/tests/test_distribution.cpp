#include <doctest.h>

#include <cmath>

#include "vlir/distribution.hpp"

using namespace vlir;

namespace {
FiniteDistribution make(unsigned k, std::vector<std::pair<std::string, double>> atoms) {
    return FiniteDistribution::from_pairs(k, atoms);
}
} // namespace

TEST_CASE("construction drops zero atoms and rejects bad input") {
    FiniteDistribution d(2, {"a", "b", "c"}, {0.5, 0.0, 0.5});
    CHECK(d.size() == 2);
    CHECK(!d.find("b").has_value());
    CHECK(d.find("c").has_value());

    CHECK_THROWS_AS(FiniteDistribution(2, {"a", "b"}, {1.25, -0.25}), std::invalid_argument);
    CHECK_THROWS_AS(FiniteDistribution(2, {"a", "b"}, {0.5, 0.6}), std::invalid_argument);
    CHECK_THROWS_AS(FiniteDistribution(2, {"a", "a"}, {0.5, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(FiniteDistribution(1, {"a"}, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(FiniteDistribution(2, {}, {}), std::invalid_argument);
}

TEST_CASE("self-information in base-K units") {
    FiniteDistribution d = make(2, {{"a", 0.1}, {"b", 0.9}});
    CHECK(self_information(d, "a") == doctest::Approx(3.3219280948873626).epsilon(1e-14));
    FiniteDistribution u = make(4, {{"a", 0.25}, {"b", 0.25}, {"c", 0.25}, {"d", 0.25}});
    CHECK(self_information(u, "c") == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(self_information(d, "zz"), std::invalid_argument);
}

TEST_CASE("entropy in base-K units") {
    CHECK(entropy(make(2, {{"a", 0.5}, {"b", 0.25}, {"c", 0.25}})) == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(entropy(make(2, {{"0", 0.3}, {"1", 0.7}})) ==
          doctest::Approx(0.8812908992306927).epsilon(1e-13));
    // Uniform over K^2 atoms has entropy exactly 2 in base K.
    std::vector<std::pair<std::string, double>> atoms;
    for (int i = 0; i < 9; ++i) atoms.emplace_back("s" + std::to_string(i), 1.0 / 9.0);
    CHECK(entropy(make(3, atoms)) == doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("variational distance matches atoms by identifier") {
    FiniteDistribution p = make(2, {{"a", 0.75}, {"b", 0.25}});
    FiniteDistribution q = make(2, {{"a", 0.5}, {"b", 0.5}});
    CHECK(variational_distance(p, q) == doctest::Approx(0.25).epsilon(1e-14));

    // Point mass vs uniform over four atoms, matched over the union of
    // supports (the point mass has the other three atoms dropped).
    FiniteDistribution point = make(2, {{"a", 1.0}});
    FiniteDistribution unif =
        make(2, {{"a", 0.25}, {"b", 0.25}, {"c", 0.25}, {"d", 0.25}});
    CHECK(variational_distance(point, unif) == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(variational_distance(p, p) == 0.0);
}

TEST_CASE("spectrum groups equal probabilities with multiplicity") {
    // (0.75, 0.25) squared: values 0.0625 x1, 0.1875 x2, 0.5625 x1.
    FiniteDistribution d = make(2, {{"00", 0.5625}, {"01", 0.1875}, {"10", 0.1875}, {"11", 0.0625}});
    Spectrum s = spectrum_of(d);
    REQUIRE(s.entries().size() == 3);
    CHECK(s.entries()[0].value == doctest::Approx(0.0625).epsilon(1e-15));
    CHECK(s.entries()[0].multiplicity == 1.0);
    CHECK(s.entries()[1].value == doctest::Approx(0.1875).epsilon(1e-15));
    CHECK(s.entries()[1].multiplicity == 2.0);
    CHECK(s.entries()[2].value == doctest::Approx(0.5625).epsilon(1e-15));
    CHECK(s.entries()[2].multiplicity == 1.0);
    CHECK(s.total_mass() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(entropy(s) == doctest::Approx(entropy(d)).epsilon(1e-13));

    CHECK_THROWS_AS(Spectrum(2, {{0.5, 1.0}, {0.25, 1.0}}), std::invalid_argument); // not ascending
    CHECK_THROWS_AS(Spectrum(2, {{0.5, 0.0}}), std::invalid_argument);              // zero multiplicity
    CHECK_THROWS_AS(Spectrum(2, {{1.5, 1.0}}), std::invalid_argument);              // value > 1
}

TEST_CASE("sub-distribution invariants") {
    FiniteDistribution p = make(2, {{"a", 0.5}, {"b", 0.5}});
    SubDistribution q(p, {0.4, 0.35}, 0.25);
    CHECK(q.deficiency() == 0.25);
    CHECK(q.q(0) == 0.4);

    CHECK_THROWS_AS(SubDistribution(p, {0.6, 0.15}, 0.25), std::invalid_argument); // exceeds base
    CHECK_THROWS_AS(SubDistribution(p, {0.5, 0.0}, 0.5), std::invalid_argument);   // zero entry
    CHECK_THROWS_AS(SubDistribution(p, {0.4, 0.4}, 0.25), std::invalid_argument);  // wrong mass
}

TEST_CASE("feasibility check enforces the three conditions") {
    FiniteDistribution p = make(2, {{"a", 0.5}, {"b", 0.5}});
    CHECK(check_feasible(p, {0.4, 0.35}, 0.25));
    CHECK(check_feasible(p, {0.5, 0.5}, 0.0));
    CHECK(!check_feasible(p, {0.55, 0.2}, 0.25)); // dominance fails
    CHECK(!check_feasible(p, {0.5, -0.25}, 0.75)); // positivity fails
    CHECK(!check_feasible(p, {0.4, 0.3}, 0.25));  // mass off by 0.05
    // Mass tolerance is 1e-9.
    CHECK(check_feasible(p, {0.4, 0.35 + 5e-10}, 0.25));
    CHECK(!check_feasible(p, {0.4, 0.35 + 5e-9}, 0.25));
}

TEST_CASE("shrinking by named atoms") {
    FiniteDistribution p = make(2, {{"a", 0.5}, {"b", 0.3}, {"c", 0.2}});
    SubDistribution q = shrink_q(p, {{"b", 0.1}, {"c", 0.15}});
    CHECK(q.deficiency() == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(q.q(*p.find("b")) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(q.q(*p.find("a")) == 0.5);
    CHECK(check_feasible(q, q.deficiency()));

    CHECK_THROWS_AS(shrink_q(p, {{"c", 0.2}}), std::invalid_argument);  // would hit zero
    CHECK_THROWS_AS(shrink_q(p, {{"zz", 0.1}}), std::invalid_argument); // unknown atom
}
