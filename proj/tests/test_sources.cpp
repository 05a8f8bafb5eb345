#include <doctest.h>

#include <cmath>

#include "vlir/quantities.hpp"
#include "vlir/source.hpp"

using namespace vlir;

namespace {
FiniteDistribution make(unsigned k, std::vector<std::pair<std::string, double>> atoms) {
    return FiniteDistribution::from_pairs(k, atoms);
}

bool spectra_agree(const Spectrum& a, const Spectrum& b, double tol) {
    if (a.entries().size() != b.entries().size()) return false;
    for (std::size_t i = 0; i < a.entries().size(); ++i) {
        if (std::abs(a.entries()[i].value - b.entries()[i].value) > tol) return false;
        if (a.entries()[i].multiplicity != b.entries()[i].multiplicity) return false;
    }
    return true;
}
} // namespace

TEST_CASE("iid block spectrum via type classes") {
    SourceModel src = SourceModel::iid(make(2, {{"0", 0.75}, {"1", 0.25}}));
    Spectrum s = block_spectrum(src, 2);
    REQUIRE(s.entries().size() == 3);
    CHECK(s.entries()[0].value == doctest::Approx(0.0625).epsilon(1e-15));
    CHECK(s.entries()[0].multiplicity == 1.0);
    CHECK(s.entries()[1].value == doctest::Approx(0.1875).epsilon(1e-15));
    CHECK(s.entries()[1].multiplicity == 2.0);
    CHECK(s.entries()[2].value == doctest::Approx(0.5625).epsilon(1e-15));
    CHECK(s.entries()[2].multiplicity == 1.0);
    CHECK(s.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("block spectrum and explicit block law agree") {
    SourceModel bin = SourceModel::iid(make(2, {{"0", 0.6}, {"1", 0.4}}));
    SourceModel tern = SourceModel::iid(make(3, {{"a", 0.5}, {"b", 0.3}, {"c", 0.2}}));
    for (long n : {1L, 2L, 3L, 4L}) {
        CHECK(spectra_agree(block_spectrum(bin, n), spectrum_of(block_distribution(bin, n)), 1e-15));
        CHECK(spectra_agree(block_spectrum(tern, n), spectrum_of(block_distribution(tern, n)), 1e-15));
    }
    // iid block entropy is n times the symbol entropy.
    const double h = entropy(make(2, {{"0", 0.6}, {"1", 0.4}}));
    for (long n : {1L, 3L, 6L})
        CHECK(entropy(block_spectrum(bin, n)) == doctest::Approx(n * h).epsilon(1e-12));
}

TEST_CASE("block law atom ids are the symbol concatenations") {
    SourceModel src = SourceModel::iid(make(2, {{"0", 0.7}, {"1", 0.3}}));
    FiniteDistribution b2 = block_distribution(src, 2);
    REQUIRE(b2.size() == 4);
    REQUIRE(b2.find("01").has_value());
    CHECK(b2.prob(*b2.find("01")) == doctest::Approx(0.21).epsilon(1e-15));
    CHECK(b2.prob(*b2.find("00")) == doctest::Approx(0.49).epsilon(1e-15));

    // Multi-character symbol ids get a separator so blocks stay unambiguous.
    SourceModel wide = SourceModel::iid(make(2, {{"lo", 0.7}, {"hi", 0.3}}));
    FiniteDistribution w2 = block_distribution(wide, 2);
    CHECK(w2.find("lo,hi").has_value());
}

TEST_CASE("mixture spectrum mixes per type class") {
    FiniteDistribution p1 = make(2, {{"0", 0.8}, {"1", 0.2}});
    FiniteDistribution p2 = make(2, {{"0", 0.4}, {"1", 0.6}});
    SourceModel mix = SourceModel::mixture(0.3, p1, p2);
    for (long n : {1L, 2L, 3L, 5L}) {
        CHECK(spectra_agree(block_spectrum(mix, n), spectrum_of(block_distribution(mix, n)), 1e-15));
    }
    // n=1 law is the plain mixture.
    FiniteDistribution m1 = block_distribution(mix, 1);
    CHECK(m1.prob(*m1.find("0")) == doctest::Approx(0.3 * 0.8 + 0.7 * 0.4).epsilon(1e-15));

    CHECK_THROWS_AS(SourceModel::mixture(0.0, p1, p2), std::invalid_argument);
    CHECK_THROWS_AS(SourceModel::mixture(1.0, p1, p2), std::invalid_argument);
    // Components must share one alphabet.
    CHECK_THROWS_AS(SourceModel::mixture(0.5, p1, make(2, {{"a", 0.4}, {"b", 0.6}})),
                    std::invalid_argument);
}

TEST_CASE("explicit tables serve exactly the listed blocklengths") {
    std::map<long, FiniteDistribution> tables;
    tables.emplace(1, make(2, {{"x", 0.5}, {"y", 0.5}}));
    tables.emplace(3, make(2, {{"u", 0.125}, {"v", 0.875}}));
    SourceModel src = SourceModel::explicit_table(2, std::move(tables));
    CHECK(block_distribution(src, 3).size() == 2);
    CHECK(block_spectrum(src, 1).entries().size() == 1); // two equal values merge
    CHECK_THROWS_AS(block_distribution(src, 2), ConfigError);
}

TEST_CASE("enumeration budgets raise capacity errors") {
    // 2^23 block atoms exceed the explicit-expansion budget.
    SourceModel bin = SourceModel::iid(make(2, {{"0", 0.7}, {"1", 0.3}}));
    CHECK_THROWS_AS(block_distribution(bin, 23), CapacityError);
    CHECK_NOTHROW(block_spectrum(bin, 23)); // 24 compositions: fine

    // 40 symbols at n=60: composition count astronomically beyond 1e6.
    std::vector<std::pair<std::string, double>> atoms;
    for (int i = 0; i < 40; ++i) atoms.emplace_back("s" + std::to_string(i), 1.0 / 40.0);
    SourceModel wide = SourceModel::iid(FiniteDistribution::from_pairs(2, atoms));
    CHECK_THROWS_AS(block_spectrum(wide, 60), CapacityError);
}

TEST_CASE("large iid spectra keep exact multiplicities") {
    SourceModel bin = SourceModel::iid(make(2, {{"0", 0.7}, {"1", 0.3}}));
    Spectrum s = block_spectrum(bin, 40);
    REQUIRE(s.entries().size() == 41);
    KahanSum count;
    for (const auto& e : s.entries()) count.add(e.multiplicity);
    CHECK(count.value() == std::pow(2.0, 40)); // binomials sum exactly
    CHECK(s.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
}
