#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "schottky/schottky_data.hpp"

using namespace schottky;

namespace {

bool mentions(const ValidationReport& rep, const std::string& needle) {
    for (const auto& f : rep.failures) {
        if (f.find(needle) != std::string::npos) return true;
    }
    return false;
}

}  // namespace

TEST(Validation, F1IsValid) {
    const ValidationReport rep = validate_schottky(fixture_f1());
    EXPECT_TRUE(rep.valid());
    EXPECT_TRUE(rep.failures.empty());
    // closest pair: D_1 and D_{1~} at distance 2√2 - 2
    EXPECT_NEAR(rep.margin, 2.0 * std::sqrt(2.0) - 2.0, 1e-14);
    EXPECT_LT(rep.boundary_residual, 1e-8);
}

TEST(Validation, OverlapFixtureFailsDisjointness) {
    const SchottkyData f1 = fixture_f1();
    std::vector<Disk> disks = f1.disks();
    for (auto& d : disks) d.radius = 3.0;
    const ValidationReport rep = validate_schottky(f1.with_disks(disks));
    EXPECT_FALSE(rep.valid());
    EXPECT_FALSE(rep.disjoint_ok);
    EXPECT_TRUE(mentions(rep, "closure disjointness: disks 1 and 3"));
    EXPECT_LT(rep.margin, 0.0);
}

TEST(Validation, SwappedGeneratorsFailMappingCondition) {
    const SchottkyData bad = fixture_f1().with_swapped_generators(1, 3);
    // γ_2 in the swapped data is the old γ_2^{-1}; its value at ∞ is a/c by hand.
    const MobiusMap& g = bad.generator(1);
    const double at_inf = g.a / g.c;
    EXPECT_NEAR(at_inf, 8.0 - std::sqrt(2.0), 1e-12);
    EXPECT_FALSE(bad.disk(1).contains(cplx{at_inf, 0.0}));

    const ValidationReport rep = validate_schottky(bad);
    EXPECT_FALSE(rep.valid());
    EXPECT_TRUE(rep.disjoint_ok);
    EXPECT_FALSE(rep.mapping_ok);
    EXPECT_TRUE(mentions(rep, "gamma_2(inf) not in D_2"));
}

TEST(Validation, BoundaryOracleAtHundredSamples) {
    // Independent check of the mapping condition on F1 with the raw formula.
    const SchottkyData f1 = fixture_f1();
    for (Letter a = 0; a < 4; ++a) {
        const MobiusMap& g = f1.generator(a);
        const Disk& src = f1.disk(f1.mirror(a));
        const Disk& dst = f1.disk(a);
        for (int q = 0; q < 100; ++q) {
            const cplx z = src.center + src.radius * std::polar(1.0, 2.0 * std::numbers::pi * q / 100.0);
            const cplx img = (g.a * z + g.b) / (g.c * z + g.d);
            EXPECT_NEAR(std::abs(img - dst.center), dst.radius, 1e-8);
        }
    }
}

TEST(Validation, StructuralErrors) {
    const double r2 = std::sqrt(2.0);
    const MobiusMap g1 = MobiusMap::from_entries(r2, 1.0, 1.0, r2);
    EXPECT_THROW(SchottkyData({g1}, {{r2, 1.0}, {-r2, 1.0}}), GeometryError);
    EXPECT_THROW(SchottkyData({g1, g1}, {{r2, 1.0}}), GeometryError);
    EXPECT_THROW(SchottkyData({g1, g1}, {{r2, 1.0}, {1.0, 1.0}, {2.0, -1.0}, {3.0, 1.0}}), GeometryError);

    const SchottkyData f1 = fixture_f1();
    std::vector<MobiusMap> all = f1.generators();
    EXPECT_NO_THROW(SchottkyData::from_all_generators(all, f1.disks()));
    all[3] = all[1];
    EXPECT_THROW(SchottkyData::from_all_generators(all, f1.disks()), GeometryError);
}

TEST(Validation, StructuralFailureIsReported) {
    const SchottkyData bad = fixture_f1().with_swapped_generators(0, 1);
    const ValidationReport rep = validate_schottky(bad);
    EXPECT_FALSE(rep.structural_ok);
    EXPECT_TRUE(mentions(rep, "structural"));
}

TEST(Validation, InversesDerivedFromGenerators) {
    const SchottkyData f1 = fixture_f1();
    for (Letter a = 0; a < 2; ++a) {
        EXPECT_LT(compose(f1.generator(a + 2), f1.generator(a)).distance(MobiusMap::identity()), 1e-13);
    }
}

TEST(Validation, TranslationConjugationStaysValid) {
    const ValidationReport rep = validate_schottky(fixture_f1().translated(1.0));
    EXPECT_TRUE(rep.valid());
    EXPECT_TRUE(validate_schottky(fixture_f1(12.0)).valid());
}
