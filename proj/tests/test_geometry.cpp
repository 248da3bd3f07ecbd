#include <cmath>

#include <gtest/gtest.h>

#include "imgreen/geometry.hpp"
#include "imgreen/potentials.hpp"

using namespace imgreen;

TEST(Mesh, CircleLengthAndNormals) {
  const BoundaryMesh m = make_circle(1.5, 64);
  EXPECT_NEAR(m.length(), 2.0 * kPi * 1.5, 1e-12);
  for (int j = 0; j < m.size(); ++j) {
    EXPECT_NEAR(m.normals[j].dot(m.nodes[j] / 1.5), 1.0, 1e-14);
    EXPECT_NEAR(m.curvature[j], 1.0 / 1.5, 1e-12);
  }
}

TEST(Mesh, StarLengthConvergesSpectrally) {
  const BoundaryMesh a = make_star(1.0, {{3, 0.2}}, 64);
  const BoundaryMesh b = make_star(1.0, {{3, 0.2}}, 128);
  EXPECT_NEAR(a.length(), b.length(), 1e-12);
}

TEST(Mesh, RejectsBadSizes) {
  EXPECT_THROW(make_circle(1.0, 6), DomainError);
  EXPECT_THROW(make_circle(1.0, 33), DomainError);
  EXPECT_THROW(make_circle(-1.0, 32), DomainError);
}

TEST(Mesh, RejectsNonStarlikeCurve) {
  try {
    make_star(1.0, {{3, 1.2}}, 64);
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("node"), std::string::npos);
  }
  EXPECT_NO_THROW(make_star(1.0, {{3, 0.9}}, 64));
}

TEST(Mesh, WindingNumber) {
  const BoundaryMesh m = make_circle(1.0, 32);
  EXPECT_EQ(winding_number(m.nodes, Vec2(0.2, 0.1)), 1);
  EXPECT_EQ(winding_number(m.nodes, Vec2(1.2, 0.0)), 0);
}

TEST(Grid, AreaApproachesDiskArea) {
  const BoundaryMesh m = make_circle(1.0, 256);
  const VolumeGrid g = make_grid(m, 1.0 / 40);
  EXPECT_NEAR(g.area(), kPi, 0.02);
  for (int c = 0; c < g.size(); ++c) {
    const auto [i, j] = g.lattice[c];
    EXPECT_EQ(g.cell_at(i, j), c);
  }
  EXPECT_THROW(make_grid(m, 0.6), DomainError);
}

TEST(Directions, WeightsSumToCircumference) {
  const DirectionGrid d = make_directions(16);
  EXPECT_NEAR(d.weights.sum(), 2.0 * kPi, 1e-14);
  EXPECT_NEAR(d.dirs[4].y(), 1.0, 1e-15);
  EXPECT_THROW(make_directions(1), DomainError);
}

TEST(Potentials, FamiliesAreSupportedInsideTheDomain) {
  const BoundaryMesh m = make_circle(1.0, 64);
  const double rin = inner_radius(m);
  EXPECT_NEAR(rin, 1.0, 1e-12);
  for (const auto& spec : test_corpus()) {
    const Field f = family_field(spec, rin, 7);
    for (int j = 0; j < 64; ++j) EXPECT_EQ(f(0.8 * m.nodes[j]), 0.0) << spec.name();
  }
  EXPECT_THROW(family_field({"nope", 1.0}, rin), ConfigError);
}

TEST(Potentials, RandomFamilyIsSeeded) {
  const Field a = family_field({"random", 0.1}, 1.0, 42), b = family_field({"random", 0.1}, 1.0, 42);
  const Field c = family_field({"random", 0.1}, 1.0, 43);
  double diff = 0.0;
  for (double x : {-0.3, 0.0, 0.2}) {
    EXPECT_EQ(a(Vec2(x, 0.1)), b(Vec2(x, 0.1)));
    diff += std::abs(a(Vec2(x, 0.1)) - c(Vec2(x, 0.1)));
  }
  EXPECT_GT(diff, 0.0);
}

TEST(Potentials, CorpusHasTenEntries) {
  const auto corpus = test_corpus();
  ASSERT_EQ(corpus.size(), 10u);
  EXPECT_EQ(corpus.front().name(), "zero");
  EXPECT_EQ(corpus[1].name(), "gaussian(0.5)");
}
