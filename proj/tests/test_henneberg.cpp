#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "test_support.hpp"
#include "weakrig/henneberg.hpp"
#include "weakrig/rigidity.hpp"

namespace weakrig {
namespace {

const std::vector<Eigen::Vector2d> kTriangle = {{-1.732, 0}, {0, 1}, {0, -1}};
const Eigen::Vector2d kNewVertex(1.732, 0);

Framework k3() { return Framework::planar(build_graph(3, {{0, 1}, {0, 2}, {1, 2}}, {}), kTriangle); }

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::InvalidArgument;
}

TEST(ZeroExtension, TriangleAnchoredAtAnEdge) {
  const Framework f = weakly_rigid_0_extension(k3(), 1, 2, kNewVertex);
  EXPECT_EQ(f.n(), 4);
  EXPECT_EQ(f.graph().edges(), k3().graph().edges());
  EXPECT_EQ(f.graph().angles(), (std::vector<AngleTriple>{{1, 2, 3}, {2, 1, 3}}));
  EXPECT_TRUE(is_minimally_weakly_rigid(f).minimal);
  EXPECT_EQ(f.graph().constraint_count(), 2 * 4 - 3);
}

TEST(ZeroExtension, LeavesTheOldFrameworkUntouched) {
  const Framework f = weakly_rigid_0_extension(k3(), 1, 2, kNewVertex);
  EXPECT_EQ(f.positions().head(6), k3().positions());
  const Eigen::VectorXd before = weak_rigidity_function(k3());
  const Eigen::VectorXd after = weak_rigidity_function(f);
  EXPECT_EQ(after.head(3), before);
}

TEST(ZeroExtension, Errors) {
  EXPECT_EQ(kind_of([] { weakly_rigid_0_extension(k3(), 1, 1, kNewVertex); }), ErrorKind::BadAnchor);
  EXPECT_EQ(kind_of([] { weakly_rigid_0_extension(k3(), 1, 5, kNewVertex); }), ErrorKind::BadAnchor);
  EXPECT_EQ(kind_of([] { weakly_rigid_0_extension(k3(), 1, 2, Eigen::Vector2d(0, 3)); }),
            ErrorKind::CollinearPlacement);
  EXPECT_EQ(kind_of([] { weakly_rigid_0_extension(k3(), 0, 1, Eigen::Vector2d(0, -1)); }),
            ErrorKind::CollocatedPoints);
}

TEST(OneExtension, TriangleReplacingAnEdge) {
  const Framework f = weakly_rigid_1_extension(k3(), 1, 2, 0, kNewVertex);
  EXPECT_EQ(f.graph().edges(), (std::vector<Edge>{{0, 1}, {0, 2}}));
  EXPECT_EQ(f.graph().angles(), (std::vector<AngleTriple>{{1, 2, 3}, {2, 1, 3}, {0, 1, 2}}));
  EXPECT_TRUE(is_minimally_weakly_rigid(f).minimal);
}

TEST(OneExtension, Errors) {
  const Framework path = Framework::planar(build_graph(3, {{0, 1}, {0, 2}}, {{0, 1, 2}}), kTriangle);
  EXPECT_EQ(kind_of([&] { weakly_rigid_1_extension(path, 1, 2, 0, kNewVertex); }),
            ErrorKind::EdgeNotFound);
  EXPECT_EQ(kind_of([] { weakly_rigid_1_extension(k3(), 1, 2, 2, kNewVertex); }), ErrorKind::BadAnchor);
  EXPECT_EQ(kind_of([] { weakly_rigid_1_extension(k3(), 1, 2, 0, Eigen::Vector2d(0, 0)); }),
            ErrorKind::CollinearPlacement);
}

// Replacing the two new angles by the distances they imply (law of sines)
// reproduces the realized edge lengths.
TEST(OneExtension, LawOfSinesConsistency) {
  const Framework f = weakly_rigid_1_extension(k3(), 1, 2, 0, kNewVertex);
  const auto angle = [&](int apex, int a, int b) { return std::acos(cosine_of_angle(f, {apex, a, b})); };
  const double d12 = (f.point(1) - f.point(2)).norm();
  const double at3 = angle(3, 1, 2), at2 = angle(2, 1, 3), at1 = angle(1, 2, 3);
  const double ratio = d12 / std::sin(at3);
  EXPECT_NEAR((f.point(1) - f.point(3)).norm(), ratio * std::sin(at2), 1e-12);
  EXPECT_NEAR((f.point(2) - f.point(3)).norm(), ratio * std::sin(at1), 1e-12);
}

TEST(ApplyStep, DispatchesOnKind) {
  ExtensionStep step;
  step.kind = ExtensionKind::One;
  step.new_vertex = 3;
  step.i = 1;
  step.j = 2;
  step.k = 0;
  step.removed_edge = Edge{1, 2};
  step.new_position = kNewVertex;
  EXPECT_EQ(apply_step(k3(), step).graph(), weakly_rigid_1_extension(k3(), 1, 2, 0, kNewVertex).graph());
}

TEST(Growth, SingleForcedZeroExtension) {
  GrowthOptions o;
  o.mix = 1.0;
  const GrowthResult r = grow_random(triangle_seed(), 1, 5, o);
  ASSERT_EQ(r.frameworks.size(), 2u);
  const Graph& g = r.frameworks[1].graph();
  EXPECT_EQ(g.m(), 3);
  EXPECT_EQ(g.q(), 2);
  EXPECT_EQ(r.steps[0].kind, ExtensionKind::Zero);
  EXPECT_TRUE(classify_infinitesimal_weak_rigidity(r.frameworks[1]).rigid());
}

TEST(Growth, TenVerticesAllMinimal) {
  const GrowthResult r = grow_random(triangle_seed(), 7, 42);
  ASSERT_EQ(r.frameworks.size(), 8u);
  EXPECT_EQ(r.frameworks.front().graph(), triangle_seed().graph());
  for (const auto& f : r.frameworks) {
    EXPECT_EQ(f.graph().constraint_count(), 2 * f.n() - 3);
    EXPECT_TRUE(classify_infinitesimal_weak_rigidity(f).rigid());
    EXPECT_TRUE(is_minimally_weakly_rigid(f).minimal);
  }
  EXPECT_EQ(r.frameworks.back().n(), 10);
}

TEST(Growth, PlacementIsNondegenerate) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const GrowthResult r = grow_random(triangle_seed(), 5, seed);
    for (std::size_t s = 0; s < r.steps.size(); ++s) {
      const Framework& before = r.frameworks[s];
      const Framework& after = r.frameworks[s + 1];
      double diameter = 0;
      for (int a = 0; a < before.n(); ++a)
        for (int b = a + 1; b < before.n(); ++b)
          diameter = std::max(diameter, (before.point(a) - before.point(b)).norm());
      for (int v = 0; v < before.n(); ++v)
        EXPECT_GT((before.point(v) - r.steps[s].new_position).norm(), 0.1 * diameter);
      for (const auto& t : r.steps[s].added_angles) {
        const double theta = std::acos(testing::dot_cosine(after.positions(), 2, t));
        EXPECT_GT(theta, 5.0 * std::numbers::pi / 180.0);
        EXPECT_LT(theta, std::numbers::pi - 5.0 * std::numbers::pi / 180.0);
      }
    }
  }
}

TEST(Growth, DeterministicPerSeed) {
  const GrowthResult a = grow_random(triangle_seed(), 7, 9);
  const GrowthResult b = grow_random(triangle_seed(), 7, 9);
  ASSERT_EQ(a.frameworks.size(), b.frameworks.size());
  for (std::size_t s = 0; s < a.frameworks.size(); ++s) {
    EXPECT_EQ(a.frameworks[s].graph(), b.frameworks[s].graph());
    EXPECT_EQ(a.frameworks[s].positions(), b.frameworks[s].positions());
  }
  const GrowthResult c = grow_random(triangle_seed(), 7, 10);
  EXPECT_NE(a.frameworks.back().positions(), c.frameworks.back().positions());
}

TEST(Growth, OneExtensionFallsBackWhenNoEdgesRemain) {
  // Four angles on the rhombus: rank 4 = 2n-4 with no edges.
  const Framework seed = Framework::planar(
      build_graph(4, {}, {{0, 1, 3}, {2, 1, 3}, {3, 1, 2}, {1, 0, 3}}),
      {{0, 1}, {-1.732, 0}, {0, -1}, {1.732, 0}});
  ASSERT_TRUE(is_minimally_weakly_rigid(seed).minimal);
  GrowthOptions o;
  o.mix = 0.0;
  const GrowthResult r = grow_random(seed, 3, 1, o);
  for (const auto& step : r.steps) EXPECT_EQ(step.kind, ExtensionKind::Zero);
  for (const auto& f : r.frameworks) {
    EXPECT_EQ(f.graph().constraint_count(), 2 * f.n() - 4);
    EXPECT_TRUE(is_minimally_weakly_rigid(f).minimal);
  }
}

TEST(Growth, OverConstrainedAngleOnlySeedIsRefused) {
  const Framework seed = Framework::planar(
      build_graph(4, {}, {{0, 1, 3}, {2, 1, 3}, {3, 1, 2}, {1, 0, 3}, {1, 2, 3}}),
      {{0, 1}, {-1.732, 0}, {0, -1}, {1.732, 0}});
  EXPECT_EQ(kind_of([&] { grow_random(seed, 2, 1); }), ErrorKind::SeedNotRigid);
}

TEST(Growth, RejectsNonRigidSeed) {
  const Framework open = Framework::planar(build_graph(3, {{0, 1}, {0, 2}}, {}), kTriangle);
  EXPECT_EQ(kind_of([&] { grow_random(open, 1, 1); }), ErrorKind::SeedNotRigid);
}

TEST(Growth, PlacementExhausted) {
  GrowthOptions o;
  o.max_attempts = 1;
  o.min_angle_deg = 89.9;
  EXPECT_EQ(kind_of([&] { grow_random(triangle_seed(), 3, 1, o); }), ErrorKind::PlacementExhausted);
}

TEST(GrowthLog, FormatParseRoundTrip) {
  const GrowthResult r = grow_random(triangle_seed(), 7, 42);
  std::vector<std::string> lines;
  for (const auto& step : r.steps) {
    const std::string line = format_growth_step(step);
    const ExtensionStep back = parse_growth_step(line);
    EXPECT_EQ(format_growth_step(back), line);
    EXPECT_EQ(back.new_position, step.new_position);
    lines.push_back(line);
  }
  const std::vector<Framework> replay = replay_growth_log(triangle_seed(), lines);
  ASSERT_EQ(replay.size(), r.frameworks.size());
  for (std::size_t s = 0; s < replay.size(); ++s) {
    EXPECT_EQ(replay[s].graph(), r.frameworks[s].graph());
    EXPECT_EQ(replay[s].positions(), r.frameworks[s].positions());
  }
}

TEST(GrowthLog, ZeroExtensionLineFormat) {
  ExtensionStep step;
  step.new_vertex = 3;
  step.i = 1;
  step.j = 2;
  step.added_angles = {{1, 2, 3}, {2, 1, 3}};
  step.new_position = Eigen::Vector2d(1.5, -0.25);
  EXPECT_EQ(format_growth_step(step),
            "0-extension vertex=3 anchors=1,2 removed=- pos=1.5,-0.25 angles=1:2,3;2:1,3");
}

TEST(GrowthLog, RejectsMalformedLines) {
  EXPECT_THROW(parse_growth_step(""), Error);
  EXPECT_THROW(parse_growth_step("2-extension vertex=3"), Error);
  EXPECT_THROW(parse_growth_step("0-extension vertex=x anchors=1,2 removed=- pos=0,0 angles="), Error);
  EXPECT_THROW(parse_growth_step("0-extension anchors=1,2,3"), Error);
  EXPECT_THROW(replay_growth_log(triangle_seed(),
                                 {"0-extension vertex=4 anchors=1,2 removed=- pos=2,0 angles=1:2,4;2:1,4"}),
               Error);
  EXPECT_THROW(replay_growth_log(triangle_seed(),
                                 {"0-extension vertex=3 anchors=1,2 removed=- pos=2,0 angles=0:2,3;2:1,3"}),
               Error);
}

TEST(Seed, TriangleIsMinimallyRigid) {
  const Framework s = triangle_seed();
  EXPECT_EQ(s.n(), 3);
  EXPECT_EQ(s.graph().m(), 3);
  EXPECT_TRUE(is_minimally_weakly_rigid(s).minimal);
}

}  // namespace
}  // namespace weakrig
