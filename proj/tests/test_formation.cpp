#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <unsupported/Eigen/KroneckerProduct>

#include "test_support.hpp"
#include "weakrig/formation.hpp"
#include "weakrig/rigidity.hpp"

namespace weakrig {
namespace {

using testing::oracle_jacobian;
using testing::oracle_weak_rigidity_function;
using testing::three_agent_graph;

const double kCos40 = std::cos(40.0 * std::numbers::pi / 180.0);

TargetSpec reference_targets() {
  return {{{Edge{0, 1}, 8.0}, {Edge{0, 2}, 9.0}}, {{AngleTriple{0, 1, 2}, kCos40}}};
}

Framework reference_start() {
  return Framework::planar(three_agent_graph(), {{-3, 0}, {1, 1}, {-1, -3}});
}

// ∇V = J_F^T e with J_F from finite differences of the dot-product oracle.
Eigen::VectorXd oracle_gradient(const Graph& g, const TargetSpec& t, const Eigen::VectorXd& p) {
  const auto fw = [&](const Eigen::VectorXd& x) { return oracle_weak_rigidity_function(g, x, 2); };
  Eigen::VectorXd target(g.m() + g.q());
  int r = 0;
  for (const auto& [e, v] : t.sq_distances) target(r++) = v;
  for (const auto& [a, v] : t.cosines) target(r++) = v;
  return oracle_jacobian(fw, p).transpose() * (fw(p) - target);
}

double det_z_of(const Eigen::VectorXd& p) {
  const Eigen::Vector2d a = p.segment<2>(0) - p.segment<2>(2);
  const Eigen::Vector2d b = p.segment<2>(0) - p.segment<2>(4);
  return a.x() * b.y() - a.y() * b.x();
}

// Three agents on the line y = c with random abscissae.
Eigen::VectorXd random_collinear(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-4, 4);
  for (;;) {
    const double c = u(rng);
    const double x0 = u(rng), x1 = u(rng), x2 = u(rng);
    if (std::min({std::abs(x0 - x1), std::abs(x0 - x2), std::abs(x1 - x2)}) < 0.5) continue;
    Eigen::VectorXd p(6);
    p << x0, c, x1, c, x2, c;
    return p;
  }
}

TEST(ErrorVector, ReferenceInitialState) {
  const Eigen::VectorXd e = error_vector(reference_start(), reference_targets());
  ASSERT_EQ(e.size(), 3);
  EXPECT_DOUBLE_EQ(e(0), 9.0);
  EXPECT_DOUBLE_EQ(e(1), 4.0);
  const double cos0 = 5.0 / std::sqrt(17.0 * 13.0);
  EXPECT_NEAR(e(2), cos0 - kCos40, 1e-15);
}

TEST(ErrorVector, ZeroAtTheRealizedShape) {
  const Framework f = reference_start();
  EXPECT_LT(error_vector(f, targets_from(f)).norm(), 1e-15);
  EXPECT_LT(control_law(f, targets_from(f)).norm(), 1e-15);
}

TEST(ErrorVector, TargetValidation) {
  const Framework f = reference_start();
  TargetSpec swapped = reference_targets();
  std::swap(swapped.sq_distances[0], swapped.sq_distances[1]);
  EXPECT_THROW(error_vector(f, swapped), Error);
  TargetSpec missing = reference_targets();
  missing.cosines.clear();
  EXPECT_THROW(check_targets(f.graph(), missing), Error);
  TargetSpec bad = reference_targets();
  bad.cosines[0].second = 1.5;
  EXPECT_THROW(check_targets(f.graph(), bad), Error);
  bad = reference_targets();
  bad.sq_distances[0].second = -1.0;
  EXPECT_THROW(check_targets(f.graph(), bad), Error);
}

TEST(ControlLaw, NegativeGradientOfTheOracle) {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 3 + trial % 3;
    const Graph g = testing::random_graph(rng, n);
    const Framework f(g, 2, testing::random_points(rng, n, 2));
    TargetSpec t = targets_from(f.with_positions(testing::random_points(rng, n, 2)));
    const Eigen::VectorXd u = control_law(f, t);
    const Eigen::VectorXd ref = -oracle_gradient(g, t, f.positions());
    EXPECT_LT((u - ref).cwiseAbs().maxCoeff(), 1e-6 * std::max(1.0, ref.cwiseAbs().maxCoeff()));
    // Total momentum vanishes.
    Eigen::Vector2d total = Eigen::Vector2d::Zero();
    for (int v = 0; v < n; ++v) total += u.segment<2>(2 * v);
    EXPECT_LT(total.norm(), 1e-9 * std::max(1.0, u.norm()));
  }
}

TEST(EMatrix, IdentitySymmetryAndRowSums) {
  std::mt19937_64 rng(103);
  for (int trial = 0; trial < 100; ++trial) {
    const Framework f(three_agent_graph(), 2, testing::random_triangle(rng));
    const Eigen::Matrix3d e = e_matrix_three_agent(f, reference_targets());
    Eigen::VectorXd lhs = -control_law(f, reference_targets());
    Eigen::VectorXd rhs = Eigen::kroneckerProduct(e, Eigen::Matrix2d::Identity()) * f.positions();
    EXPECT_LT((lhs - rhs).norm(), 1e-9 * std::max(1.0, lhs.norm()));
    EXPECT_LT((e - e.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((e * Eigen::Vector3d::Ones()).cwiseAbs().maxCoeff(), 1e-12 * (1 + e.norm()));
  }
}

TEST(EMatrix, VanishesAtTheDesiredShape) {
  const Framework f = reference_start();
  EXPECT_LT(e_matrix_three_agent(f, targets_from(f)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(EMatrix, WrongTopology) {
  const Framework k3 = Framework::planar(build_graph(3, {{0, 1}, {0, 2}, {1, 2}}, {}),
                                         {{0, 0}, {1, 0}, {0, 1}});
  try {
    e_matrix_three_agent(k3, targets_from(k3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::WrongTopology);
  }
  EXPECT_FALSE(is_three_agent_topology(k3.graph()));
  EXPECT_TRUE(is_three_agent_topology(three_agent_graph()));
}

TEST(DetZ, HandValueAtAnEquilateralTriangle) {
  const Framework f = Framework::planar(three_agent_graph(), {{-1.732, 0}, {0, 1}, {0, -1}});
  EXPECT_NEAR(det_z(f, targets_from(f)).det, -2 * 1.732, 1e-12);
  EXPECT_NEAR(det_z(f, targets_from(f)).sigma, 0.0, 1e-12);
  EXPECT_FALSE(is_collinear_three_agent(f));
}

TEST(DetZ, CollinearStateIsZero) {
  const Framework f = Framework::planar(three_agent_graph(), {{-3, 2}, {1, 2}, {4, 2}});
  EXPECT_EQ(det_z(f, reference_targets()).det, 0.0);
  EXPECT_TRUE(is_collinear_three_agent(f));
}

TEST(DetZ, RateMatchesTheFlowDerivative) {
  std::mt19937_64 rng(107);
  const double h = 1e-6;
  for (int trial = 0; trial < 100; ++trial) {
    const Framework f(three_agent_graph(), 2, testing::random_triangle(rng));
    const Eigen::VectorXd p = f.positions();
    const Eigen::VectorXd u = control_law(f, reference_targets());
    const double rate = (det_z_of(p + h * u) - det_z_of(p - h * u)) / (2 * h);
    const DetZ d = det_z(f, reference_targets());
    EXPECT_NEAR(rate, -d.sigma * d.det, 1e-6 * std::max(1.0, std::abs(rate)));
  }
}

TEST(FlowJacobian, SymmetricAtRandomStates) {
  std::mt19937_64 rng(109);
  for (int trial = 0; trial < 50; ++trial) {
    const Framework f(three_agent_graph(), 2, testing::random_triangle(rng));
    const Eigen::MatrixXd j = flow_jacobian(f, reference_targets(), 1e-6);
    EXPECT_LT((j - j.transpose()).cwiseAbs().maxCoeff(), 1e-5);
  }
}

TEST(FlowJacobian, ThreeZeroModesAtTheDesiredShape) {
  const Framework f = reference_start();
  const Eigen::MatrixXd j = flow_jacobian(f, targets_from(f), 1e-6);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (j + j.transpose()));
  int zeros = 0;
  for (int k = 0; k < 6; ++k) {
    const double lambda = es.eigenvalues()(k);
    if (std::abs(lambda) < 1e-6) ++zeros;
    else EXPECT_GT(lambda, 0.0);
  }
  EXPECT_EQ(zeros, 3);
  // At e = 0 the Jacobian is R^T R.
  const Eigen::MatrixXd r = weak_rigidity_matrix(f).matrix;
  EXPECT_LT((j - r.transpose() * r).cwiseAbs().maxCoeff(), 1e-5);
}

TEST(Simulate, AlreadyAtTheTargetStopsImmediately) {
  const Framework f = reference_start();
  const SimulationTrace tr = simulate(f, targets_from(f));
  EXPECT_EQ(tr.status, TerminalStatus::Converged);
  EXPECT_EQ(tr.size(), 1u);
  EXPECT_EQ(tr.steps(), 0u);
}

TEST(Simulate, ZeroHorizonIsMaxTime) {
  SimulationConfig cfg;
  cfg.t_max = 0.0;
  const SimulationTrace tr = simulate(reference_start(), reference_targets(), cfg);
  EXPECT_EQ(tr.status, TerminalStatus::MaxTime);
  EXPECT_EQ(tr.size(), 1u);
  EXPECT_EQ(tr.times[0], 0.0);
}

TEST(Simulate, ReferenceScenarioConvergesGivenEnoughTime) {
  SimulationConfig cfg;
  cfg.t_max = 200.0;
  const SimulationTrace tr = simulate(reference_start(), reference_targets(), cfg);
  ASSERT_EQ(tr.status, TerminalStatus::Converged);
  EXPECT_LT(tr.error_norm.back(), 1e-8);
  EXPECT_GT(tr.times.back(), 50.0);
  for (std::size_t k = 1; k < tr.size(); ++k) {
    EXPECT_LE(tr.lyapunov[k], tr.lyapunov[k - 1] + 1e-10);
    EXPECT_GT(tr.times[k], tr.times[k - 1]);
  }
  for (std::size_t k = 0; k < tr.size(); ++k) {
    EXPECT_NEAR(tr.lyapunov[k], 0.5 * tr.errors[k].squaredNorm(), 1e-12 * (1 + tr.lyapunov[k]));
  }
}

TEST(Simulate, ExponentialTail) {
  SimulationConfig cfg;
  cfg.t_max = 200.0;
  const SimulationTrace tr = simulate(reference_start(), reference_targets(), cfg);
  const std::size_t begin = tr.size() / 2;
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  const double count = static_cast<double>(tr.size() - begin);
  for (std::size_t k = begin; k < tr.size(); ++k) {
    const double x = tr.times[k], y = std::log(tr.error_norm[k]);
    sx += x; sy += y; sxx += x * x; sxy += x * y; syy += y * y;
  }
  const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  const double r = (count * sxy - sx * sy) /
                   std::sqrt((count * sxx - sx * sx) * (count * syy - sy * sy));
  EXPECT_LT(slope, 0.0);
  EXPECT_GT(r * r, 0.99);
}

TEST(Simulate, DetZFollowsItsODEAlongTheTrace) {
  SimulationConfig cfg;
  cfg.t_max = 10.0;
  const TargetSpec t = reference_targets();
  const SimulationTrace tr = simulate(reference_start(), t, cfg);
  const double h = 1e-6;
  for (std::size_t k = 0; k < tr.size(); k += 97) {
    const Framework f = reference_start().with_positions(tr.positions[k]);
    const Eigen::VectorXd u = control_law(f, t);
    const double rate = (det_z_of(tr.positions[k] + h * u) - det_z_of(tr.positions[k] - h * u)) / (2 * h);
    const DetZ d = det_z(f, t);
    EXPECT_NEAR(rate + d.sigma * d.det, 0.0, 1e-6 * std::max(1.0, std::abs(rate))) << "t=" << tr.times[k];
    EXPECT_NEAR(tr.det_z[k], det_z_of(tr.positions[k]), 1e-12);
  }
  // Coarser check on the samples themselves, once the fast transient is over.
  for (std::size_t k = 2000; k + 1 < tr.size(); k += 500) {
    const double rate = (tr.det_z[k + 1] - tr.det_z[k - 1]) / (tr.times[k + 1] - tr.times[k - 1]);
    const DetZ d = det_z(reference_start().with_positions(tr.positions[k]), t);
    EXPECT_NEAR(rate, -d.sigma * d.det, 1e-4 * std::max(1.0, std::abs(rate)));
  }
}

TEST(Simulate, TranslationInvariance) {
  SimulationConfig cfg;
  cfg.t_max = 5.0;
  const Framework f = reference_start();
  Eigen::VectorXd shifted = f.positions();
  for (int v = 0; v < 3; ++v) shifted.segment<2>(2 * v) += Eigen::Vector2d(10.0, -4.0);
  const SimulationTrace a = simulate(f, reference_targets(), cfg);
  const SimulationTrace b = simulate(f.with_positions(shifted), reference_targets(), cfg);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); k += 100) {
    Eigen::VectorXd diff = b.positions[k] - a.positions[k];
    for (int v = 0; v < 3; ++v) EXPECT_LT((diff.segment<2>(2 * v) - Eigen::Vector2d(10, -4)).norm(), 1e-9);
    EXPECT_LT((a.errors[k] - b.errors[k]).norm(), 1e-9);
  }
}

TEST(Simulate, CollinearStartsStayCollinearAndStall) {
  std::mt19937_64 rng(113);
  for (int trial = 0; trial < 5; ++trial) {
    const Framework f(three_agent_graph(), 2, random_collinear(rng));
    const SimulationTrace tr = simulate(f, reference_targets());
    for (double d : tr.det_z) EXPECT_LT(std::abs(d), 1e-8);
    ASSERT_EQ(tr.status, TerminalStatus::IncorrectEquilibrium) << to_string(tr.status);
    const Framework last = f.with_positions(tr.positions.back());
    const EquilibriumReport eq = classify_equilibrium(last, reference_targets());
    EXPECT_EQ(eq.kind, EquilibriumKind::Incorrect);
    EXPECT_TRUE(eq.collinear);
    EXPECT_LT(eq.min_jacobian_eig, 0.0);
    EXPECT_GE(eq.error_norm, 1e-6);
    // Independent check: the oracle gradient vanishes there too.
    EXPECT_LT(oracle_gradient(f.graph(), reference_targets(), last.positions()).norm(), 1e-6);
  }
}

TEST(Simulate, EscapesAnIncorrectEquilibriumAlongTheUnstableMode) {
  std::mt19937_64 rng(127);
  const Framework f(three_agent_graph(), 2, random_collinear(rng));
  const SimulationTrace tr = simulate(f, reference_targets());
  ASSERT_EQ(tr.status, TerminalStatus::IncorrectEquilibrium);
  const Framework last = f.with_positions(tr.positions.back());
  const EquilibriumReport eq = classify_equilibrium(last, reference_targets());
  ASSERT_EQ(eq.kind, EquilibriumKind::Incorrect);
  SimulationConfig cfg;
  cfg.t_max = 400.0;
  cfg.convergence_eps = 1e-7;
  const SimulationTrace escape =
      simulate(last.with_positions(last.positions() + 1e-3 * eq.min_eigenvector.normalized()),
               reference_targets(), cfg);
  EXPECT_EQ(escape.status, TerminalStatus::Converged);
  EXPECT_LT(escape.error_norm.back(), 1e-6);
}

TEST(Simulate, GeneralGraphsAlsoDescend) {
  std::mt19937_64 rng(131);
  SimulationConfig cfg;
  cfg.t_max = 2.0;
  for (int trial = 0; trial < 10; ++trial) {
    const Graph g = testing::random_graph(rng, 5);
    const Framework f(g, 2, testing::random_points(rng, 5, 2));
    const TargetSpec t = targets_from(f.with_positions(testing::random_points(rng, 5, 2)));
    const SimulationTrace tr = simulate(f, t, cfg);
    for (std::size_t k = 1; k < tr.size(); ++k) EXPECT_LE(tr.lyapunov[k], tr.lyapunov[k - 1] + 1e-10);
    for (double d : tr.det_z) EXPECT_TRUE(std::isnan(d));
  }
}

TEST(Simulate, Deterministic) {
  SimulationConfig cfg;
  cfg.t_max = 3.0;
  const SimulationTrace a = simulate(reference_start(), reference_targets(), cfg);
  const SimulationTrace b = simulate(reference_start(), reference_targets(), cfg);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a.positions[k], b.positions[k]);
}

TEST(Equilibrium, ClassifiesDesiredAndGenericStates) {
  const Framework f = reference_start();
  EXPECT_EQ(classify_equilibrium(f, targets_from(f)).kind, EquilibriumKind::Desired);
  const EquilibriumReport r = classify_equilibrium(f, reference_targets());
  EXPECT_EQ(r.kind, EquilibriumKind::NotEquilibrium);
  EXPECT_GE(r.gradient_norm, 1e-6);
  EXPECT_TRUE(std::isnan(r.min_jacobian_eig));
}

TEST(StatusNames, AreStable) {
  EXPECT_EQ(to_string(TerminalStatus::Converged), "converged");
  EXPECT_EQ(to_string(TerminalStatus::IncorrectEquilibrium), "converged-to-incorrect");
  EXPECT_EQ(to_string(TerminalStatus::MaxTime), "max-time");
  EXPECT_EQ(to_string(TerminalStatus::Diverged), "diverged");
  EXPECT_EQ(to_string(TerminalStatus::Degenerate), "degenerate");
}

}  // namespace
}  // namespace weakrig
