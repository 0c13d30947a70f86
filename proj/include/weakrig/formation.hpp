#pragma once

#include <Eigen/Dense>

#include <string_view>
#include <utility>
#include <vector>

#include "weakrig/core.hpp"

namespace weakrig {

/// Desired squared distances and cosines, one per constraint, in graph order.
/// Targets need not be realizable.
struct TargetSpec {
  std::vector<std::pair<Edge, double>> sq_distances;
  std::vector<std::pair<AngleTriple, double>> cosines;
};

/// Throws Error{TargetMismatch} unless t lists exactly f's constraints in f's order.
void check_targets(const Graph& g, const TargetSpec& t);

/// e = F_W(p) - [d*²; c*], ordered like the weak rigidity matrix rows.
Eigen::VectorXd error_vector(const Framework& f, const TargetSpec& t);

/// u = -R_W(p)^T e(p).
Eigen::VectorXd control_law(const Framework& f, const TargetSpec& t);

/// True for the three-agent topology: n = 3, edges {(0,1),(0,2)}, angle (0;1,2).
bool is_three_agent_topology(const Graph& g);

/// E(p) with R_W^T e = (E ⊗ I_2) p for the three-agent system.
/// Throws Error{WrongTopology}.
Eigen::Matrix3d e_matrix_three_agent(const Framework& f, const TargetSpec& t);

/// Negative Jacobian of the flow, J = ∂(R_W^T e)/∂p, by central differences.
Eigen::MatrixXd flow_jacobian(const Framework& f, const TargetSpec& t, double fd_step = 1e-6);

struct DetZ {
  double det = 0.0;
  /// Rate with d/dt det Z = -sigma · det Z along the flow.
  double sigma = 0.0;
};

/// det[z_01 z_02] and its decay rate. Throws Error{WrongTopology}.
DetZ det_z(const Framework& f, const TargetSpec& t);

/// |det Z| < 1e-8 · (1 + max squared distance).
bool is_collinear_three_agent(const Framework& f);

enum class TerminalStatus { Converged, IncorrectEquilibrium, MaxTime, Diverged, Degenerate };

std::string_view to_string(TerminalStatus s);

struct SimulationConfig {
  double dt = 1e-3;
  double t_max = 50.0;
  double convergence_eps = 1e-8;
  /// A stall (‖R_W^T e‖ < convergence_eps) only counts as an incorrect
  /// equilibrium once ‖e‖ is at least this large; closer to zero the flow is
  /// still converging and integration continues.
  double incorrect_error_floor = 1e-4;
  double divergence_bound = 1e6;
};

struct SimulationTrace {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> positions;
  std::vector<Eigen::VectorXd> errors;
  std::vector<double> error_norm;
  std::vector<double> lyapunov;
  /// NaN unless the graph has the three-agent topology.
  std::vector<double> det_z;
  TerminalStatus status = TerminalStatus::MaxTime;
  /// ‖R_W^T e‖ at the last sample.
  double final_gradient_norm = 0.0;

  [[nodiscard]] std::size_t size() const noexcept { return times.size(); }
  [[nodiscard]] std::size_t steps() const noexcept { return times.empty() ? 0 : times.size() - 1; }
};

/// Integrates ṗ = -R_W^T e with classical RK4 at fixed step.
SimulationTrace simulate(const Framework& f0, const TargetSpec& t, const SimulationConfig& cfg = {});

enum class EquilibriumKind { Desired, Incorrect, NotEquilibrium };

std::string_view to_string(EquilibriumKind k);

struct EquilibriumReport {
  EquilibriumKind kind = EquilibriumKind::NotEquilibrium;
  double error_norm = 0.0;
  double gradient_norm = 0.0;
  /// Smallest eigenvalue of the symmetrized flow Jacobian; NaN unless Incorrect.
  double min_jacobian_eig = 0.0;
  Eigen::VectorXd min_eigenvector;
  bool collinear = false;
};

EquilibriumReport classify_equilibrium(const Framework& f, const TargetSpec& t, double tol = 1e-6);

/// Targets realized exactly by f.
TargetSpec targets_from(const Framework& f);

namespace detail {

Eigen::VectorXd flow_gradient(const Graph& g, const TargetSpec& t, const Eigen::VectorXd& p);

}  // namespace detail

}  // namespace weakrig
