#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "weakrig/core.hpp"

namespace weakrig {

inline constexpr double kDefaultRankTolerance = 1e-9;

/// Row label of the weak rigidity matrix: a squared-distance row or a cosine row.
using ConstraintLabel = std::variant<Edge, AngleTriple>;

/// Jacobian of the weak rigidity function. The first m rows belong to edges,
/// the last q rows to angle triples, in graph order.
struct WeakRigidityMatrix {
  Eigen::MatrixXd matrix;
  std::vector<ConstraintLabel> row_labels;
  std::uint64_t framework_hash = 0;
};

enum class Verdict { Rigid, NotRigid };

struct RigidityReport {
  int dimension = 2;
  int rank = 0;
  int required_rank = 0;
  Verdict verdict = Verdict::NotRigid;
  int null_space_dim = 0;
  double trivial_motion_residual = 0.0;
  double tolerance_used = kDefaultRankTolerance;
  /// Free-form qualifier; the 3D path uses it to mark generic-case negatives.
  std::string note;

  [[nodiscard]] bool rigid() const noexcept { return verdict == Verdict::Rigid; }
  friend bool operator==(const RigidityReport&, const RigidityReport&) = default;
};

/// Stable FNV-1a hash of dimension, graph and configuration bytes.
std::uint64_t framework_hash(const Framework& f);

/// [‖z_1‖², ..., ‖z_m‖², cos θ_1, ..., cos θ_q].
Eigen::VectorXd weak_rigidity_function(const Framework& f);

/// Partials of A = (‖a‖² + ‖b‖² - ‖c‖²) / (2‖a‖‖b‖) with respect to the three
/// edge vectors a = z_ik, b = z_jk, c = z_ij that define a cosine.
struct CosineEdgePartials {
  Eigen::VectorXd wrt_a;
  Eigen::VectorXd wrt_b;
  Eigen::VectorXd wrt_c;
};

CosineEdgePartials cosine_edge_partials(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                                        const Eigen::VectorXd& c);

/// ∂cos θ^k_ij / ∂p for the three involved vertices (each a dim-vector).
struct CosineGradientBlocks {
  Eigen::VectorXd apex;
  Eigen::VectorXd i;
  Eigen::VectorXd j;
};

CosineGradientBlocks cosine_gradient_blocks(const Framework& f, AngleTriple triple);

/// R_W = ∂F_W/∂p, (m+q) x (dim·n). Distance rows are 2z^T / -2z^T in the
/// endpoint columns; cosine rows come from cosine_gradient_blocks.
WeakRigidityMatrix weak_rigidity_matrix(const Framework& f);

/// Number of singular values strictly above rel_tol · σ_max.
/// Throws Error{InvalidArgument} for an empty matrix.
int numerical_rank(const Eigen::MatrixXd& m, double rel_tol = kDefaultRankTolerance);

/// Columns: x/y translations, rotation (I_n ⊗ J)p, plus scaling p when E = ∅.
/// Throws Error{DegenerateConfiguration} if the columns are dependent.
Eigen::MatrixXd trivial_motion_basis(const Framework& f);

/// Rank test against 2n-3 (E ≠ ∅) or 2n-4 (E = ∅). Planar frameworks only.
RigidityReport classify_infinitesimal_weak_rigidity(const Framework& f,
                                                   double rel_tol = kDefaultRankTolerance);

/// R_D = ½ ∂F_D/∂p: one row per edge with z^T at i and -z^T at j.
/// Throws Error{EmptyEdgeSet}.
Eigen::MatrixXd distance_rigidity_matrix(const Framework& f);

/// Weak rigidity in R^3 via the rank of R_D on the distance closure Ḡ,
/// compared with 3n-6. A failing rank is a definitive negative only at
/// generic configurations, which the report note says.
RigidityReport classify_weak_rigidity_3d(const Framework& f,
                                         double rel_tol = kDefaultRankTolerance);

struct MinimalityResult {
  bool minimal = false;
  bool rigid = false;
  /// A constraint that can be dropped without losing rigidity, if any.
  std::optional<ConstraintLabel> removable;
};

/// Rigid, and every single-constraint removal drops the rank below the
/// original requirement. Constraints are tried from the last angle backwards
/// to the first edge, so the witness is the most recently listed removable one.
MinimalityResult is_minimally_weakly_rigid(const Framework& f,
                                           double rel_tol = kDefaultRankTolerance);

/// Graph with one constraint removed.
Graph without_constraint(const Graph& g, const ConstraintLabel& label);

std::string describe(const ConstraintLabel& label);

namespace detail {

/// Weak rigidity function and matrix on a raw configuration; dim-generic.
Eigen::VectorXd weak_rigidity_function(const Graph& g, const Eigen::VectorXd& p, int dim);
Eigen::MatrixXd weak_rigidity_matrix(const Graph& g, const Eigen::VectorXd& p, int dim);

}  // namespace detail

}  // namespace weakrig
