#pragma once

#include <Eigen/Dense>

#include <compare>
#include <vector>

#include "weakrig/error.hpp"

namespace weakrig {

/// Undirected edge. Normalized graphs always store i < j.
struct Edge {
  int i = 0;
  int j = 0;
  auto operator<=>(const Edge&) const = default;
};

/// Angle at `apex` subtended by the rays toward `i` and `j`.
/// Normalized graphs always store i < j.
struct AngleTriple {
  int apex = 0;
  int i = 0;
  int j = 0;
  auto operator<=>(const AngleTriple&) const = default;
};

/// Vertex set {0..n-1}, distance-constrained edges and angle-constrained triples.
/// Only build_graph (and the induced-graph constructions) produce instances, so
/// every Graph satisfies: no self-loops, no duplicates, all indices in range.
class Graph {
 public:
  Graph() = default;

  [[nodiscard]] int n() const noexcept { return n_; }
  [[nodiscard]] int m() const noexcept { return static_cast<int>(edges_.size()); }
  [[nodiscard]] int q() const noexcept { return static_cast<int>(angles_.size()); }
  [[nodiscard]] int constraint_count() const noexcept { return m() + q(); }
  [[nodiscard]] const std::vector<Edge>& edges() const noexcept { return edges_; }
  [[nodiscard]] const std::vector<AngleTriple>& angles() const noexcept { return angles_; }

  [[nodiscard]] bool has_edge(Edge e) const;
  [[nodiscard]] bool has_angle(AngleTriple a) const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  friend Graph build_graph(int n, const std::vector<Edge>& edges,
                           const std::vector<AngleTriple>& angles);

  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<AngleTriple> angles_;
};

[[nodiscard]] Edge normalized(Edge e) noexcept;
[[nodiscard]] AngleTriple normalized(AngleTriple a) noexcept;

/// Validates and normalizes. Edge and angle order is preserved.
/// Throws Error{SelfLoop | DuplicateConstraint | IndexOutOfRange | DegenerateAngleTriple}.
Graph build_graph(int n, const std::vector<Edge>& edges, const std::vector<AngleTriple>& angles);

/// Two points closer than this are considered collocated.
[[nodiscard]] double collocation_tolerance(const Eigen::VectorXd& positions);

/// A graph together with a configuration in R^2 or R^3. Positions are stacked
/// as [p_0; p_1; ...; p_{n-1}], each block of length dim.
class Framework {
 public:
  /// Throws Error{InvalidArgument} on size/dim mismatch and
  /// Error{CollocatedPoints} when two positions coincide.
  Framework(Graph graph, int dim, Eigen::VectorXd positions);

  static Framework planar(Graph graph, const std::vector<Eigen::Vector2d>& points);
  static Framework spatial(Graph graph, const std::vector<Eigen::Vector3d>& points);

  [[nodiscard]] const Graph& graph() const noexcept { return graph_; }
  [[nodiscard]] int dim() const noexcept { return dim_; }
  [[nodiscard]] int n() const noexcept { return graph_.n(); }
  [[nodiscard]] const Eigen::VectorXd& positions() const noexcept { return p_; }
  [[nodiscard]] Eigen::VectorXd point(int i) const { return p_.segment(dim_ * i, dim_); }

  /// Same graph, new configuration (validated).
  [[nodiscard]] Framework with_positions(Eigen::VectorXd positions) const;
  /// Same configuration, new graph on the same vertex count.
  [[nodiscard]] Framework with_graph(Graph graph) const;

 private:
  Graph graph_;
  int dim_;
  Eigen::VectorXd p_;
};

/// G': original edges first, then every angle's three support edges not
/// already present, sorted lexicographically. Angles are kept.
Graph induced_angle_support(const Graph& g);

/// Ḡ: same edge set as G' but with the angle set emptied.
Graph induced_distance_closure(const Graph& g);

/// Oriented incidence matrix (l x n). Row u has +1 at the smaller endpoint and
/// -1 at the larger, so that (H ⊗ I_d) p stacks z_ij = p_i - p_j.
/// Throws Error{EmptyEdgeSet}.
Eigen::MatrixXd incidence_matrix(const Graph& g);

/// (H ⊗ I_dim), the incidence matrix lifted to coordinates.
Eigen::MatrixXd lifted_incidence_matrix(const Graph& g, int dim);

/// Law-of-cosines value of the angle at triple.apex, clamped to [-1, 1].
/// Throws Error{CollocatedPoints} if the triple's points are not distinct.
double cosine_of_angle(const Framework& f, AngleTriple triple);

/// Stacked z_u = p_i - p_j for each edge (i < j), in the given order.
Eigen::VectorXd edge_vectors(const Framework& f, const std::vector<Edge>& edges);

namespace detail {

/// Unchecked cosine used by the hot paths; p is a stacked configuration.
double cosine(const Eigen::VectorXd& p, int dim, AngleTriple t);

/// True if any pair of points is closer than collocation_tolerance.
bool has_collocated_points(const Eigen::VectorXd& p, int dim, int* first = nullptr,
                           int* second = nullptr);

}  // namespace detail

}  // namespace weakrig
