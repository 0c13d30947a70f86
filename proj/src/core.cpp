#include "weakrig/core.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace weakrig {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SelfLoop: return "SelfLoop";
    case ErrorKind::DuplicateConstraint: return "DuplicateConstraint";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::DegenerateAngleTriple: return "DegenerateAngleTriple";
    case ErrorKind::CollocatedPoints: return "CollocatedPoints";
    case ErrorKind::EmptyEdgeSet: return "EmptyEdgeSet";
    case ErrorKind::DegenerateConfiguration: return "DegenerateConfiguration";
    case ErrorKind::TargetMismatch: return "TargetMismatch";
    case ErrorKind::WrongTopology: return "WrongTopology";
    case ErrorKind::CollinearPlacement: return "CollinearPlacement";
    case ErrorKind::BadAnchor: return "BadAnchor";
    case ErrorKind::EdgeNotFound: return "EdgeNotFound";
    case ErrorKind::SeedNotRigid: return "SeedNotRigid";
    case ErrorKind::PlacementExhausted: return "PlacementExhausted";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Edge normalized(Edge e) noexcept { return e.i < e.j ? e : Edge{e.j, e.i}; }

AngleTriple normalized(AngleTriple a) noexcept {
  return a.i < a.j ? a : AngleTriple{a.apex, a.j, a.i};
}

bool Graph::has_edge(Edge e) const {
  return std::find(edges_.begin(), edges_.end(), normalized(e)) != edges_.end();
}

bool Graph::has_angle(AngleTriple a) const {
  return std::find(angles_.begin(), angles_.end(), normalized(a)) != angles_.end();
}

Graph build_graph(int n, const std::vector<Edge>& edges, const std::vector<AngleTriple>& angles) {
  if (n < 0) throw Error(ErrorKind::InvalidArgument, "vertex count must be non-negative");
  auto in_range = [n](int v) { return v >= 0 && v < n; };

  Graph g;
  g.n_ = n;
  std::set<Edge> seen_edges;
  for (int u = 0; u < static_cast<int>(edges.size()); ++u) {
    const Edge e = edges[u];
    const ErrorLocation where{"edges", u};
    if (!in_range(e.i) || !in_range(e.j)) {
      throw Error(ErrorKind::IndexOutOfRange,
                  "edge (" + std::to_string(e.i) + "," + std::to_string(e.j) +
                      ") references a vertex outside 0.." + std::to_string(n - 1),
                  where);
    }
    if (e.i == e.j) {
      throw Error(ErrorKind::SelfLoop, "self-loop at vertex " + std::to_string(e.i), where);
    }
    const Edge ne = normalized(e);
    if (!seen_edges.insert(ne).second) {
      throw Error(ErrorKind::DuplicateConstraint,
                  "duplicate edge (" + std::to_string(ne.i) + "," + std::to_string(ne.j) + ")",
                  where);
    }
    g.edges_.push_back(ne);
  }

  std::set<AngleTriple> seen_angles;
  for (int h = 0; h < static_cast<int>(angles.size()); ++h) {
    const AngleTriple a = angles[h];
    const ErrorLocation where{"angles", h};
    const std::string text = "(" + std::to_string(a.apex) + "," + std::to_string(a.i) + "," +
                             std::to_string(a.j) + ")";
    if (!in_range(a.apex) || !in_range(a.i) || !in_range(a.j)) {
      throw Error(ErrorKind::IndexOutOfRange, "angle " + text + " references a missing vertex",
                  where);
    }
    if (a.apex == a.i || a.apex == a.j || a.i == a.j) {
      throw Error(ErrorKind::DegenerateAngleTriple, "angle " + text + " repeats a vertex", where);
    }
    const AngleTriple na = normalized(a);
    if (!seen_angles.insert(na).second) {
      throw Error(ErrorKind::DuplicateConstraint, "duplicate angle " + text, where);
    }
    g.angles_.push_back(na);
  }
  return g;
}

double collocation_tolerance(const Eigen::VectorXd& positions) {
  const double scale = positions.size() == 0 ? 0.0 : positions.cwiseAbs().maxCoeff();
  return 1e-9 * (1.0 + scale);
}

namespace detail {

bool has_collocated_points(const Eigen::VectorXd& p, int dim, int* first, int* second) {
  const int n = static_cast<int>(p.size()) / dim;
  const double tol = collocation_tolerance(p);
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if ((p.segment(dim * a, dim) - p.segment(dim * b, dim)).norm() < tol) {
        if (first) *first = a;
        if (second) *second = b;
        return true;
      }
    }
  }
  return false;
}

double cosine(const Eigen::VectorXd& p, int dim, AngleTriple t) {
  const auto pk = p.segment(dim * t.apex, dim);
  const auto pi = p.segment(dim * t.i, dim);
  const auto pj = p.segment(dim * t.j, dim);
  const double ik2 = (pi - pk).squaredNorm();
  const double jk2 = (pj - pk).squaredNorm();
  const double ij2 = (pi - pj).squaredNorm();
  const double tol = collocation_tolerance(p);
  if (ik2 < tol * tol || jk2 < tol * tol || ij2 < tol * tol) {
    throw Error(ErrorKind::CollocatedPoints,
                "angle (" + std::to_string(t.apex) + "," + std::to_string(t.i) + "," +
                    std::to_string(t.j) + ") has collocated points");
  }
  const double c = (ik2 + jk2 - ij2) / (2.0 * std::sqrt(ik2) * std::sqrt(jk2));
  return std::clamp(c, -1.0, 1.0);
}

}  // namespace detail

Framework::Framework(Graph graph, int dim, Eigen::VectorXd positions)
    : graph_(std::move(graph)), dim_(dim), p_(std::move(positions)) {
  if (dim_ != 2 && dim_ != 3) {
    throw Error(ErrorKind::InvalidArgument, "dimension must be 2 or 3");
  }
  if (p_.size() != static_cast<Eigen::Index>(dim_) * graph_.n()) {
    throw Error(ErrorKind::InvalidArgument,
                "expected " + std::to_string(dim_ * graph_.n()) + " coordinates, got " +
                    std::to_string(p_.size()));
  }
  if (!p_.allFinite()) {
    throw Error(ErrorKind::InvalidArgument, "non-finite coordinate");
  }
  int a = 0;
  int b = 0;
  if (detail::has_collocated_points(p_, dim_, &a, &b)) {
    throw Error(ErrorKind::CollocatedPoints,
                "points " + std::to_string(a) + " and " + std::to_string(b) + " coincide",
                ErrorLocation{"positions", b});
  }
}

Framework Framework::planar(Graph graph, const std::vector<Eigen::Vector2d>& points) {
  Eigen::VectorXd p(2 * points.size());
  for (std::size_t i = 0; i < points.size(); ++i) p.segment<2>(2 * i) = points[i];
  return Framework(std::move(graph), 2, std::move(p));
}

Framework Framework::spatial(Graph graph, const std::vector<Eigen::Vector3d>& points) {
  Eigen::VectorXd p(3 * points.size());
  for (std::size_t i = 0; i < points.size(); ++i) p.segment<3>(3 * i) = points[i];
  return Framework(std::move(graph), 3, std::move(p));
}

Framework Framework::with_positions(Eigen::VectorXd positions) const {
  return Framework(graph_, dim_, std::move(positions));
}

Framework Framework::with_graph(Graph graph) const {
  if (graph.n() != graph_.n()) {
    throw Error(ErrorKind::InvalidArgument, "replacement graph changes the vertex count");
  }
  return Framework(std::move(graph), dim_, p_);
}

namespace {

std::vector<Edge> support_edges(const Graph& g) {
  std::set<Edge> extra;
  for (const auto& a : g.angles()) {
    for (Edge e : {Edge{a.i, a.j}, Edge{a.i, a.apex}, Edge{a.j, a.apex}}) {
      const Edge ne = normalized(e);
      if (!g.has_edge(ne)) extra.insert(ne);
    }
  }
  std::vector<Edge> out = g.edges();
  out.insert(out.end(), extra.begin(), extra.end());
  return out;
}

}  // namespace

Graph induced_angle_support(const Graph& g) {
  return build_graph(g.n(), support_edges(g), g.angles());
}

Graph induced_distance_closure(const Graph& g) { return build_graph(g.n(), support_edges(g), {}); }

Eigen::MatrixXd incidence_matrix(const Graph& g) {
  if (g.m() == 0) throw Error(ErrorKind::EmptyEdgeSet, "incidence matrix of an edgeless graph");
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(g.m(), g.n());
  for (int u = 0; u < g.m(); ++u) {
    h(u, g.edges()[u].i) = 1.0;
    h(u, g.edges()[u].j) = -1.0;
  }
  return h;
}

Eigen::MatrixXd lifted_incidence_matrix(const Graph& g, int dim) {
  const Eigen::MatrixXd h = incidence_matrix(g);
  Eigen::MatrixXd lifted = Eigen::MatrixXd::Zero(h.rows() * dim, h.cols() * dim);
  for (Eigen::Index r = 0; r < h.rows(); ++r)
    for (Eigen::Index c = 0; c < h.cols(); ++c)
      if (h(r, c) != 0.0)
        lifted.block(r * dim, c * dim, dim, dim) = h(r, c) * Eigen::MatrixXd::Identity(dim, dim);
  return lifted;
}

double cosine_of_angle(const Framework& f, AngleTriple triple) {
  const int n = f.n();
  if (triple.apex < 0 || triple.apex >= n || triple.i < 0 || triple.i >= n || triple.j < 0 ||
      triple.j >= n) {
    throw Error(ErrorKind::IndexOutOfRange, "angle triple references a missing vertex");
  }
  return detail::cosine(f.positions(), f.dim(), triple);
}

Eigen::VectorXd edge_vectors(const Framework& f, const std::vector<Edge>& edges) {
  const int d = f.dim();
  Eigen::VectorXd z(d * static_cast<Eigen::Index>(edges.size()));
  for (std::size_t u = 0; u < edges.size(); ++u) {
    const Edge e = normalized(edges[u]);
    z.segment(d * u, d) = f.point(e.i) - f.point(e.j);
  }
  return z;
}

}  // namespace weakrig
