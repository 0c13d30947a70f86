#include "weakrig/rigidity.hpp"

#include <cmath>
#include <cstring>
#include <string>

namespace weakrig {

namespace {

void require_indices(const Framework& f, AngleTriple t) {
  const int n = f.n();
  for (int v : {t.apex, t.i, t.j})
    if (v < 0 || v >= n) throw Error(ErrorKind::IndexOutOfRange, "angle triple out of range");
}

CosineGradientBlocks gradient_blocks(const Eigen::VectorXd& p, int dim, AngleTriple t) {
  const Eigen::VectorXd pk = p.segment(dim * t.apex, dim);
  const Eigen::VectorXd pi = p.segment(dim * t.i, dim);
  const Eigen::VectorXd pj = p.segment(dim * t.j, dim);
  const double tol = collocation_tolerance(p);
  if ((pi - pk).norm() < tol || (pj - pk).norm() < tol || (pi - pj).norm() < tol) {
    throw Error(ErrorKind::CollocatedPoints, "angle " + describe(t) + " has collocated points");
  }
  // z_ik, z_jk, z_ij and the chain rule through z' = H̄'p.
  const CosineEdgePartials d = cosine_edge_partials(pi - pk, pj - pk, pi - pj);
  return {-d.wrt_a - d.wrt_b, d.wrt_a + d.wrt_c, d.wrt_b - d.wrt_c};
}

// 3D trivial motions: three translations and three infinitesimal rotations.
Eigen::MatrixXd spatial_trivial_motions(const Eigen::VectorXd& p, int n) {
  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(3 * n, 6);
  for (int v = 0; v < n; ++v) {
    const Eigen::Vector3d x = p.segment<3>(3 * v);
    basis.block<3, 3>(3 * v, 0).setIdentity();
    for (int axis = 0; axis < 3; ++axis)
      basis.block<3, 1>(3 * v, 3 + axis) = Eigen::Vector3d::Unit(axis).cross(x);
  }
  return basis;
}

double max_column_residual(const Eigen::MatrixXd& r, const Eigen::MatrixXd& basis) {
  if (r.rows() == 0) return 0.0;
  return (r * basis).colwise().norm().maxCoeff();
}

}  // namespace

std::string describe(const ConstraintLabel& label) {
  if (const auto* e = std::get_if<Edge>(&label)) {
    return "edge(" + std::to_string(e->i) + "," + std::to_string(e->j) + ")";
  }
  const auto& a = std::get<AngleTriple>(label);
  return "angle(" + std::to_string(a.apex) + ";" + std::to_string(a.i) + "," +
         std::to_string(a.j) + ")";
}

std::uint64_t framework_hash(const Framework& f) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* data, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t k = 0; k < len; ++k) {
      h ^= bytes[k];
      h *= 1099511628211ULL;
    }
  };
  const int header[2] = {f.dim(), f.n()};
  mix(header, sizeof header);
  for (const auto& e : f.graph().edges()) mix(&e, sizeof e);
  for (const auto& a : f.graph().angles()) mix(&a, sizeof a);
  mix(f.positions().data(), sizeof(double) * static_cast<std::size_t>(f.positions().size()));
  return h;
}

CosineEdgePartials cosine_edge_partials(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                                        const Eigen::VectorXd& c) {
  const double na = a.norm();
  const double nb = b.norm();
  const double value = (a.squaredNorm() + b.squaredNorm() - c.squaredNorm()) / (2.0 * na * nb);
  return {
      a / (na * nb) - value * a / (na * na),
      b / (na * nb) - value * b / (nb * nb),
      -c / (na * nb),
  };
}

CosineGradientBlocks cosine_gradient_blocks(const Framework& f, AngleTriple triple) {
  require_indices(f, triple);
  return gradient_blocks(f.positions(), f.dim(), triple);
}

namespace detail {

Eigen::VectorXd weak_rigidity_function(const Graph& g, const Eigen::VectorXd& p, int dim) {
  Eigen::VectorXd out(g.m() + g.q());
  for (int u = 0; u < g.m(); ++u) {
    const Edge e = g.edges()[u];
    out(u) = (p.segment(dim * e.i, dim) - p.segment(dim * e.j, dim)).squaredNorm();
  }
  for (int h = 0; h < g.q(); ++h) out(g.m() + h) = cosine(p, dim, g.angles()[h]);
  return out;
}

Eigen::MatrixXd weak_rigidity_matrix(const Graph& g, const Eigen::VectorXd& p, int dim) {
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(g.m() + g.q(), dim * g.n());
  for (int u = 0; u < g.m(); ++u) {
    const Edge e = g.edges()[u];
    const Eigen::VectorXd z = p.segment(dim * e.i, dim) - p.segment(dim * e.j, dim);
    r.block(u, dim * e.i, 1, dim) = 2.0 * z.transpose();
    r.block(u, dim * e.j, 1, dim) = -2.0 * z.transpose();
  }
  for (int h = 0; h < g.q(); ++h) {
    const AngleTriple t = g.angles()[h];
    const CosineGradientBlocks b = gradient_blocks(p, dim, t);
    const int row = g.m() + h;
    r.block(row, dim * t.apex, 1, dim) = b.apex.transpose();
    r.block(row, dim * t.i, 1, dim) = b.i.transpose();
    r.block(row, dim * t.j, 1, dim) = b.j.transpose();
  }
  return r;
}

}  // namespace detail

Eigen::VectorXd weak_rigidity_function(const Framework& f) {
  return detail::weak_rigidity_function(f.graph(), f.positions(), f.dim());
}

WeakRigidityMatrix weak_rigidity_matrix(const Framework& f) {
  WeakRigidityMatrix out;
  out.matrix = detail::weak_rigidity_matrix(f.graph(), f.positions(), f.dim());
  out.row_labels.reserve(f.graph().constraint_count());
  for (const auto& e : f.graph().edges()) out.row_labels.emplace_back(e);
  for (const auto& a : f.graph().angles()) out.row_labels.emplace_back(a);
  out.framework_hash = framework_hash(f);
  return out;
}

int numerical_rank(const Eigen::MatrixXd& m, double rel_tol) {
  if (m.size() == 0) throw Error(ErrorKind::InvalidArgument, "rank of an empty matrix");
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const Eigen::VectorXd& s = svd.singularValues();
  const double cutoff = rel_tol * s(0);
  int rank = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k)
    if (s(k) > cutoff) ++rank;
  return rank;
}

Eigen::MatrixXd trivial_motion_basis(const Framework& f) {
  if (f.dim() != 2) throw Error(ErrorKind::InvalidArgument, "trivial_motion_basis is planar");
  const int n = f.n();
  const bool with_scaling = f.graph().m() == 0;
  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(2 * n, with_scaling ? 4 : 3);
  for (int v = 0; v < n; ++v) {
    const Eigen::Vector2d x = f.positions().segment<2>(2 * v);
    basis(2 * v, 0) = 1.0;
    basis(2 * v + 1, 1) = 1.0;
    basis.block<2, 1>(2 * v, 2) = Eigen::Vector2d(-x.y(), x.x());  // J p_v
    if (with_scaling) basis.block<2, 1>(2 * v, 3) = x;
  }
  if (numerical_rank(basis) != basis.cols()) {
    throw Error(ErrorKind::DegenerateConfiguration,
                "trivial motions are linearly dependent at this configuration");
  }
  return basis;
}

RigidityReport classify_infinitesimal_weak_rigidity(const Framework& f, double rel_tol) {
  if (f.dim() != 2) throw Error(ErrorKind::InvalidArgument, "expected a planar framework");
  if (f.n() < 3) throw Error(ErrorKind::InvalidArgument, "classification needs n >= 3");
  if (f.graph().constraint_count() == 0) {
    throw Error(ErrorKind::InvalidArgument, "framework has no constraints");
  }
  const Eigen::MatrixXd basis = trivial_motion_basis(f);
  const Eigen::MatrixXd r = detail::weak_rigidity_matrix(f.graph(), f.positions(), 2);

  RigidityReport report;
  report.dimension = 2;
  report.rank = numerical_rank(r, rel_tol);
  report.required_rank = f.graph().m() > 0 ? 2 * f.n() - 3 : 2 * f.n() - 4;
  report.verdict = report.rank == report.required_rank ? Verdict::Rigid : Verdict::NotRigid;
  report.null_space_dim = 2 * f.n() - report.rank;
  report.trivial_motion_residual = max_column_residual(r, basis);
  report.tolerance_used = rel_tol;
  return report;
}

Eigen::MatrixXd distance_rigidity_matrix(const Framework& f) {
  const Graph& g = f.graph();
  if (g.m() == 0) throw Error(ErrorKind::EmptyEdgeSet, "distance rigidity matrix needs edges");
  const int d = f.dim();
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(g.m(), d * g.n());
  for (int u = 0; u < g.m(); ++u) {
    const Edge e = g.edges()[u];
    const Eigen::VectorXd z = f.point(e.i) - f.point(e.j);
    r.block(u, d * e.i, 1, d) = z.transpose();
    r.block(u, d * e.j, 1, d) = -z.transpose();
  }
  return r;
}

RigidityReport classify_weak_rigidity_3d(const Framework& f, double rel_tol) {
  if (f.dim() != 3) throw Error(ErrorKind::InvalidArgument, "expected a 3D framework");
  if (f.n() < 3) throw Error(ErrorKind::InvalidArgument, "classification needs n >= 3");
  const Framework closure = f.with_graph(induced_distance_closure(f.graph()));
  const Eigen::MatrixXd r = distance_rigidity_matrix(closure);

  RigidityReport report;
  report.dimension = 3;
  report.rank = numerical_rank(r, rel_tol);
  report.required_rank = 3 * f.n() - 6;
  report.verdict = report.rank == report.required_rank ? Verdict::Rigid : Verdict::NotRigid;
  report.null_space_dim = 3 * f.n() - report.rank;
  report.trivial_motion_residual = max_column_residual(r, spatial_trivial_motions(f.positions(), f.n()));
  report.tolerance_used = rel_tol;
  if (!report.rigid()) {
    report.note = "rank test failed; not weakly rigid if the configuration is generic";
  }
  return report;
}

Graph without_constraint(const Graph& g, const ConstraintLabel& label) {
  std::vector<Edge> edges = g.edges();
  std::vector<AngleTriple> angles = g.angles();
  if (const auto* e = std::get_if<Edge>(&label)) {
    std::erase(edges, normalized(*e));
  } else {
    std::erase(angles, normalized(std::get<AngleTriple>(label)));
  }
  return build_graph(g.n(), edges, angles);
}

MinimalityResult is_minimally_weakly_rigid(const Framework& f, double rel_tol) {
  MinimalityResult result;
  const RigidityReport base = classify_infinitesimal_weak_rigidity(f, rel_tol);
  result.rigid = base.rigid();
  if (!result.rigid) return result;

  const Graph& g = f.graph();
  std::vector<ConstraintLabel> order;
  for (int h = g.q() - 1; h >= 0; --h) order.emplace_back(g.angles()[h]);
  for (int u = g.m() - 1; u >= 0; --u) order.emplace_back(g.edges()[u]);

  for (const auto& label : order) {
    const Graph reduced = without_constraint(g, label);
    if (reduced.constraint_count() == 0) continue;
    const Eigen::MatrixXd r = detail::weak_rigidity_matrix(reduced, f.positions(), 2);
    // Compared with the original requirement: dropping the last edge loses
    // scale, which must count as losing rigidity.
    if (numerical_rank(r, rel_tol) >= base.required_rank) {
      result.removable = label;
      return result;
    }
  }
  result.minimal = true;
  return result;
}

}  // namespace weakrig
