#include "weakrig/formation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "weakrig/kernels.hpp"
#include "weakrig/rigidity.hpp"

namespace weakrig {

namespace {

Eigen::VectorXd target_vector(const TargetSpec& t) {
  Eigen::VectorXd v(t.sq_distances.size() + t.cosines.size());
  Eigen::Index k = 0;
  for (const auto& [edge, value] : t.sq_distances) v(k++) = value;
  for (const auto& [angle, value] : t.cosines) v(k++) = value;
  return v;
}

struct ThreeAgentIndex {
  int e01 = 0;  // row of edge (0,1)
  int e02 = 0;  // row of edge (0,2)
};

ThreeAgentIndex three_agent_index(const Graph& g) {
  if (!is_three_agent_topology(g)) {
    throw Error(ErrorKind::WrongTopology,
                "expected n = 3 with edges (0,1),(0,2) and the angle at vertex 0");
  }
  return g.edges()[0] == Edge{0, 1} ? ThreeAgentIndex{0, 1} : ThreeAgentIndex{1, 0};
}

}  // namespace

std::string_view to_string(TerminalStatus s) {
  switch (s) {
    case TerminalStatus::Converged: return "converged";
    case TerminalStatus::IncorrectEquilibrium: return "converged-to-incorrect";
    case TerminalStatus::MaxTime: return "max-time";
    case TerminalStatus::Diverged: return "diverged";
    case TerminalStatus::Degenerate: return "degenerate";
  }
  return "unknown";
}

std::string_view to_string(EquilibriumKind k) {
  switch (k) {
    case EquilibriumKind::Desired: return "desired";
    case EquilibriumKind::Incorrect: return "incorrect";
    case EquilibriumKind::NotEquilibrium: return "not-equilibrium";
  }
  return "unknown";
}

void check_targets(const Graph& g, const TargetSpec& t) {
  if (static_cast<int>(t.sq_distances.size()) != g.m() ||
      static_cast<int>(t.cosines.size()) != g.q()) {
    throw Error(ErrorKind::TargetMismatch,
                "targets cover " + std::to_string(t.sq_distances.size()) + " edges and " +
                    std::to_string(t.cosines.size()) + " angles; framework has " +
                    std::to_string(g.m()) + " and " + std::to_string(g.q()));
  }
  for (int u = 0; u < g.m(); ++u) {
    if (normalized(t.sq_distances[u].first) != g.edges()[u]) {
      throw Error(ErrorKind::TargetMismatch,
                  "target " + std::to_string(u) + " does not match " + describe(g.edges()[u]),
                  ErrorLocation{"sq_distances", u});
    }
    if (!(t.sq_distances[u].second >= 0.0)) {
      throw Error(ErrorKind::TargetMismatch, "squared distance target must be >= 0",
                  ErrorLocation{"sq_distances", u});
    }
  }
  for (int h = 0; h < g.q(); ++h) {
    if (normalized(t.cosines[h].first) != g.angles()[h]) {
      throw Error(ErrorKind::TargetMismatch,
                  "target " + std::to_string(h) + " does not match " + describe(g.angles()[h]),
                  ErrorLocation{"cosines", h});
    }
    const double c = t.cosines[h].second;
    if (!(c >= -1.0 && c <= 1.0)) {
      throw Error(ErrorKind::TargetMismatch, "cosine target outside [-1, 1]",
                  ErrorLocation{"cosines", h});
    }
  }
}

namespace detail {

Eigen::VectorXd flow_gradient(const Graph& g, const TargetSpec& t, const Eigen::VectorXd& p) {
  const Eigen::VectorXd e = weak_rigidity_function(g, p, 2) - target_vector(t);
  return weak_rigidity_matrix(g, p, 2).transpose() * e;
}

}  // namespace detail

Eigen::VectorXd error_vector(const Framework& f, const TargetSpec& t) {
  check_targets(f.graph(), t);
  return weak_rigidity_function(f) - target_vector(t);
}

Eigen::VectorXd control_law(const Framework& f, const TargetSpec& t) {
  check_targets(f.graph(), t);
  return -detail::flow_gradient(f.graph(), t, f.positions());
}

bool is_three_agent_topology(const Graph& g) {
  if (g.n() != 3 || g.m() != 2 || g.q() != 1) return false;
  const bool edges_ok = (g.has_edge({0, 1}) && g.has_edge({0, 2}));
  return edges_ok && g.angles()[0] == AngleTriple{0, 1, 2};
}

Eigen::Matrix3d e_matrix_three_agent(const Framework& f, const TargetSpec& t) {
  const ThreeAgentIndex idx = three_agent_index(f.graph());
  const Eigen::VectorXd e = error_vector(f, t);
  const double e1 = e(idx.e01);
  const double e2 = e(idx.e02);
  const double ec = e(2);

  const Eigen::Vector2d a = f.point(1) - f.point(0);
  const Eigen::Vector2d b = f.point(2) - f.point(0);
  const double r = a.norm();
  const double s = b.norm();
  const double c = cosine_of_angle(f, {0, 1, 2});

  // Coefficients of p_0, p_1, p_2 in ∂cos/∂p_1 (beta) and ∂cos/∂p_2 (gamma);
  // alpha = -(beta + gamma) by translation invariance.
  const Eigen::Vector3d beta(-1.0 / (r * s) + c / (r * r), -c / (r * r), 1.0 / (r * s));
  const Eigen::Vector3d gamma(-1.0 / (r * s) + c / (s * s), 1.0 / (r * s), -c / (s * s));
  const Eigen::Vector3d alpha = -(beta + gamma);

  Eigen::Matrix3d m;
  m << 2 * e1 + 2 * e2, -2 * e1, -2 * e2,
       -2 * e1, 2 * e1, 0.0,
       -2 * e2, 0.0, 2 * e2;
  m.row(0) += ec * alpha.transpose();
  m.row(1) += ec * beta.transpose();
  m.row(2) += ec * gamma.transpose();
  return m;
}

Eigen::MatrixXd flow_jacobian(const Framework& f, const TargetSpec& t, double fd_step) {
  check_targets(f.graph(), t);
  if (!(fd_step > 0.0)) throw Error(ErrorKind::InvalidArgument, "fd_step must be positive");
  const Graph& g = f.graph();
  return central_difference_jacobian(
      [&g, &t](const Eigen::VectorXd& p) { return detail::flow_gradient(g, t, p); },
      f.positions(), fd_step);
}

DetZ det_z(const Framework& f, const TargetSpec& t) {
  const ThreeAgentIndex idx = three_agent_index(f.graph());
  const Eigen::Vector2d z01 = f.point(0) - f.point(1);
  const Eigen::Vector2d z02 = f.point(0) - f.point(2);
  const Eigen::VectorXd e = error_vector(f, t);
  const double r2 = z01.squaredNorm();
  const double s2 = z02.squaredNorm();
  const double c = cosine_of_angle(f, {0, 1, 2});

  DetZ out;
  out.det = z01.x() * z02.y() - z01.y() * z02.x();
  out.sigma = 4.0 * e(idx.e01) + 4.0 * e(idx.e02) -
              (2.0 * c * (1.0 / r2 + 1.0 / s2) - 2.0 / std::sqrt(r2 * s2)) * e(2);
  return out;
}

namespace {

double det_z_raw(const Eigen::VectorXd& p) {
  const Eigen::Vector2d z01 = p.segment<2>(0) - p.segment<2>(2);
  const Eigen::Vector2d z02 = p.segment<2>(0) - p.segment<2>(4);
  return z01.x() * z02.y() - z01.y() * z02.x();
}

bool collinear_raw(const Eigen::VectorXd& p) {
  double max_sq = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b)
      max_sq = std::max(max_sq, (p.segment<2>(2 * a) - p.segment<2>(2 * b)).squaredNorm());
  return std::abs(det_z_raw(p)) < 1e-8 * (1.0 + max_sq);
}

}  // namespace

bool is_collinear_three_agent(const Framework& f) {
  if (f.n() != 3 || f.dim() != 2) throw Error(ErrorKind::WrongTopology, "expected three agents");
  return collinear_raw(f.positions());
}

SimulationTrace simulate(const Framework& f0, const TargetSpec& t, const SimulationConfig& cfg) {
  if (f0.dim() != 2) throw Error(ErrorKind::InvalidArgument, "simulation is planar");
  if (!(cfg.dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "dt must be positive");
  if (!(cfg.t_max >= 0.0)) throw Error(ErrorKind::InvalidArgument, "t_max must be >= 0");
  check_targets(f0.graph(), t);

  const Graph& g = f0.graph();
  const bool three_agent = is_three_agent_topology(g);
  const Eigen::VectorXd target = target_vector(t);
  const auto total_steps =
      static_cast<long long>(std::ceil(cfg.t_max / cfg.dt - 1e-9));

  SimulationTrace trace;
  auto velocity = [&](const Eigen::VectorXd& p) -> Eigen::VectorXd {
    return -detail::flow_gradient(g, t, p);
  };
  auto record = [&](double time, const Eigen::VectorXd& p, const Eigen::VectorXd& e) {
    trace.times.push_back(time);
    trace.positions.push_back(p);
    trace.errors.push_back(e);
    trace.error_norm.push_back(e.norm());
    trace.lyapunov.push_back(0.5 * e.squaredNorm());
    trace.det_z.push_back(three_agent ? det_z_raw(p) : std::numeric_limits<double>::quiet_NaN());
  };

  Eigen::VectorXd p = f0.positions();
  for (long long k = 0;; ++k) {
    Eigen::VectorXd e;
    Eigen::VectorXd grad;
    try {
      e = detail::weak_rigidity_function(g, p, 2) - target;
      grad = detail::weak_rigidity_matrix(g, p, 2).transpose() * e;
    } catch (const Error&) {
      trace.status = TerminalStatus::Degenerate;
      return trace;
    }
    record(static_cast<double>(k) * cfg.dt, p, e);
    trace.final_gradient_norm = grad.norm();

    if (e.norm() < cfg.convergence_eps) {
      trace.status = TerminalStatus::Converged;
      return trace;
    }
    if (grad.norm() < cfg.convergence_eps && e.norm() >= cfg.incorrect_error_floor) {
      trace.status = TerminalStatus::IncorrectEquilibrium;
      return trace;
    }
    if (k >= total_steps) {
      trace.status = TerminalStatus::MaxTime;
      return trace;
    }

    const double h = cfg.dt;
    try {
      const Eigen::VectorXd k1 = -grad;
      const Eigen::VectorXd k2 = velocity(p + 0.5 * h * k1);
      const Eigen::VectorXd k3 = velocity(p + 0.5 * h * k2);
      const Eigen::VectorXd k4 = velocity(p + h * k3);
      p += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    } catch (const Error&) {
      trace.status = TerminalStatus::Degenerate;
      return trace;
    }
    if (!p.allFinite() || p.cwiseAbs().maxCoeff() > cfg.divergence_bound) {
      trace.status = TerminalStatus::Diverged;
      return trace;
    }
    if (detail::has_collocated_points(p, 2)) {
      trace.status = TerminalStatus::Degenerate;
      return trace;
    }
  }
}

EquilibriumReport classify_equilibrium(const Framework& f, const TargetSpec& t, double tol) {
  const Eigen::VectorXd e = error_vector(f, t);
  const Eigen::VectorXd grad = detail::flow_gradient(f.graph(), t, f.positions());

  EquilibriumReport report;
  report.error_norm = e.norm();
  report.gradient_norm = grad.norm();
  report.min_jacobian_eig = std::numeric_limits<double>::quiet_NaN();
  if (is_three_agent_topology(f.graph())) report.collinear = collinear_raw(f.positions());

  if (report.error_norm < tol) {
    report.kind = EquilibriumKind::Desired;
  } else if (report.gradient_norm < tol) {
    report.kind = EquilibriumKind::Incorrect;
    const Eigen::MatrixXd j = flow_jacobian(f, t);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (j + j.transpose()));
    report.min_jacobian_eig = eig.eigenvalues()(0);
    report.min_eigenvector = eig.eigenvectors().col(0);
  } else {
    report.kind = EquilibriumKind::NotEquilibrium;
  }
  return report;
}

TargetSpec targets_from(const Framework& f) {
  TargetSpec t;
  const Eigen::VectorXd values = weak_rigidity_function(f);
  const Graph& g = f.graph();
  for (int u = 0; u < g.m(); ++u) t.sq_distances.emplace_back(g.edges()[u], values(u));
  for (int h = 0; h < g.q(); ++h) t.cosines.emplace_back(g.angles()[h], values(g.m() + h));
  return t;
}

}  // namespace weakrig
