#include "weakrig/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "weakrig/formation.hpp"
#include "weakrig/henneberg.hpp"
#include "weakrig/io.hpp"
#include "weakrig/kernels.hpp"
#include "weakrig/rigidity.hpp"

namespace weakrig {

namespace {

struct AnalyzeOptions {
  std::string framework;
  double tol = kDefaultRankTolerance;
  std::string dim_mode = "auto";
  std::string format = "human";
  std::string matrix_csv;
};

struct SimulateOptions {
  std::string framework;
  std::string targets;
  SimulationConfig cfg;
  std::string out;
};

struct GrowOptions {
  int n = 3;
  std::uint64_t seed = 0;
  double mix = 0.5;
  std::string out;
  std::string log;
};

struct CheckGradientOptions {
  std::string framework;
  double fd_step = 1e-6;
};

constexpr double kGradientCheckLimit = 1e-6;

// A planar framework analysed in space sits at z = 0.
Framework lifted_to_space(const Framework& f) {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(3 * f.n());
  for (int v = 0; v < f.n(); ++v) p.segment<2>(3 * v) = f.positions().segment<2>(2 * v);
  return Framework(f.graph(), 3, std::move(p));
}

std::string verdict_text(const RigidityReport& r) {
  if (r.dimension == 2) {
    return r.rigid() ? "infinitesimally weakly rigid" : "not infinitesimally weakly rigid";
  }
  return r.rigid() ? "weakly rigid" : "not weakly rigid";
}

int cmd_analyze(const AnalyzeOptions& o, std::ostream& out) {
  Framework f = io::read_framework(o.framework);
  if (o.dim_mode == "2d" && f.dim() != 2) {
    throw Error(ErrorKind::InvalidArgument, "--dim-mode 2d needs a planar framework");
  }
  if (o.dim_mode == "3d" && f.dim() == 2) f = lifted_to_space(f);

  const RigidityReport report = f.dim() == 2 ? classify_infinitesimal_weak_rigidity(f, o.tol)
                                             : classify_weak_rigidity_3d(f, o.tol);

  if (!o.matrix_csv.empty()) {
    const Eigen::MatrixXd m =
        f.dim() == 2
            ? weak_rigidity_matrix(f).matrix
            : distance_rigidity_matrix(f.with_graph(induced_distance_closure(f.graph())));
    std::ostringstream csv;
    io::write_matrix_csv(csv, m);
    io::write_file_atomic(o.matrix_csv, csv.str());
  }

  if (o.format == "json") {
    out << io::report_to_json(report);
  } else {
    out << "rank " << report.rank << "/" << report.required_rank << ": " << verdict_text(report)
        << "\n";
    out << "dimension: " << report.dimension << "\n";
    out << "null-space dimension: " << report.null_space_dim << "\n";
    out << "trivial-motion residual: " << io::format_number(report.trivial_motion_residual) << "\n";
    out << "tolerance: " << io::format_number(report.tolerance_used) << "\n";
    if (!report.note.empty()) out << "note: " << report.note << "\n";
  }
  return report.rigid() ? kExitOk : kExitNotRigid;
}

int cmd_simulate(const SimulateOptions& o, std::ostream& out, std::ostream& err) {
  const Framework f = io::read_framework(o.framework);
  if (f.dim() != 2) throw Error(ErrorKind::InvalidArgument, "simulate needs a planar framework");
  const TargetSpec targets = io::read_targets(o.targets, f.graph());
  const bool three_agent = is_three_agent_topology(f.graph());
  if (!three_agent) {
    err << "warning: not the three-agent topology; convergence guarantees do not apply\n";
  }

  const SimulationTrace trace = simulate(f, targets, o.cfg);
  if (!o.out.empty()) {
    std::ostringstream csv;
    io::write_trace_csv(csv, trace, f.graph());
    io::write_file_atomic(o.out, csv.str());
  }

  out << "status: " << to_string(trace.status) << "\n";
  out << "final |e|: " << io::format_number(trace.error_norm.back()) << "\n";
  out << "final |grad V|: " << io::format_number(trace.final_gradient_norm) << "\n";
  out << "steps: " << trace.steps() << "\n";
  out << "time: " << io::format_number(trace.times.back()) << "\n";

  switch (trace.status) {
    case TerminalStatus::Converged:
      return kExitOk;
    case TerminalStatus::MaxTime:
      return kExitTimeout;
    case TerminalStatus::IncorrectEquilibrium: {
      const Framework last = f.with_positions(trace.positions.back());
      const EquilibriumReport eq =
          classify_equilibrium(last, targets, std::max(1e-6, o.cfg.convergence_eps));
      out << "equilibrium: " << to_string(eq.kind) << (eq.collinear ? " (collinear)" : "") << "\n";
      if (!std::isnan(eq.min_jacobian_eig)) {
        out << "min Jacobian eigenvalue: " << io::format_number(eq.min_jacobian_eig) << "\n";
        out << "stability: " << (eq.min_jacobian_eig < 0.0 ? "unstable" : "not shown unstable")
            << "\n";
      }
      return kExitIncorrectEquilibrium;
    }
    case TerminalStatus::Diverged:
    case TerminalStatus::Degenerate:
      break;
  }
  err << "error: simulation ended with status " << to_string(trace.status) << "\n";
  return kExitError;
}

int cmd_grow(const GrowOptions& o, std::ostream& out) {
  GrowthOptions options;
  options.mix = o.mix;
  const GrowthResult result = grow_random(triangle_seed(), o.n - 3, o.seed, options);
  const Framework& last = result.frameworks.back();

  const std::string json = io::framework_to_json(last);
  std::string log;
  for (const auto& step : result.steps) log += format_growth_step(step) + "\n";

  if (!o.log.empty()) io::write_file_atomic(o.log, log);
  if (o.out.empty()) {
    out << json;
    return kExitOk;
  }
  io::write_file_atomic(o.out, json);
  out << "vertices: " << last.n() << "\n";
  out << "constraints: " << last.graph().constraint_count() << " (" << last.graph().m()
      << " edges, " << last.graph().q() << " angles)\n";
  out << "steps: " << result.steps.size() << "\n";
  out << "minimality rejections: " << result.minimality_rejections << "\n";
  return kExitOk;
}

int cmd_check_gradient(const CheckGradientOptions& o, std::ostream& out) {
  const Framework f = io::read_framework(o.framework);
  const Graph& g = f.graph();
  const int dim = f.dim();
  const Eigen::MatrixXd analytic = detail::weak_rigidity_matrix(g, f.positions(), dim);
  const Eigen::MatrixXd numeric = central_difference_jacobian(
      [&](const Eigen::VectorXd& p) { return detail::weak_rigidity_function(g, p, dim); },
      f.positions(), o.fd_step);
  const double deviation = analytic.size() ? (analytic - numeric).cwiseAbs().maxCoeff() : 0.0;
  out << "max deviation: " << io::format_number(deviation) << " (fd step "
      << io::format_number(o.fd_step) << ")\n";
  return deviation < kGradientCheckLimit ? kExitOk : kExitError;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Weak rigidity analysis, formation simulation and graph growth", "weakrig"};
  app.require_subcommand(1);

  AnalyzeOptions analyze;
  auto* a = app.add_subcommand("analyze", "Rank test for (infinitesimal) weak rigidity");
  a->add_option("framework", analyze.framework, "Framework JSON file")->required();
  a->add_option("--tol", analyze.tol, "Relative singular-value tolerance")
      ->check(CLI::PositiveNumber);
  a->add_option("--dim-mode", analyze.dim_mode, "auto, 2d or 3d")
      ->check(CLI::IsMember({"auto", "2d", "3d"}));
  a->add_option("--format", analyze.format, "human or json")
      ->check(CLI::IsMember({"human", "json"}));
  a->add_option("--matrix-csv", analyze.matrix_csv, "Write the rigidity matrix as CSV");

  SimulateOptions simulate_opts;
  auto* s = app.add_subcommand("simulate", "Integrate the gradient formation controller");
  s->add_option("framework", simulate_opts.framework, "Initial framework JSON file")->required();
  s->add_option("--targets", simulate_opts.targets, "Target JSON file")->required();
  s->add_option("--dt", simulate_opts.cfg.dt, "RK4 step")->check(CLI::PositiveNumber);
  s->add_option("--t-max", simulate_opts.cfg.t_max, "Final time")
      ->check(CLI::NonNegativeNumber);
  s->add_option("--eps", simulate_opts.cfg.convergence_eps, "Convergence threshold")
      ->check(CLI::PositiveNumber);
  s->add_option("--out", simulate_opts.out, "Trace CSV file");

  GrowOptions grow;
  auto* g = app.add_subcommand("grow", "Grow a minimally weakly rigid framework");
  g->add_option("--n", grow.n, "Final vertex count")->required()->check(CLI::Range(3, 100000));
  g->add_option("--seed", grow.seed, "Random seed")->required();
  g->add_option("--mix", grow.mix, "Probability of a 0-extension")->check(CLI::Range(0.0, 1.0));
  g->add_option("--out", grow.out, "Framework JSON file (stdout if omitted)");
  g->add_option("--log", grow.log, "Replayable growth log");

  CheckGradientOptions check;
  auto* c = app.add_subcommand("check-gradient", "Compare the rigidity matrix with finite differences");
  c->add_option("framework", check.framework, "Framework JSON file")->required();
  c->add_option("--fd-step", check.fd_step, "Central-difference step")->check(CLI::PositiveNumber);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << "\n";
    return kExitError;
  }

  try {
    if (a->parsed()) return cmd_analyze(analyze, out);
    if (s->parsed()) return cmd_simulate(simulate_opts, out, err);
    if (g->parsed()) return cmd_grow(grow, out);
    if (c->parsed()) return cmd_check_gradient(check, out);
  } catch (const Error& e) {
    err << "error: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace weakrig
