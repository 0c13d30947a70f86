#include "weakrig/henneberg.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "weakrig/rigidity.hpp"

namespace weakrig {

namespace {

void require_vertex(const Framework& f, int v, const char* name) {
  if (v < 0 || v >= f.n()) {
    throw Error(ErrorKind::BadAnchor, std::string("anchor ") + name + " = " + std::to_string(v) +
                                          " is not a vertex");
  }
}

void require_placement(const Framework& f, int i, int j, const Eigen::Vector2d& pos) {
  const Eigen::Vector2d pi = f.point(i);
  const Eigen::Vector2d pj = f.point(j);
  const Eigen::Vector2d a = pj - pi;
  const Eigen::Vector2d b = pos - pi;
  const double tol = collocation_tolerance(f.positions());
  for (int v = 0; v < f.n(); ++v) {
    if ((f.point(v) - pos).norm() < tol) {
      throw Error(ErrorKind::CollocatedPoints,
                  "new vertex coincides with vertex " + std::to_string(v));
    }
  }
  const double cross = a.x() * b.y() - a.y() * b.x();
  if (std::abs(cross) <= 1e-9 * a.norm() * b.norm()) {
    throw Error(ErrorKind::CollinearPlacement, "new vertex is collinear with its anchors");
  }
}

Framework extend(const Framework& f, std::vector<Edge> edges, std::vector<AngleTriple> added,
                 const Eigen::Vector2d& pos) {
  if (f.dim() != 2) throw Error(ErrorKind::InvalidArgument, "extensions are planar");
  std::vector<AngleTriple> angles = f.graph().angles();
  angles.insert(angles.end(), added.begin(), added.end());
  Graph g = build_graph(f.n() + 1, edges, angles);
  Eigen::VectorXd p(f.positions().size() + 2);
  p << f.positions(), pos;
  return Framework(std::move(g), 2, std::move(p));
}

double angle_at(const Eigen::Vector2d& apex, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  const Eigen::Vector2d u = a - apex;
  const Eigen::Vector2d v = b - apex;
  return std::atan2(std::abs(u.x() * v.y() - u.y() * v.x()), u.dot(v));
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw Error(ErrorKind::ParseError, "bad number '" + std::string(text) + "'");
  }
  return v;
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    out.emplace_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

int parse_int(std::string_view text) {
  int v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw Error(ErrorKind::ParseError, "bad integer '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace

Framework weakly_rigid_0_extension(const Framework& f, int i, int j, const Eigen::Vector2d& pos) {
  require_vertex(f, i, "i");
  require_vertex(f, j, "j");
  if (i == j) throw Error(ErrorKind::BadAnchor, "0-extension anchors must differ");
  require_placement(f, i, j, pos);
  const int v = f.n();
  return extend(f, f.graph().edges(), {{i, j, v}, {j, i, v}}, pos);
}

Framework weakly_rigid_1_extension(const Framework& f, int i, int j, int k,
                                   const Eigen::Vector2d& pos) {
  require_vertex(f, i, "i");
  require_vertex(f, j, "j");
  require_vertex(f, k, "k");
  if (i == j || k == i || k == j) {
    throw Error(ErrorKind::BadAnchor, "1-extension anchors must be distinct");
  }
  if (!f.graph().has_edge({i, j})) {
    throw Error(ErrorKind::EdgeNotFound,
                "edge (" + std::to_string(i) + "," + std::to_string(j) + ") is not in the graph");
  }
  require_placement(f, i, j, pos);
  std::vector<Edge> edges = f.graph().edges();
  std::erase(edges, normalized(Edge{i, j}));
  const int v = f.n();
  return extend(f, std::move(edges), {{i, j, v}, {j, i, v}, {k, i, j}}, pos);
}

Framework apply_step(const Framework& f, const ExtensionStep& step) {
  if (step.kind == ExtensionKind::Zero) {
    return weakly_rigid_0_extension(f, step.i, step.j, step.new_position);
  }
  return weakly_rigid_1_extension(f, step.i, step.j, step.k, step.new_position);
}

Framework triangle_seed() {
  const Graph k3 = build_graph(3, {{0, 1}, {0, 2}, {1, 2}}, {});
  return Framework::planar(k3, {{-std::numbers::sqrt3, 0.0}, {0.0, 1.0}, {0.0, -1.0}});
}

GrowthResult grow_random(const Framework& seed, int steps, std::uint64_t rng_seed,
                         const GrowthOptions& options) {
  if (steps < 0) throw Error(ErrorKind::InvalidArgument, "steps must be >= 0");
  if (seed.dim() != 2) throw Error(ErrorKind::InvalidArgument, "growth is planar");
  if (!is_minimally_weakly_rigid(seed, options.rel_tol).minimal) {
    throw Error(ErrorKind::SeedNotRigid, "seed is not minimally (weakly) rigid");
  }

  std::mt19937_64 rng(rng_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double min_angle = options.min_angle_deg * std::numbers::pi / 180.0;

  GrowthResult result;
  result.frameworks.push_back(seed);

  for (int s = 0; s < steps; ++s) {
    const Framework& current = result.frameworks.back();
    const int n = current.n();
    const Graph& g = current.graph();

    Eigen::Vector2d lo = current.point(0);
    Eigen::Vector2d hi = lo;
    double diameter = 0.0;
    for (int a = 0; a < n; ++a) {
      lo = lo.cwiseMin(Eigen::Vector2d(current.point(a)));
      hi = hi.cwiseMax(Eigen::Vector2d(current.point(a)));
      for (int b = a + 1; b < n; ++b)
        diameter = std::max(diameter, (current.point(a) - current.point(b)).norm());
    }
    lo.array() -= 0.5 * diameter;
    hi.array() += 0.5 * diameter;

    bool accepted = false;
    for (int attempt = 0; attempt < options.max_attempts && !accepted; ++attempt) {
      ExtensionStep step;
      step.new_vertex = n;
      const bool zero = unit(rng) < options.mix || g.m() == 0;
      if (zero) {
        step.kind = ExtensionKind::Zero;
        step.i = std::uniform_int_distribution<int>(0, n - 1)(rng);
        step.j = std::uniform_int_distribution<int>(0, n - 2)(rng);
        if (step.j >= step.i) ++step.j;
      } else {
        step.kind = ExtensionKind::One;
        const Edge e = g.edges()[std::uniform_int_distribution<int>(0, g.m() - 1)(rng)];
        step.i = e.i;
        step.j = e.j;
        step.removed_edge = e;
        int k = std::uniform_int_distribution<int>(0, n - 3)(rng);
        for (int skip : {std::min(e.i, e.j), std::max(e.i, e.j)})
          if (k >= skip) ++k;
        step.k = k;
      }
      step.new_position = Eigen::Vector2d(lo.x() + unit(rng) * (hi.x() - lo.x()),
                                          lo.y() + unit(rng) * (hi.y() - lo.y()));

      bool separated = true;
      for (int v = 0; v < n && separated; ++v)
        separated = (current.point(v) - step.new_position).norm() > options.min_separation * diameter;
      if (!separated) continue;

      step.added_angles = {normalized(AngleTriple{step.i, step.j, n}),
                           normalized(AngleTriple{step.j, step.i, n})};
      if (step.kind == ExtensionKind::One)
        step.added_angles.push_back(normalized(AngleTriple{step.k, step.i, step.j}));
      bool well_shaped = true;
      for (const auto& t : step.added_angles) {
        if (t.apex != n && g.has_angle(t)) well_shaped = false;
        auto at = [&](int v) -> Eigen::Vector2d {
          return v == n ? step.new_position : Eigen::Vector2d(current.point(v));
        };
        const double theta = angle_at(at(t.apex), at(t.i), at(t.j));
        if (theta < min_angle || theta > std::numbers::pi - min_angle) well_shaped = false;
      }
      if (!well_shaped) continue;

      std::optional<Framework> next;
      try {
        next = apply_step(current, step);
      } catch (const Error&) {
        continue;
      }
      if (!is_minimally_weakly_rigid(*next, options.rel_tol).minimal) {
        ++result.minimality_rejections;
        continue;
      }
      result.steps.push_back(step);
      result.frameworks.push_back(std::move(*next));
      accepted = true;
    }
    if (!accepted) {
      throw Error(ErrorKind::PlacementExhausted,
                  "no admissible placement after " + std::to_string(options.max_attempts) +
                      " attempts at step " + std::to_string(s + 1));
    }
  }
  return result;
}

std::string format_growth_step(const ExtensionStep& step) {
  std::ostringstream out;
  out << (step.kind == ExtensionKind::Zero ? "0-extension" : "1-extension")
      << " vertex=" << step.new_vertex << " anchors=" << step.i << ',' << step.j;
  if (step.kind == ExtensionKind::One) out << ',' << step.k;
  out << " removed=";
  if (step.removed_edge) {
    out << step.removed_edge->i << ',' << step.removed_edge->j;
  } else {
    out << '-';
  }
  out << " pos=" << format_double(step.new_position.x()) << ','
      << format_double(step.new_position.y()) << " angles=";
  for (std::size_t a = 0; a < step.added_angles.size(); ++a) {
    const auto& t = step.added_angles[a];
    if (a) out << ';';
    out << t.apex << ':' << t.i << ',' << t.j;
  }
  return out.str();
}

ExtensionStep parse_growth_step(const std::string& line) {
  std::istringstream in(line);
  std::string token;
  ExtensionStep step;
  if (!(in >> token)) throw Error(ErrorKind::ParseError, "empty growth log line");
  if (token == "0-extension") {
    step.kind = ExtensionKind::Zero;
  } else if (token == "1-extension") {
    step.kind = ExtensionKind::One;
  } else {
    throw Error(ErrorKind::ParseError, "unknown step kind '" + token + "'");
  }
  while (in >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::ParseError, "expected key=value");
    const std::string key = token.substr(0, eq);
    const std::string value = token.substr(eq + 1);
    if (key == "vertex") {
      step.new_vertex = parse_int(value);
    } else if (key == "anchors") {
      const auto parts = split(value, ',');
      if (parts.size() != (step.kind == ExtensionKind::Zero ? 2U : 3U))
        throw Error(ErrorKind::ParseError, "wrong anchor count");
      step.i = parse_int(parts[0]);
      step.j = parse_int(parts[1]);
      if (parts.size() == 3) step.k = parse_int(parts[2]);
    } else if (key == "removed") {
      if (value != "-") {
        const auto parts = split(value, ',');
        if (parts.size() != 2) throw Error(ErrorKind::ParseError, "bad removed edge");
        step.removed_edge = Edge{parse_int(parts[0]), parse_int(parts[1])};
      }
    } else if (key == "pos") {
      const auto parts = split(value, ',');
      if (parts.size() != 2) throw Error(ErrorKind::ParseError, "bad position");
      step.new_position = {parse_double(parts[0]), parse_double(parts[1])};
    } else if (key == "angles") {
      for (const auto& item : split(value, ';')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw Error(ErrorKind::ParseError, "bad angle");
        const auto rest = split(item.substr(colon + 1), ',');
        if (rest.size() != 2) throw Error(ErrorKind::ParseError, "bad angle");
        step.added_angles.push_back(
            {parse_int(item.substr(0, colon)), parse_int(rest[0]), parse_int(rest[1])});
      }
    } else {
      throw Error(ErrorKind::ParseError, "unknown key '" + key + "'");
    }
  }
  return step;
}

std::vector<Framework> replay_growth_log(const Framework& seed,
                                         const std::vector<std::string>& lines) {
  std::vector<Framework> out{seed};
  for (const auto& line : lines) {
    if (line.empty()) continue;
    const ExtensionStep step = parse_growth_step(line);
    if (step.new_vertex != out.back().n()) {
      throw Error(ErrorKind::ParseError, "step adds vertex " + std::to_string(step.new_vertex) +
                                             " but the framework has " +
                                             std::to_string(out.back().n()));
    }
    Framework next = apply_step(out.back(), step);
    const auto& angles = next.graph().angles();
    const std::vector<AngleTriple> added(angles.end() - static_cast<long>(step.added_angles.size()),
                                         angles.end());
    std::vector<AngleTriple> expected;
    for (const auto& t : step.added_angles) expected.push_back(normalized(t));
    if (added != expected) throw Error(ErrorKind::ParseError, "logged angles do not match step");
    out.push_back(std::move(next));
  }
  return out;
}

}  // namespace weakrig
