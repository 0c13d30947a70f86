#include "weakrig/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace weakrig::io {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(ErrorKind kind, std::string_view source, int line, const std::string& what,
                       ErrorLocation location = {}) {
  std::string msg(source);
  if (line > 0) msg += ":" + std::to_string(line);
  msg += ": " + what;
  throw Error(kind, msg, std::move(location));
}

int line_of_byte(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  int line = 1;
  for (std::size_t k = 0; k < byte; ++k)
    if (text[k] == '\n') ++line;
  return line;
}

json parse_json(std::string_view text, std::string_view source) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // nlohmann reports the byte just past the offending token.
    const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
    fail(ErrorKind::ParseError, source, line_of_byte(text, byte), e.what());
  }
}

struct Reader {
  std::string_view text;
  std::string_view source;

  [[noreturn]] void error(std::string_view section, int index, const std::string& what,
                          ErrorKind kind = ErrorKind::ParseError) const {
    const std::string where =
        index >= 0 ? std::string(section) + "[" + std::to_string(index) + "]" : std::string(section);
    fail(kind, source, locate_line(text, section, index), where + ": " + what,
         ErrorLocation{std::string(section), index});
  }

  const json& array_of(const json& root, std::string_view key, bool required) const {
    static const json empty = json::array();
    const auto it = root.find(std::string(key));
    if (it == root.end()) {
      if (required) fail(ErrorKind::ParseError, source, 1, "missing key \"" + std::string(key) + "\"");
      return empty;
    }
    if (!it->is_array()) error(key, -1, "expected an array");
    return *it;
  }

  std::vector<int> ints(const json& item, std::string_view section, int index,
                        std::size_t count) const {
    if (!item.is_array() || item.size() != count) {
      error(section, index, "expected " + std::to_string(count) + " vertex indices");
    }
    std::vector<int> out;
    for (const auto& v : item) {
      if (!v.is_number_integer()) error(section, index, "vertex index must be an integer");
      out.push_back(v.get<int>());
    }
    return out;
  }

  double number(const json& v, std::string_view section, int index) const {
    if (!v.is_number()) error(section, index, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) error(section, index, "non-finite number");
    return d;
  }
};

std::string join_numbers(const Eigen::VectorXd& v) {
  std::string out;
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (k) out += ", ";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v(k));
    out.append(buf, res.ptr);
  }
  return out;
}

}  // namespace

int locate_line(std::string_view text, std::string_view section, int index) {
  int line = 1;
  int depth = 0;
  bool armed = false;
  bool in_array = false;
  bool expecting = false;
  int element = 0;
  for (std::size_t k = 0; k < text.size(); ++k) {
    const char ch = text[k];
    if (ch == '"') {
      const std::size_t start = k + 1;
      std::size_t end = start;
      while (end < text.size() && text[end] != '"') end += text[end] == '\\' ? 2 : 1;
      if (in_array && depth == 2 && expecting) {
        if (element == index) return line;
        expecting = false;
        ++element;
      }
      if (depth == 1 && !in_array) {
        std::size_t after = end + 1;
        while (after < text.size() && std::isspace(static_cast<unsigned char>(text[after]))) ++after;
        if (after < text.size() && text[after] == ':' &&
            text.substr(start, std::min(end, text.size()) - start) == section) {
          if (index < 0) return line;
          armed = true;
        }
      }
      k = end;
      continue;
    }
    if (ch == '\n') {
      ++line;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(ch))) continue;
    if (in_array && depth == 2 && expecting && ch != ']' && ch != ',') {
      if (element == index) return line;
      expecting = false;
      ++element;
    }
    if (ch == '[' || ch == '{') {
      ++depth;
      if (armed && depth == 2 && ch == '[') {
        in_array = true;
        expecting = true;
        armed = false;
      }
    } else if (ch == ']' || ch == '}') {
      --depth;
      if (in_array && depth == 1) in_array = false;
    } else if (ch == ',' && in_array && depth == 2) {
      expecting = true;
    }
  }
  return 0;
}

Framework parse_framework(std::string_view text, std::string_view source) {
  const json root = parse_json(text, source);
  const Reader r{text, source};
  if (!root.is_object()) fail(ErrorKind::ParseError, source, 1, "expected a JSON object");
  for (const auto& [key, value] : root.items()) {
    if (key != "dim" && key != "positions" && key != "edges" && key != "angles") {
      r.error(key, -1, "unknown key");
    }
  }
  const auto dim_it = root.find("dim");
  if (dim_it == root.end()) fail(ErrorKind::ParseError, source, 1, "missing key \"dim\"");
  if (!dim_it->is_number_integer() || (dim_it->get<int>() != 2 && dim_it->get<int>() != 3)) {
    r.error("dim", -1, "must be 2 or 3");
  }
  const int dim = dim_it->get<int>();

  const json& positions = r.array_of(root, "positions", true);
  const int n = static_cast<int>(positions.size());
  Eigen::VectorXd p(dim * n);
  for (int v = 0; v < n; ++v) {
    const json& item = positions[v];
    if (!item.is_array() || static_cast<int>(item.size()) != dim) {
      r.error("positions", v, "expected " + std::to_string(dim) + " coordinates");
    }
    for (int c = 0; c < dim; ++c) p(dim * v + c) = r.number(item[c], "positions", v);
  }

  std::vector<Edge> edges;
  const json& edge_items = r.array_of(root, "edges", false);
  for (int u = 0; u < static_cast<int>(edge_items.size()); ++u) {
    const auto v = r.ints(edge_items[u], "edges", u, 2);
    edges.push_back({v[0], v[1]});
  }
  std::vector<AngleTriple> angles;
  const json& angle_items = r.array_of(root, "angles", false);
  for (int h = 0; h < static_cast<int>(angle_items.size()); ++h) {
    const auto v = r.ints(angle_items[h], "angles", h, 3);
    angles.push_back({v[0], v[1], v[2]});
  }

  try {
    return Framework(build_graph(n, edges, angles), dim, std::move(p));
  } catch (const Error& e) {
    if (!e.location().section.empty()) {
      r.error(e.location().section, e.location().index,
              std::string(to_string(e.kind())) + ": " + e.what());
    }
    fail(ErrorKind::ParseError, source, 0, std::string(to_string(e.kind())) + ": " + e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ParseError, path.string() + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Framework read_framework(const std::filesystem::path& path) {
  return parse_framework(read_file(path), path.string());
}

std::string framework_to_json(const Framework& f) {
  std::string out = "{\n  \"dim\": " + std::to_string(f.dim()) + ",\n  \"positions\": [";
  for (int v = 0; v < f.n(); ++v) {
    out += v ? ",\n    [" : "\n    [";
    out += join_numbers(f.point(v)) + "]";
  }
  out += f.n() ? "\n  ],\n  \"edges\": [" : "],\n  \"edges\": [";
  const auto& edges = f.graph().edges();
  for (std::size_t u = 0; u < edges.size(); ++u) {
    out += u ? ", " : "";
    out += "[" + std::to_string(edges[u].i) + ", " + std::to_string(edges[u].j) + "]";
  }
  out += "],\n  \"angles\": [";
  const auto& angles = f.graph().angles();
  for (std::size_t h = 0; h < angles.size(); ++h) {
    out += h ? ", " : "";
    out += "[" + std::to_string(angles[h].apex) + ", " + std::to_string(angles[h].i) + ", " +
           std::to_string(angles[h].j) + "]";
  }
  out += "]\n}\n";
  return out;
}

TargetSpec parse_targets(std::string_view text, const Graph& g, std::string_view source) {
  const json root = parse_json(text, source);
  const Reader r{text, source};
  if (!root.is_object()) fail(ErrorKind::ParseError, source, 1, "expected a JSON object");
  for (const auto& [key, value] : root.items()) {
    if (key != "sq_distances" && key != "cosines" && key != "cosines_deg") {
      r.error(key, -1, "unknown key");
    }
  }

  std::map<Edge, double> distances;
  const json& d_items = r.array_of(root, "sq_distances", false);
  for (int u = 0; u < static_cast<int>(d_items.size()); ++u) {
    const json& item = d_items[u];
    if (!item.is_array() || item.size() != 3) r.error("sq_distances", u, "expected [i, j, value]");
    const auto v = r.ints(json::array({item[0], item[1]}), "sq_distances", u, 2);
    const double value = r.number(item[2], "sq_distances", u);
    if (value < 0.0) r.error("sq_distances", u, "squared distance must be >= 0");
    if (!distances.emplace(normalized(Edge{v[0], v[1]}), value).second) {
      r.error("sq_distances", u, "duplicate target", ErrorKind::TargetMismatch);
    }
  }

  std::map<AngleTriple, double> cosines;
  for (const char* key : {"cosines", "cosines_deg"}) {
    const bool degrees = std::string_view(key) == "cosines_deg";
    const json& items = r.array_of(root, key, false);
    for (int h = 0; h < static_cast<int>(items.size()); ++h) {
      const json& item = items[h];
      if (!item.is_array() || item.size() != 4) r.error(key, h, "expected [k, i, j, value]");
      const auto v = r.ints(json::array({item[0], item[1], item[2]}), key, h, 3);
      double value = r.number(item[3], key, h);
      if (degrees) value = std::cos(value * std::numbers::pi / 180.0);
      if (value < -1.0 || value > 1.0) r.error(key, h, "cosine outside [-1, 1]");
      if (!cosines.emplace(normalized(AngleTriple{v[0], v[1], v[2]}), value).second) {
        r.error(key, h, "duplicate target", ErrorKind::TargetMismatch);
      }
    }
  }

  TargetSpec t;
  for (const auto& e : g.edges()) {
    const auto it = distances.find(e);
    if (it == distances.end()) fail(ErrorKind::TargetMismatch, source, 0, "no target for " + describe(e));
    t.sq_distances.emplace_back(e, it->second);
    distances.erase(it);
  }
  for (const auto& a : g.angles()) {
    const auto it = cosines.find(a);
    if (it == cosines.end()) fail(ErrorKind::TargetMismatch, source, 0, "no target for " + describe(a));
    t.cosines.emplace_back(a, it->second);
    cosines.erase(it);
  }
  if (!distances.empty()) {
    fail(ErrorKind::TargetMismatch, source, 0, "target for " + describe(distances.begin()->first) + " which is not an edge");
  }
  if (!cosines.empty()) {
    fail(ErrorKind::TargetMismatch, source, 0, "target for " + describe(cosines.begin()->first) + " which is not an angle");
  }
  return t;
}

TargetSpec read_targets(const std::filesystem::path& path, const Graph& g) {
  return parse_targets(read_file(path), g, path.string());
}

std::string report_to_json(const RigidityReport& report) {
  ordered_json j;
  j["dimension"] = report.dimension;
  j["rank"] = report.rank;
  j["required_rank"] = report.required_rank;
  j["verdict"] = report.rigid() ? "rigid" : "not-rigid";
  j["null_space_dim"] = report.null_space_dim;
  j["trivial_motion_residual"] = report.trivial_motion_residual;
  j["tolerance_used"] = report.tolerance_used;
  j["note"] = report.note;
  return j.dump(2) + "\n";
}

RigidityReport report_from_json(std::string_view text) {
  const ordered_json j = [&] {
    try {
      return ordered_json::parse(text.begin(), text.end());
    } catch (const ordered_json::exception& e) {
      throw Error(ErrorKind::ParseError, std::string("report: ") + e.what());
    }
  }();
  try {
    RigidityReport r;
    r.dimension = j.at("dimension").get<int>();
    r.rank = j.at("rank").get<int>();
    r.required_rank = j.at("required_rank").get<int>();
    const auto verdict = j.at("verdict").get<std::string>();
    if (verdict != "rigid" && verdict != "not-rigid") {
      throw Error(ErrorKind::ParseError, "report: unknown verdict '" + verdict + "'");
    }
    r.verdict = verdict == "rigid" ? Verdict::Rigid : Verdict::NotRigid;
    r.null_space_dim = j.at("null_space_dim").get<int>();
    r.trivial_motion_residual = j.at("trivial_motion_residual").get<double>();
    r.tolerance_used = j.at("tolerance_used").get<double>();
    r.note = j.at("note").get<std::string>();
    return r;
  } catch (const ordered_json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("report: ") + e.what());
  }
}

std::string format_number(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_trace_csv(std::ostream& out, const SimulationTrace& trace, const Graph& g) {
  const bool three_agent = is_three_agent_topology(g);
  std::vector<int> error_order(g.m() + g.q());
  for (int k = 0; k < static_cast<int>(error_order.size()); ++k) error_order[k] = k;

  out << "time";
  for (int v = 1; v <= g.n(); ++v) out << ",x" << v << ",y" << v;
  if (three_agent) {
    out << ",e12,e13,ecos";
    if (g.edges()[0] != Edge{0, 1}) error_order = {1, 0, 2};
  } else {
    for (const auto& e : g.edges()) out << ",e_" << e.i + 1 << "_" << e.j + 1;
    for (const auto& a : g.angles()) out << ",ecos_" << a.apex + 1 << "_" << a.i + 1 << "_" << a.j + 1;
  }
  out << ",V";
  if (three_agent) out << ",detZ";
  out << '\n';

  for (std::size_t s = 0; s < trace.size(); ++s) {
    out << format_number(trace.times[s]);
    for (Eigen::Index c = 0; c < trace.positions[s].size(); ++c)
      out << ',' << format_number(trace.positions[s](c));
    for (int k : error_order) out << ',' << format_number(trace.errors[s](k));
    out << ',' << format_number(trace.lyapunov[s]);
    if (three_agent) out << ',' << format_number(trace.det_z[s]);
    out << '\n';
  }
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out << ',';
      out << format_number(m(r, c));
    }
    out << '\n';
  }
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::InvalidArgument, path.string() + ": cannot write file");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorKind::InvalidArgument, path.string() + ": write failed");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace weakrig::io
