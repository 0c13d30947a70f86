#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "weakrig/core.hpp"
#include "weakrig/formation.hpp"
#include "weakrig/rigidity.hpp"

namespace weakrig::io {

/// { "dim": 2|3, "positions": [[x,y(,z)],...], "edges": [[i,j],...], "angles": [[k,i,j],...] }
/// Any violation is reported as Error{ParseError} with "source:line: message".
Framework parse_framework(std::string_view text, std::string_view source = "<input>");
Framework read_framework(const std::filesystem::path& path);
std::string framework_to_json(const Framework& f);

/// { "sq_distances": [[i,j,v],...], "cosines": [[k,i,j,v],...], "cosines_deg": [[k,i,j,deg],...] }
/// Entries are matched to the graph's constraints by key and returned in graph
/// order. Missing or extra entries raise Error{TargetMismatch}.
TargetSpec parse_targets(std::string_view text, const Graph& g, std::string_view source = "<input>");
TargetSpec read_targets(const std::filesystem::path& path, const Graph& g);

std::string report_to_json(const RigidityReport& report);
RigidityReport report_from_json(std::string_view text);

/// 17 significant digits, locale independent.
std::string format_number(double v);

/// time, x/y per agent, one error column per constraint, V, detZ. For the
/// three-agent topology the header is exactly
/// time,x1,y1,x2,y2,x3,y3,e12,e13,ecos,V,detZ.
void write_trace_csv(std::ostream& out, const SimulationTrace& trace, const Graph& g);

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m);

/// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

/// 1-based line of element `index` of the top-level array `section`
/// (or of the key itself when index < 0); 0 when it cannot be found.
int locate_line(std::string_view text, std::string_view section, int index);

}  // namespace weakrig::io
