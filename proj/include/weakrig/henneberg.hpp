#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "weakrig/core.hpp"

namespace weakrig {

enum class ExtensionKind { Zero, One };

/// One modified-Henneberg step. For a 0-extension anchors = (i, j) and the
/// added angles are (i; j, v) and (j; i, v). A 1-extension additionally uses
/// anchor k, removes edge (i, j) and adds (k; i, j).
struct ExtensionStep {
  ExtensionKind kind = ExtensionKind::Zero;
  int new_vertex = 0;
  int i = 0;
  int j = 0;
  int k = -1;
  std::optional<Edge> removed_edge;
  std::vector<AngleTriple> added_angles;
  Eigen::Vector2d new_position = Eigen::Vector2d::Zero();
};

/// Throws Error{BadAnchor | CollinearPlacement | CollocatedPoints}.
Framework weakly_rigid_0_extension(const Framework& f, int i, int j, const Eigen::Vector2d& pos);

/// Throws Error{BadAnchor | EdgeNotFound | CollinearPlacement | CollocatedPoints}.
Framework weakly_rigid_1_extension(const Framework& f, int i, int j, int k,
                                   const Eigen::Vector2d& pos);

/// Applies a recorded step (dispatching on its kind).
Framework apply_step(const Framework& f, const ExtensionStep& step);

struct GrowthOptions {
  /// Probability of choosing a 0-extension.
  double mix = 0.5;
  /// Placement is resampled until every new angle is within
  /// [min_angle, pi - min_angle] and the new point is at least
  /// min_separation · diameter away from every vertex.
  double min_angle_deg = 5.0;
  double min_separation = 0.1;
  int max_attempts = 1000;
  double rel_tol = 1e-9;
};

struct GrowthResult {
  /// frameworks[0] is the seed; frameworks[s + 1] follows steps[s].
  std::vector<Framework> frameworks;
  std::vector<ExtensionStep> steps;
  /// Candidates rejected only because the rank-based minimality check failed.
  int minimality_rejections = 0;
};

/// Grows `steps` extensions from a minimally (weakly) rigid seed.
/// Deterministic for a given rng_seed. Every intermediate framework is
/// verified with is_minimally_weakly_rigid before it is accepted.
/// Throws Error{SeedNotRigid | PlacementExhausted}.
GrowthResult grow_random(const Framework& seed, int steps, std::uint64_t rng_seed,
                         const GrowthOptions& options = {});

/// Equilateral K3 with unit-ish side, the default seed.
Framework triangle_seed();

/// One line per step; replay_growth_log rebuilds the sequence from a seed.
std::string format_growth_step(const ExtensionStep& step);
ExtensionStep parse_growth_step(const std::string& line);
std::vector<Framework> replay_growth_log(const Framework& seed,
                                         const std::vector<std::string>& lines);

}  // namespace weakrig
