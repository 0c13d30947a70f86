#pragma once

// Data-parallel kernels. Each has a serial reference in weakrig::serial with
// identical semantics; the parallel versions split independent work items
// (Jacobian columns, frameworks, trajectories, growth seeds) across OpenMP
// threads and must return bit-identical results.

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "weakrig/formation.hpp"
#include "weakrig/henneberg.hpp"
#include "weakrig/rigidity.hpp"

namespace weakrig {

using VectorMap = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct SimulationJob {
  Framework initial;
  TargetSpec targets;
};

struct GrowthJob {
  int steps = 0;
  std::uint64_t rng_seed = 0;
  double mix = 0.5;
};

namespace serial {

/// Column c = (f(x + h e_c) - f(x - h e_c)) / 2h.
Eigen::MatrixXd central_difference_jacobian(const VectorMap& f, const Eigen::VectorXd& x,
                                            double h);

std::vector<RigidityReport> classify_batch(std::span<const Framework> frameworks,
                                           double rel_tol = kDefaultRankTolerance);

std::vector<SimulationTrace> simulate_batch(std::span<const SimulationJob> jobs,
                                            const SimulationConfig& cfg);

std::vector<GrowthResult> grow_batch(const Framework& seed, std::span<const GrowthJob> jobs);

}  // namespace serial

Eigen::MatrixXd central_difference_jacobian(const VectorMap& f, const Eigen::VectorXd& x, double h);

std::vector<RigidityReport> classify_batch(std::span<const Framework> frameworks,
                                           double rel_tol = kDefaultRankTolerance);

std::vector<SimulationTrace> simulate_batch(std::span<const SimulationJob> jobs,
                                            const SimulationConfig& cfg);

std::vector<GrowthResult> grow_batch(const Framework& seed, std::span<const GrowthJob> jobs);

/// Threads the parallel kernels will use (1 without OpenMP).
int kernel_threads();

}  // namespace weakrig
