#include "weakrig/kernels.hpp"

#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace weakrig {

namespace {

Eigen::VectorXd difference_column(const VectorMap& f, const Eigen::VectorXd& x, double h,
                                  Eigen::Index c) {
  Eigen::VectorXd plus = x;
  Eigen::VectorXd minus = x;
  plus(c) += h;
  minus(c) -= h;
  return (f(plus) - f(minus)) / (2.0 * h);
}

// Runs body(i) for i in [0, count) on OpenMP threads; the first exception
// (by index) is rethrown after the loop.
template <typename Body>
void parallel_for(long count, Body body) {
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < count; ++i) {
    try {
      body(i);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

namespace serial {

Eigen::MatrixXd central_difference_jacobian(const VectorMap& f, const Eigen::VectorXd& x,
                                            double h) {
  const Eigen::VectorXd f0 = f(x);
  Eigen::MatrixXd jac(f0.size(), x.size());
  for (Eigen::Index c = 0; c < x.size(); ++c) jac.col(c) = difference_column(f, x, h, c);
  return jac;
}

std::vector<RigidityReport> classify_batch(std::span<const Framework> frameworks,
                                           double rel_tol) {
  std::vector<RigidityReport> out;
  out.reserve(frameworks.size());
  for (const auto& f : frameworks) {
    out.push_back(f.dim() == 2 ? classify_infinitesimal_weak_rigidity(f, rel_tol)
                               : classify_weak_rigidity_3d(f, rel_tol));
  }
  return out;
}

std::vector<SimulationTrace> simulate_batch(std::span<const SimulationJob> jobs,
                                            const SimulationConfig& cfg) {
  std::vector<SimulationTrace> out;
  out.reserve(jobs.size());
  for (const auto& job : jobs) out.push_back(simulate(job.initial, job.targets, cfg));
  return out;
}

std::vector<GrowthResult> grow_batch(const Framework& seed, std::span<const GrowthJob> jobs) {
  std::vector<GrowthResult> out;
  out.reserve(jobs.size());
  for (const auto& job : jobs) {
    GrowthOptions options;
    options.mix = job.mix;
    out.push_back(grow_random(seed, job.steps, job.rng_seed, options));
  }
  return out;
}

}  // namespace serial

Eigen::MatrixXd central_difference_jacobian(const VectorMap& f, const Eigen::VectorXd& x,
                                            double h) {
  const Eigen::VectorXd f0 = f(x);
  Eigen::MatrixXd jac(f0.size(), x.size());
  parallel_for(static_cast<long>(x.size()),
               [&](long c) { jac.col(c) = difference_column(f, x, h, c); });
  return jac;
}

std::vector<RigidityReport> classify_batch(std::span<const Framework> frameworks,
                                           double rel_tol) {
  std::vector<RigidityReport> out(frameworks.size());
  parallel_for(static_cast<long>(frameworks.size()), [&](long i) {
    const Framework& f = frameworks[static_cast<std::size_t>(i)];
    out[static_cast<std::size_t>(i)] = f.dim() == 2
                                           ? classify_infinitesimal_weak_rigidity(f, rel_tol)
                                           : classify_weak_rigidity_3d(f, rel_tol);
  });
  return out;
}

std::vector<SimulationTrace> simulate_batch(std::span<const SimulationJob> jobs,
                                            const SimulationConfig& cfg) {
  std::vector<SimulationTrace> out(jobs.size());
  parallel_for(static_cast<long>(jobs.size()), [&](long i) {
    const auto& job = jobs[static_cast<std::size_t>(i)];
    out[static_cast<std::size_t>(i)] = simulate(job.initial, job.targets, cfg);
  });
  return out;
}

std::vector<GrowthResult> grow_batch(const Framework& seed, std::span<const GrowthJob> jobs) {
  std::vector<std::optional<GrowthResult>> slots(jobs.size());
  parallel_for(static_cast<long>(jobs.size()), [&](long i) {
    const auto& job = jobs[static_cast<std::size_t>(i)];
    GrowthOptions options;
    options.mix = job.mix;
    slots[static_cast<std::size_t>(i)] = grow_random(seed, job.steps, job.rng_seed, options);
  });
  std::vector<GrowthResult> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

int kernel_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace weakrig
