#include "gausskraft/functional.hpp"

#include "gausskraft/parallel.hpp"

namespace gausskraft {

EvalReport eval(const RadialPolytope& polytope, double quad_tol) {
  const ProblemInstance& inst = polytope.instance();
  const auto& cells = polytope.normal_cells();
  const std::size_t K = polytope.size();
  EvalReport r;
  r.cell_areas.assign(K, 0.0);
  r.log_dot_integrals.assign(K, 0.0);
  r.gradient.assign(K, 0.0);
  parallel_for(K, [&](std::size_t i) {
    if (cells[i].empty()) return;
    r.cell_areas[i] = cells[i].area;
    r.log_dot_integrals[i] = integrate_log_dot(inst.direction(i), cells[i].polygon, quad_tol);
  });
  double linear = 0.0;
  double logs = 0.0;
  for (std::size_t i = 0; i < K; ++i) {
    r.gradient[i] = r.cell_areas[i] - inst.mu(i);
    linear += polytope.log_radii()[i] * r.gradient[i];
    logs += r.log_dot_integrals[i];
  }
  r.Q = linear + logs;
  return r;
}

EvalReport eval(const ProblemInstance& instance, std::span<const double> log_radii,
                double quad_tol) {
  return eval(RadialPolytope::build(instance, {log_radii.begin(), log_radii.end()}), quad_tol);
}

std::vector<double> gradient(const ProblemInstance& instance, std::span<const double> log_radii) {
  const RadialPolytope P = RadialPolytope::build(instance, {log_radii.begin(), log_radii.end()});
  const auto& cells = P.normal_cells();
  std::vector<double> g(P.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = cells[i].area - instance.mu(i);
  return g;
}

std::vector<double> gauge_project(const ProblemInstance& instance,
                                  std::span<const double> log_radii) {
  if (log_radii.size() != instance.size()) {
    throw Error(ErrorCode::InvalidInput, "log_radii length does not match the instance");
  }
  double weighted = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < log_radii.size(); ++i) {
    weighted += instance.mu(i) * log_radii[i];
    total += instance.mu(i);
  }
  if (!(total > 0.0)) throw Error(ErrorCode::InvalidInput, "total mass must be positive");
  const double shift = weighted / total;
  std::vector<double> out(log_radii.begin(), log_radii.end());
  for (double& v : out) v -= shift;
  return out;
}

}  // namespace gausskraft
