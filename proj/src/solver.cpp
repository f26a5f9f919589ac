#include "gausskraft/solver.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <iostream>
#include <limits>
#include <numeric>

namespace gausskraft {

namespace {

struct Iterate {
  std::vector<double> x;
  EvalReport ev;
  std::vector<double> pg;  // gradient projected onto the gauge hyperplane
  double residual = 0.0;
};

double dotv(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double inf_norm(const std::vector<double>& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

/// Removes the component along μ so that steps keep Σ μ_i ρ̂_i fixed.
std::vector<double> project_tangent(const std::vector<double>& v, const std::vector<double>& mu,
                                    double mu_sq) {
  const double c = dotv(v, mu) / mu_sq;
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] - c * mu[i];
  return out;
}

bool recoverable(ErrorCode code) {
  switch (code) {
    case ErrorCode::OriginNotInterior:
    case ErrorCode::HullDegenerate:
    case ErrorCode::NonPositiveDot:
    case ErrorCode::DegeneratePolygon:
    case ErrorCode::ToleranceNotReached:
      return true;
    default:
      return false;
  }
}

std::optional<Iterate> evaluate_at(const ProblemInstance& inst, std::vector<double> x,
                                   double quad_tol, double mu_sq) {
  try {
    const RadialPolytope P = RadialPolytope::build(inst, x);
    if (!P.origin_interior()) return std::nullopt;
    Iterate it;
    it.ev = eval(P, quad_tol);
    it.x = std::move(x);
    it.pg = project_tangent(it.ev.gradient, inst.mu(), mu_sq);
    it.residual = inf_norm(it.ev.gradient) / sphere_measure(inst.dimension());
    return it;
  } catch (const Error& e) {
    if (recoverable(e.code())) return std::nullopt;
    throw;
  }
}

struct Pair {
  std::vector<double> s;
  std::vector<double> y;
  double rho;
};

std::vector<double> two_loop(const std::deque<Pair>& mem, const std::vector<double>& g) {
  std::vector<double> q = g;
  std::vector<double> alpha(mem.size());
  for (std::size_t k = mem.size(); k-- > 0;) {
    alpha[k] = mem[k].rho * dotv(mem[k].s, q);
    for (std::size_t i = 0; i < q.size(); ++i) q[i] -= alpha[k] * mem[k].y[i];
  }
  const Pair& last = mem.back();
  const double gamma = dotv(last.s, last.y) / dotv(last.y, last.y);
  for (double& v : q) v *= gamma;
  for (std::size_t k = 0; k < mem.size(); ++k) {
    const double beta = mem[k].rho * dotv(mem[k].y, q);
    for (std::size_t i = 0; i < q.size(); ++i) q[i] += (alpha[k] - beta) * mem[k].s[i];
  }
  for (double& v : q) v = -v;
  return q;
}

}  // namespace

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Converged: return "Converged";
    case SolveStatus::Degenerated: return "Degenerated";
    case SolveStatus::MaxIters: return "MaxIters";
  }
  return "Unknown";
}

std::string_view to_string(StepPolicy policy) {
  return policy == StepPolicy::LBFGS ? "LBFGS" : "GradientArmijo";
}

std::optional<DegenerationWitness> detect_degeneration(std::span<const TraceEntry> trace,
                                                       std::span<const double> log_radii,
                                                       double threshold) {
  if (trace.size() < 2 || log_radii.size() < 2) return std::nullopt;
  if (!(trace.back().Q < trace[trace.size() - 2].Q)) return std::nullopt;
  std::vector<std::size_t> order(log_radii.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return log_radii[a] < log_radii[b]; });
  const double spread = log_radii[order.back()] - log_radii[order.front()];
  if (!(spread > threshold)) return std::nullopt;
  std::size_t cut = 1;
  double widest = -1.0;
  for (std::size_t k = 1; k < order.size(); ++k) {
    const double gap = log_radii[order[k]] - log_radii[order[k - 1]];
    if (gap > widest) {
      widest = gap;
      cut = k;
    }
  }
  DegenerationWitness w;
  w.collapsing.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(cut));
  w.bounded.assign(order.begin() + static_cast<std::ptrdiff_t>(cut), order.end());
  std::sort(w.collapsing.begin(), w.collapsing.end());
  std::sort(w.bounded.begin(), w.bounded.end());
  return w;
}

SolveReport solve(const ProblemInstance& instance, const SolveConfig& config,
                  std::optional<std::vector<double>> initial) {
  if (config.max_iters < 1 || !(config.mass_tol > 0.0) || !(config.quad_tol > 0.0)) {
    throw Error(ErrorCode::InvalidInput, "solver tolerances must be positive and max_iters >= 1");
  }
  const std::size_t K = instance.size();
  if (!config.skip_validation) {
    AdmissibilityReport rep = check_admissibility(instance, config.cone_max_K);
    if (!rep.ok()) {
      const std::string why = describe_failure(rep);
      throw InvalidInstance(std::move(rep), why);
    }
  }
  std::vector<double> x0 = initial.value_or(std::vector<double>(K, 0.0));
  if (x0.size() != K) throw Error(ErrorCode::InvalidInput, "initial point has the wrong length");
  const double mu_sq = dotv(instance.mu(), instance.mu());
  if (!(mu_sq > 0.0)) throw Error(ErrorCode::InvalidInput, "all masses are zero");

  std::optional<Iterate> start = evaluate_at(instance, gauge_project(instance, x0),
                                             config.quad_tol, mu_sq);
  if (!start) {
    throw Error(ErrorCode::OriginNotInterior, "the initial polytope does not contain the origin");
  }
  Iterate cur = std::move(*start);

  SolveReport report;
  report.trace.push_back({cur.ev.Q, cur.residual, 0.0});
  std::deque<Pair> mem;
  double last_t = 1.0;
  int iter = 0;
  bool stalled = false;

  while (iter < config.max_iters) {
    if (cur.residual <= config.mass_tol) {
      report.status = SolveStatus::Converged;
      break;
    }
    const bool use_memory = config.policy == StepPolicy::LBFGS && !mem.empty();
    std::vector<double> d;
    if (use_memory) {
      d = project_tangent(two_loop(mem, cur.pg), instance.mu(), mu_sq);
    } else {
      d = cur.pg;
      for (double& v : d) v = -v;
    }
    double gd = dotv(cur.ev.gradient, d);
    if (!(gd < 0.0)) {
      mem.clear();
      d = cur.pg;
      for (double& v : d) v = -v;
      gd = dotv(cur.ev.gradient, d);
      if (!(gd < 0.0)) {
        stalled = true;
        break;
      }
    }
    const double dn = inf_norm(d);
    double t = use_memory ? 1.0 : std::min(1.0, 2.0 * last_t);
    if (t * dn > config.max_step) t = config.max_step / dn;

    std::optional<Iterate> next;
    for (int trial = 0; trial < 60; ++trial) {
      std::vector<double> xt = cur.x;
      for (std::size_t i = 0; i < K; ++i) xt[i] += t * d[i];
      std::optional<Iterate> cand = evaluate_at(instance, std::move(xt), config.quad_tol, mu_sq);
      if (!cand) {
        t *= 0.5;
        continue;
      }
      const double gtd = dotv(cand->ev.gradient, d);
      const bool armijo = cand->ev.Q <= cur.ev.Q + 1e-4 * t * gd;
      // Q is convex along the ray, so a nonpositive slope at the trial point
      // means Q decreased all the way there even if quadrature noise hides it.
      if (armijo || gtd <= 0.0) {
        next = std::move(cand);
        break;
      }
      const double secant = t * (-gd) / (gtd - gd);
      t = std::clamp(secant, 0.1 * t, 0.5 * t);
    }
    if (!next) {
      if (!mem.empty()) {
        mem.clear();
        continue;
      }
      stalled = true;
      break;
    }
    ++iter;
    last_t = t;

    Pair p;
    p.s.resize(K);
    p.y.resize(K);
    for (std::size_t i = 0; i < K; ++i) {
      p.s[i] = next->x[i] - cur.x[i];
      p.y[i] = next->pg[i] - cur.pg[i];
    }
    const double sy = dotv(p.s, p.y);
    if (sy > 1e-12 * std::sqrt(dotv(p.s, p.s) * dotv(p.y, p.y)) && sy > 0.0) {
      p.rho = 1.0 / sy;
      mem.push_back(std::move(p));
      if (static_cast<int>(mem.size()) > config.lbfgs_memory) mem.pop_front();
    }

    report.trace.push_back({next->ev.Q, next->residual, t * dn});
    cur = std::move(*next);
    // Keep the gauge exact against rounding drift.
    cur.x = gauge_project(instance, cur.x);

    if (auto w = detect_degeneration(report.trace, cur.x, config.degeneration_threshold)) {
      report.status = SolveStatus::Degenerated;
      report.witness = std::move(w->bounded);
      report.collapsing = std::move(w->collapsing);
      break;
    }
  }
  if (report.status != SolveStatus::Degenerated && cur.residual <= config.mass_tol) {
    report.status = SolveStatus::Converged;
  }
  if (stalled && report.status == SolveStatus::MaxIters) {
    std::cerr << "gausskraft: line search stalled at residual " << cur.residual << " after "
              << iter << " iterations\n";
  }

  report.log_radii = cur.x;
  report.Q_star = cur.ev.Q;
  report.residual = cur.residual;
  report.iterations = iter;
  report.cell_areas = cur.ev.cell_areas;
  report.log_dot_integrals = cur.ev.log_dot_integrals;
  return report;
}

std::vector<LevelResult> solve_refined(const DensitySpec& density, int levels,
                                       const SolveConfig& config) {
  if (levels < 1) throw Error(ErrorCode::InvalidInput, "levels must be at least 1");
  std::vector<LevelResult> out;
  for (int level = 0; level < levels; ++level) {
    LevelResult r;
    r.level = level;
    r.instance = discretize(density, level);
    r.report = solve(r.instance, config);
    r.polytope = RadialPolytope::build(r.instance, r.report.log_radii);

    double outer = 0.0;
    for (const UnitVec& x : r.instance.directions()) {
      outer = std::max(outer, r.polytope.radial_function(x));
    }
    double inner = std::numeric_limits<double>::infinity();
    for (const Facet& f : r.polytope.facets()) {
      inner = std::min(inner, r.polytope.radial_function(f.normal));
    }
    r.sphere_deviation = outer / inner - 1.0;

    if (!out.empty()) {
      const LevelResult& prev = out.back();
      r.q_change = std::abs(r.report.Q_star - prev.report.Q_star);
      std::vector<double> diff;
      for (const UnitVec& x : r.instance.directions()) {
        diff.push_back(std::log(r.polytope.radial_function(x)) -
                       std::log(prev.polytope.radial_function(x)));
      }
      const double mean = std::accumulate(diff.begin(), diff.end(), 0.0) /
                          static_cast<double>(diff.size());
      double worst = 0.0;
      for (double v : diff) worst = std::max(worst, std::abs(v - mean));
      r.radial_change = worst;
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace gausskraft
