#include "gausskraft/transport.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

#include "gausskraft/functional.hpp"

namespace gausskraft {

namespace {

struct Arc {
  std::size_t tail;
  std::size_t head;
  double cost;
};

Vec3 rotate(const std::array<Vec3, 3>& rows, const Vec3& v) {
  return {dot(rows[0], v), dot(rows[1], v), dot(rows[2], v)};
}

}  // namespace

TransportPlan plan_from_polytope(const RadialPolytope& polytope, double quad_tol) {
  const EvalReport ev = eval(polytope, quad_tol);
  TransportPlan plan;
  plan.sources = polytope.instance().directions();
  plan.mu = polytope.instance().mu();
  plan.cells = polytope.normal_cells();
  plan.cost_terms = ev.log_dot_integrals;
  plan.total_cost = std::accumulate(plan.cost_terms.begin(), plan.cost_terms.end(), 0.0);
  return plan;
}

double duality_gap(const ProblemInstance& instance, const RadialPolytope& polytope) {
  const auto& cells = polytope.normal_cells();
  double gap = 0.0;
  for (std::size_t i = 0; i < instance.size(); ++i) {
    gap += polytope.log_radii()[i] * (cells[i].area - instance.mu(i));
  }
  return gap;
}

TransportSolution solve_transport(std::span<const double> supply, std::span<const double> demand,
                                  std::span<const TransportArc> arcs) {
  const std::size_t S = supply.size();
  const std::size_t T = demand.size();
  double total_supply = 0.0;
  double total_demand = 0.0;
  for (double s : supply) {
    if (!(s >= 0.0)) throw Error(ErrorCode::InvalidInput, "supplies must be nonnegative");
    total_supply += s;
  }
  for (double d : demand) {
    if (!(d >= 0.0)) throw Error(ErrorCode::InvalidInput, "demands must be nonnegative");
    total_demand += d;
  }
  const double scale = std::max({1.0, total_supply, total_demand});
  if (std::abs(total_supply - total_demand) > 1e-9 * scale) {
    throw Error(ErrorCode::InvalidInput, "unbalanced transport problem: supply " +
                                             std::to_string(total_supply) + " vs demand " +
                                             std::to_string(total_demand));
  }

  const std::size_t root = S + T;
  const std::size_t nodes = S + T + 1;
  const std::size_t A = arcs.size();
  double max_cost = 0.0;
  std::vector<Arc> net;
  net.reserve(A + S + T);
  for (const TransportArc& a : arcs) {
    if (a.source >= S || a.sink >= T || !std::isfinite(a.profit)) {
      throw Error(ErrorCode::InvalidInput, "transport arc out of range or with non-finite profit");
    }
    net.push_back({a.source, S + a.sink, -a.profit});
    max_cost = std::max(max_cost, std::abs(a.profit));
  }
  // Artificial arcs through the root. Their cost exceeds any real path, so
  // they carry flow at the optimum only when the real arcs cannot.
  const double big = static_cast<double>(nodes + 1) * (max_cost + 1.0);
  for (std::size_t i = 0; i < S; ++i) net.push_back({i, root, big});
  for (std::size_t j = 0; j < T; ++j) net.push_back({root, S + j, big});

  std::vector<double> flow(net.size(), 0.0);
  std::vector<char> basic(net.size(), 0);
  std::vector<std::vector<std::size_t>> tree_arcs(nodes);
  for (std::size_t i = 0; i < S; ++i) {
    flow[A + i] = supply[i];
    basic[A + i] = 1;
  }
  for (std::size_t j = 0; j < T; ++j) {
    flow[A + S + j] = demand[j];
    basic[A + S + j] = 1;
  }
  for (std::size_t k = A; k < net.size(); ++k) {
    tree_arcs[net[k].tail].push_back(k);
    tree_arcs[net[k].head].push_back(k);
  }

  std::vector<std::size_t> parent(nodes), parent_arc(nodes), depth(nodes), queue;
  std::vector<double> potential(nodes);
  std::vector<char> seen(nodes);
  const double eps = 1e-9;
  std::size_t pivots = 0;

  while (true) {
    // Potentials with rc(u, v) = cost + y_u − y_v vanishing on tree arcs.
    std::fill(seen.begin(), seen.end(), 0);
    queue.assign(1, root);
    seen[root] = 1;
    potential[root] = 0.0;
    depth[root] = 0;
    parent[root] = root;
    for (std::size_t q = 0; q < queue.size(); ++q) {
      const std::size_t u = queue[q];
      for (std::size_t k : tree_arcs[u]) {
        const std::size_t w = net[k].tail == u ? net[k].head : net[k].tail;
        if (seen[w]) continue;
        seen[w] = 1;
        parent[w] = u;
        parent_arc[w] = k;
        depth[w] = depth[u] + 1;
        potential[w] = net[k].tail == u ? potential[u] + net[k].cost : potential[u] - net[k].cost;
        queue.push_back(w);
      }
    }

    std::size_t entering = net.size();
    for (std::size_t k = 0; k < net.size(); ++k) {
      if (basic[k]) continue;
      const double rc = net[k].cost + potential[net[k].tail] - potential[net[k].head];
      if (rc < -eps) {
        entering = k;
        break;
      }
    }
    if (entering == net.size()) break;
    ++pivots;

    // Cycle: entering arc u -> v, then the tree path v -> ... -> u.
    const std::size_t u = net[entering].tail;
    const std::size_t v = net[entering].head;
    std::vector<std::pair<std::size_t, bool>> cycle;  // (arc, increases)
    std::size_t a = v;
    std::size_t b = u;
    std::vector<std::pair<std::size_t, bool>> from_u;
    while (a != b) {
      if (depth[a] >= depth[b]) {
        const std::size_t k = parent_arc[a];
        cycle.emplace_back(k, net[k].tail == a);
        a = parent[a];
      } else {
        const std::size_t k = parent_arc[b];
        from_u.emplace_back(k, net[k].head == b);
        b = parent[b];
      }
    }
    cycle.insert(cycle.end(), from_u.begin(), from_u.end());

    double theta = std::numeric_limits<double>::infinity();
    std::size_t leaving = net.size();
    for (const auto& [k, inc] : cycle) {
      if (inc) continue;
      if (flow[k] < theta || (flow[k] == theta && k < leaving)) {
        theta = flow[k];
        leaving = k;
      }
    }
    if (leaving == net.size()) {
      throw Error(ErrorCode::InvalidInput, "transport problem is unbounded");
    }
    theta = std::max(theta, 0.0);
    flow[entering] += theta;
    for (const auto& [k, inc] : cycle) flow[k] += inc ? theta : -theta;
    flow[leaving] = 0.0;

    basic[leaving] = 0;
    basic[entering] = 1;
    for (std::size_t end : {net[leaving].tail, net[leaving].head}) {
      auto& lst = tree_arcs[end];
      lst.erase(std::find(lst.begin(), lst.end(), leaving));
    }
    tree_arcs[u].push_back(entering);
    tree_arcs[v].push_back(entering);
  }

  double artificial = 0.0;
  for (std::size_t k = A; k < net.size(); ++k) artificial += flow[k];
  if (artificial > 1e-9 * scale) {
    throw Error(ErrorCode::Infeasible, "allowed arcs cannot carry the marginals (" +
                                           std::to_string(artificial) + " unrouted)");
  }
  TransportSolution sol;
  sol.flow.assign(flow.begin(), flow.begin() + static_cast<std::ptrdiff_t>(A));
  for (std::size_t k = 0; k < A; ++k) {
    sol.flow[k] = std::max(sol.flow[k], 0.0);
    sol.value += arcs[k].profit * sol.flow[k];
  }
  sol.pivots = pivots;
  return sol;
}

void sample_normals(int dimension, std::size_t count, std::uint64_t seed,
                    std::vector<UnitVec>& samples, std::vector<double>& weights) {
  samples.clear();
  weights.clear();
  std::mt19937_64 rng(seed);
  if (dimension == 1) {
    if (count == 0) throw Error(ErrorCode::InvalidInput, "need at least one sample");
    const double angle =
        seed == 0 ? 0.0 : std::uniform_real_distribution<double>(0.0, 2.0 * std::numbers::pi)(rng);
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    for (const PartitionCell& cell : arc_partition(count)) {
      const Vec3& r = cell.representative;
      samples.push_back(normalize(Vec3{c * r.x - s * r.y, s * r.x + c * r.y, 0.0}));
      weights.push_back(cell.area);
    }
    return;
  }
  if (dimension != 2) throw Error(ErrorCode::UnsupportedDimension, "dimension must be 1 or 2");
  int level = 0;
  while ((std::size_t{20} << (2 * level)) < count) ++level;
  std::array<Vec3, 3> rows = {Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}};
  if (seed != 0) {
    // Uniform random rotation from a normalized Gaussian quaternion.
    std::normal_distribution<double> gauss;
    double q[4];
    double len = 0.0;
    for (double& v : q) {
      v = gauss(rng);
      len += v * v;
    }
    len = std::sqrt(len);
    for (double& v : q) v /= len;
    const double w = q[0], x = q[1], y = q[2], z = q[3];
    rows = {Vec3{1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)},
            Vec3{2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)},
            Vec3{2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)}};
  }
  for (const PartitionCell& cell : geodesic_partition(level)) {
    samples.push_back(normalize(rotate(rows, cell.representative)));
    weights.push_back(cell.area);
  }
}

LpResult lp_oracle(const ProblemInstance& instance, std::size_t samples, std::uint64_t seed) {
  if (samples < instance.size()) {
    throw Error(ErrorCode::InvalidInput, "need at least as many samples as directions");
  }
  LpResult out;
  out.plan.dimension = instance.dimension();
  sample_normals(instance.dimension(), samples, seed, out.plan.samples, out.plan.weights);
  std::vector<TransportArc> arcs;
  for (std::size_t i = 0; i < instance.size(); ++i) {
    for (std::size_t j = 0; j < out.plan.samples.size(); ++j) {
      const double d = dot(instance.direction(i), out.plan.samples[j]);
      if (d > 0.0) arcs.push_back({i, j, std::log(d)});
    }
  }
  const TransportSolution sol = solve_transport(instance.mu(), out.plan.weights, arcs);
  out.value = sol.value;
  out.pivots = sol.pivots;
  for (std::size_t k = 0; k < arcs.size(); ++k) {
    if (sol.flow[k] > 0.0) out.plan.entries.push_back({arcs[k].source, arcs[k].sink, sol.flow[k]});
  }
  return out;
}

}  // namespace gausskraft
