#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "fixtures.hpp"
#include "gausskraft/solver.hpp"
#include "gausskraft/transport.hpp"

using namespace gausskraft;
using gk_test::kPi;

namespace {

// Two sources on a complete bipartite graph: with f_2j = d_j − f_1j the
// problem is a fractional knapsack over the profit differences.
double two_source_optimum(const std::vector<double>& supply, const std::vector<double>& demand,
                          const std::vector<std::vector<double>>& profit) {
  std::vector<std::size_t> order(demand.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return profit[0][a] - profit[1][a] > profit[0][b] - profit[1][b];
  });
  double left = supply[0];
  double value = 0.0;
  for (std::size_t j : order) {
    const double f = std::min(left, demand[j]);
    left -= f;
    value += f * profit[0][j] + (demand[j] - f) * profit[1][j];
  }
  return value;
}

std::vector<double> random_masses(std::size_t n, double total, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.2, 1.0);
  std::vector<double> m(n);
  for (double& v : m) v = u(rng);
  const double s = std::accumulate(m.begin(), m.end(), 0.0);
  for (double& v : m) v *= total / s;
  return m;
}

}  // namespace

TEST_CASE("octahedron plan") {
  const ProblemInstance inst = gk_test::octahedron_instance();
  const RadialPolytope P = RadialPolytope::build(inst, std::vector<double>(6, 0.0));
  const TransportPlan plan = plan_from_polytope(P, 1e-12);
  REQUIRE(plan.cost_terms.size() == 6);
  for (double c : plan.cost_terms) CHECK(c == doctest::Approx(plan.cost_terms[0]).epsilon(1e-12));
  // Reference from an independent gnomonic double integral.
  CHECK(plan.total_cost == doctest::Approx(-2.416954550262637).epsilon(1e-9));
  CHECK(std::abs(duality_gap(inst, P)) <= 1e-14);
}

TEST_CASE("duality gap identity") {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 10; ++trial) {
    const ProblemInstance inst = gk_test::random_admissible(10, 600 + trial);
    std::uniform_real_distribution<double> u(-0.4, 0.4);
    std::vector<double> x(inst.size());
    for (double& v : x) v = u(rng);
    const RadialPolytope P = RadialPolytope::build(inst, x);
    const TransportPlan plan = plan_from_polytope(P);
    const double q = eval(inst, x).Q;
    CHECK(std::abs(q - plan.total_cost - duality_gap(inst, P)) <= 1e-10);
    double direct = 0.0;
    for (std::size_t i = 0; i < inst.size(); ++i) {
      direct += x[i] * (P.normal_cell(i).area - inst.mu(i));
    }
    CHECK(duality_gap(inst, P) == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("gap vanishes at the minimizer") {
  const gk_test::RoundTrip rt = gk_test::random_round_trip(12, 31);
  SolveConfig cfg;
  cfg.mass_tol = 1e-12;
  const SolveReport r = solve(rt.instance, cfg);
  REQUIRE(r.status == SolveStatus::Converged);
  const RadialPolytope P = RadialPolytope::build(rt.instance, r.log_radii);
  const TransportPlan plan = plan_from_polytope(P);
  CHECK(std::abs(r.Q_star - plan.total_cost) <= 1e-6);
}

TEST_CASE("two-source transport against the knapsack optimum") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> p(-3.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + trial % 7;
    const std::vector<double> supply = random_masses(2, 5.0, rng);
    const std::vector<double> demand = random_masses(n, 5.0, rng);
    std::vector<std::vector<double>> profit(2, std::vector<double>(n));
    std::vector<TransportArc> arcs;
    for (std::size_t i = 0; i < 2; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        profit[i][j] = p(rng);
        arcs.push_back({i, j, profit[i][j]});
      }
    }
    const TransportSolution sol = solve_transport(supply, demand, arcs);
    CHECK(sol.value == doctest::Approx(two_source_optimum(supply, demand, profit)).epsilon(1e-12));
  }
}

TEST_CASE("transport solutions are feasible and locally optimal") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> p(-2.0, 0.0);
  std::bernoulli_distribution keep(0.8);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t S = 2 + trial % 5;
    const std::size_t D = 3 + trial % 11;
    const std::vector<double> supply = random_masses(S, 1.0, rng);
    const std::vector<double> demand = random_masses(D, 1.0, rng);
    std::vector<TransportArc> arcs;
    std::vector<std::vector<int>> index(S, std::vector<int>(D, -1));
    for (std::size_t i = 0; i < S; ++i) {
      for (std::size_t j = 0; j < D; ++j) {
        // Keep every source connected to every sink with probability 0.8,
        // plus a full row for source 0 so the problem stays feasible.
        if (i == 0 || keep(rng)) {
          index[i][j] = static_cast<int>(arcs.size());
          arcs.push_back({i, j, p(rng)});
        }
      }
    }
    TransportSolution sol;
    try {
      sol = solve_transport(supply, demand, arcs);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Infeasible);
      continue;
    }
    std::vector<double> out(S, 0.0), in(D, 0.0);
    double value = 0.0;
    for (std::size_t k = 0; k < arcs.size(); ++k) {
      CHECK(sol.flow[k] >= 0.0);
      out[arcs[k].source] += sol.flow[k];
      in[arcs[k].sink] += sol.flow[k];
      value += sol.flow[k] * arcs[k].profit;
    }
    for (std::size_t i = 0; i < S; ++i) CHECK(out[i] == doctest::Approx(supply[i]).epsilon(1e-12));
    for (std::size_t j = 0; j < D; ++j) CHECK(in[j] == doctest::Approx(demand[j]).epsilon(1e-12));
    CHECK(value == doctest::Approx(sol.value).epsilon(1e-12));
    // No improving exchange along any 4-cycle.
    for (std::size_t i = 0; i < S; ++i)
      for (std::size_t i2 = 0; i2 < S; ++i2)
        for (std::size_t j = 0; j < D; ++j)
          for (std::size_t j2 = 0; j2 < D; ++j2) {
            if (i == i2 || j == j2) continue;
            const int a = index[i][j], b = index[i2][j2], c = index[i][j2], d = index[i2][j];
            if (a < 0 || b < 0 || c < 0 || d < 0) continue;
            if (sol.flow[a] <= 1e-14 || sol.flow[b] <= 1e-14) continue;
            CHECK(arcs[a].profit + arcs[b].profit >= arcs[c].profit + arcs[d].profit - 1e-12);
          }
  }
}

TEST_CASE("transport input errors") {
  const std::vector<double> supply = {1.0, 1.0};
  const std::vector<TransportArc> arcs = {{0, 0, 0.0}, {1, 1, 0.0}};
  try {
    solve_transport(supply, std::vector<double>{1.0, 1.5}, arcs);
    FAIL("expected InvalidInput");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidInput);
  }
  const std::vector<TransportArc> blocked = {{0, 0, 0.0}, {1, 0, 0.0}};
  try {
    solve_transport(supply, std::vector<double>{1.0, 1.0}, blocked);
    FAIL("expected Infeasible");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Infeasible);
  }
  CHECK_THROWS_AS(solve_transport(supply, supply, std::vector<TransportArc>{{0, 5, 0.0}}), Error);
}

TEST_CASE("sample normals") {
  std::vector<UnitVec> s;
  std::vector<double> w;
  sample_normals(2, 320, 0, s, w);
  CHECK(s.size() == 320);
  CHECK(std::accumulate(w.begin(), w.end(), 0.0) == doctest::Approx(4 * kPi).epsilon(1e-12));
  sample_normals(2, 100, 0, s, w);
  CHECK(s.size() == 320);
  std::vector<UnitVec> r;
  sample_normals(2, 320, 7, r, w);
  CHECK(angular_distance(r[0], s[0]) > 1e-6);
  // A rotation keeps pairwise angles.
  CHECK(angular_distance(r[3], r[17]) == doctest::Approx(angular_distance(s[3], s[17])).epsilon(1e-12));
  sample_normals(1, 50, 3, s, w);
  CHECK(s.size() == 50);
  CHECK(std::accumulate(w.begin(), w.end(), 0.0) == doctest::Approx(2 * kPi).epsilon(1e-12));
}

TEST_CASE("LP oracle on the octahedron") {
  const ProblemInstance inst = gk_test::octahedron_instance();
  const RadialPolytope P = RadialPolytope::build(inst, std::vector<double>(6, 0.0));
  const double semi = plan_from_polytope(P, 1e-12).total_cost;
  const LpResult coarse = lp_oracle(inst, 320, 1);
  const LpResult fine = lp_oracle(inst, 1280, 1);
  const double gap_coarse = std::abs(coarse.value - semi) / std::abs(semi);
  const double gap_fine = std::abs(fine.value - semi) / std::abs(semi);
  CHECK(gap_coarse < 0.02);
  CHECK(gap_fine < gap_coarse);

  std::vector<double> row(6, 0.0), col(coarse.plan.samples.size(), 0.0);
  for (const PlanEntry& e : coarse.plan.entries) {
    CHECK(e.mass > 0.0);
    CHECK(dot(inst.direction(e.source), coarse.plan.samples[e.sample]) > 0.0);
    row[e.source] += e.mass;
    col[e.sample] += e.mass;
  }
  for (std::size_t i = 0; i < 6; ++i) CHECK(row[i] == doctest::Approx(inst.mu(i)).epsilon(1e-12));
  for (std::size_t j = 0; j < col.size(); ++j) {
    CHECK(col[j] == doctest::Approx(coarse.plan.weights[j]).epsilon(1e-12));
  }
  CHECK(std::is_sorted(coarse.plan.entries.begin(), coarse.plan.entries.end(),
                       [](const PlanEntry& a, const PlanEntry& b) {
                         return std::pair(a.source, a.sample) < std::pair(b.source, b.sample);
                       }));
  CHECK_THROWS_AS(lp_oracle(inst, 3, 0), Error);
}

TEST_CASE("LP oracle on a circle instance") {
  const ProblemInstance inst = gk_test::random_circle_instance(5, 12);
  const SolveReport r = solve(inst);
  REQUIRE(r.status == SolveStatus::Converged);
  const double semi = plan_from_polytope(RadialPolytope::build(inst, r.log_radii)).total_cost;
  const LpResult lp = lp_oracle(inst, 400, 2);
  CHECK(std::abs(lp.value - semi) / std::abs(semi) < 0.02);
}
