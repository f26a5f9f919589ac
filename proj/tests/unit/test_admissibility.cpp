#include <doctest.h>

#include "fixtures.hpp"

using namespace gausskraft;
using gk_test::kPi;

namespace {

ProblemInstance circle(std::vector<double> degrees, std::vector<double> mu) {
  std::vector<UnitVec> d;
  for (double a : degrees) d.push_back(gk_test::circle_point(a * kPi / 180.0));
  return ProblemInstance::create(1, d, std::move(mu));
}

// Closed-hemisphere test by candidate enumeration: if some u ≠ 0 has
// <x_i, u> ≤ 0 for all i, an extreme such u is ±x_i × x_j or ±x_i.
bool in_closed_hemisphere(const std::vector<UnitVec>& pts) {
  std::vector<Vec3> cand;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    cand.push_back(pts[i]);
    cand.push_back(-pts[i].vec());
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const Vec3 c = cross(pts[i], pts[j]);
      if (norm(c) < 1e-9) continue;
      cand.push_back(c / norm(c));
      cand.push_back(-c / norm(c));
    }
  }
  for (const Vec3& u : cand) {
    bool ok = true;
    for (const UnitVec& p : pts) ok = ok && dot(p, u) <= 1e-12;
    if (ok) return true;
  }
  return false;
}

double monte_carlo_dual_area(const std::vector<UnitVec>& gens, std::mt19937_64& rng,
                             std::size_t n, double& se) {
  std::size_t hits = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const UnitVec y = gk_test::random_unit(rng);
    bool in = true;
    for (const UnitVec& g : gens) in = in && dot(g, y) <= 0.0;
    hits += in;
  }
  const double p = static_cast<double>(hits) / n;
  se = 4 * kPi * std::sqrt(p * (1 - p) / n);
  return 4 * kPi * p;
}

}  // namespace

TEST_CASE("mass balance") {
  const auto dirs = gk_test::tetra_dirs();
  const MassBalanceResult ok = check_mass_balance(gk_test::tetra_instance());
  CHECK(ok.ok);
  CHECK(ok.residual == doctest::Approx(0.0));
  const MassBalanceResult bad =
      check_mass_balance(ProblemInstance::create(2, dirs, {kPi, kPi, kPi, kPi / 2}));
  CHECK_FALSE(bad.ok);
  CHECK(bad.residual == doctest::Approx(kPi / 2));
  CHECK(check_mass_balance(circle({0, 90, 180, 270}, {kPi / 2, kPi / 2, kPi / 2, kPi / 2})).ok);
}

TEST_CASE("positivity") {
  CHECK(check_positivity(gk_test::tetra_instance()).ok);
  const auto r = check_positivity(
      ProblemInstance::create(2, gk_test::tetra_dirs(), {2 * kPi, kPi, kPi, 0.0}));
  CHECK_FALSE(r.ok);
  REQUIRE(r.worst_index);
  CHECK(*r.worst_index == 3);
}

TEST_CASE("hemisphere condition") {
  CHECK(check_hemisphere(gk_test::octahedron_instance()).ok);

  std::vector<UnitVec> upper = {normalize(Vec3{1, 0, 0}), normalize(Vec3{0, 1, 0.3}),
                                normalize(Vec3{-1, 0, 0.5}), normalize(Vec3{0, -1, 0}),
                                UnitVec::trusted({0, 0, 1})};
  const auto r = check_hemisphere(ProblemInstance::create(2, upper, std::vector<double>(5, 1.0)));
  CHECK_FALSE(r.ok);
  REQUIRE(r.witness);
  for (const UnitVec& p : upper) CHECK(dot(p, *r.witness) <= 1e-12);

  // Dropping one tetrahedron vertex leaves three directions in a half-space.
  const auto t = check_hemisphere(
      ProblemInstance::create(2, gk_test::tetra_dirs(), {4 * kPi / 3, 4 * kPi / 3, 4 * kPi / 3, 0}));
  CHECK_FALSE(t.ok);
  REQUIRE(t.witness);
  for (std::size_t i = 0; i < 3; ++i) CHECK(dot(gk_test::tetra_dirs()[i], *t.witness) <= 1e-12);

  const auto c = check_hemisphere(circle({0, 60, 150}, {1, 1, 1}));
  CHECK_FALSE(c.ok);
  REQUIRE(c.witness);
  CHECK(check_hemisphere(circle({0, 120, 240}, {1, 1, 1})).ok);
}

TEST_CASE("hemisphere check agrees with candidate enumeration") {
  std::mt19937_64 rng(99);
  int failures = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t K = 4 + trial % 6;
    auto dirs = gk_test::random_directions(K, rng, 0.05);
    // Bias half the draws into a hemisphere.
    if (trial % 2 == 0) {
      const UnitVec u = gk_test::random_unit(rng);
      for (UnitVec& d : dirs) {
        if (dot(d, u) > 0.0) d = normalize(d.vec() - 2 * dot(d, u) * u.vec());
      }
    }
    const ProblemInstance inst = ProblemInstance::create(2, dirs, std::vector<double>(K, 1.0));
    const HemisphereResult r = check_hemisphere(inst);
    CHECK(r.ok == !in_closed_hemisphere(dirs));
    if (!r.ok) {
      ++failures;
      REQUIRE(r.witness);
      for (const UnitVec& d : dirs) CHECK(dot(d, *r.witness) <= 1e-12);
    }
  }
  CHECK(failures > 100);
}

TEST_CASE("vertex bound") {
  CHECK(check_vertex_bound(gk_test::tetra_instance()).ok);
  const auto r = check_vertex_bound(
      ProblemInstance::create(2, gk_test::tetra_dirs(), {kPi / 2, 2 * kPi, kPi, kPi / 2}));
  CHECK_FALSE(r.ok);
  CHECK(r.worst_index == 1);
  CHECK_FALSE(check_vertex_bound(circle({0, 120, 240}, {kPi, kPi / 2, kPi / 2})).ok);
}

TEST_CASE("dual cone areas") {
  std::mt19937_64 rng(17);
  CHECK(dual_cone_area(2, {UnitVec::trusted({0, 0, 1})}) == doctest::Approx(2 * kPi));
  CHECK(dual_cone_area(1, {UnitVec::trusted({1, 0, 0})}) == doctest::Approx(kPi));
  CHECK(dual_cone_area(2, {UnitVec::trusted({1, 0, 0}), UnitVec::trusted({0, 1, 0}),
                           UnitVec::trusted({0, 0, 1})}) == doctest::Approx(kPi / 2));
  for (int trial = 0; trial < 6; ++trial) {
    const std::size_t m = 1 + trial % 3;
    std::vector<UnitVec> gens;
    const UnitVec c = gk_test::random_unit(rng);
    while (gens.size() < m) {
      const UnitVec g = gk_test::random_unit(rng);
      if (dot(g, c) > 0.4) gens.push_back(g);
    }
    double se = 0.0;
    const double mc = monte_carlo_dual_area(gens, rng, 1'000'000, se);
    CHECK(std::abs(dual_cone_area(2, gens) - mc) <= 4 * se + 1e-12);
  }
  // Circle: the dual of an arc of length θ has length π − θ.
  CHECK(dual_cone_area(1, {gk_test::circle_point(0.0), gk_test::circle_point(1.0)}) ==
        doctest::Approx(kPi - 1.0));
}

TEST_CASE("exhaustive cone condition") {
  const ConeCheckResult t = check_cone_condition_exhaustive(gk_test::tetra_instance());
  CHECK(t.status == ConeStatus::Passed);
  CHECK(t.cones_checked == 14);

  CHECK(check_cone_condition_exhaustive(circle({0, 120, 240}, {0.9 * kPi, 0.55 * kPi, 0.55 * kPi}))
            .status == ConeStatus::Passed);
  const ConeCheckResult f =
      check_cone_condition_exhaustive(circle({0, 120, 240}, {1.1 * kPi, 0.45 * kPi, 0.45 * kPi}));
  CHECK(f.status == ConeStatus::FailedWithCone);
  CHECK(f.generators == std::vector<std::size_t>{0});

  // Two adjacent heavy points: each respects the ray bound, the pair does not.
  const ConeCheckResult pair = check_cone_condition_exhaustive(
      circle({0, 60, 180, 270}, {0.95 * kPi, 0.95 * kPi, 0.05 * kPi, 0.05 * kPi}));
  CHECK(pair.status == ConeStatus::FailedWithCone);
  CHECK(pair.generators == std::vector<std::size_t>{0, 1});

  std::mt19937_64 rng(1);
  const std::vector<UnitVec> many = gk_test::random_directions(13, rng);
  CHECK_THROWS_AS(check_cone_condition_exhaustive(
                      ProblemInstance::create(2, many, std::vector<double>(13, 4 * kPi / 13))),
                  Error);
}

TEST_CASE("random admissible instances pass every check") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const AdmissibilityReport r = check_admissibility(gk_test::random_admissible(10, seed));
    CHECK(r.ok());
    CHECK(r.cone_check.status == ConeStatus::Passed);
  }
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const ProblemInstance bad = gk_test::vertex_bound_violation(10, seed);
    const AdmissibilityReport r = check_admissibility(bad);
    CHECK_FALSE(r.ok());
    CHECK_FALSE(r.vertex_bound.ok);
    CHECK(r.vertex_bound.worst_index == 0);
    CHECK(r.cone_check.generators == std::vector<std::size_t>{0});
    CHECK_FALSE(describe_failure(r).empty());
  }
  const AdmissibilityReport big = check_admissibility(gk_test::random_admissible(20, 3));
  CHECK(big.ok());
  CHECK(big.cone_check.status == ConeStatus::NotRun);
}
