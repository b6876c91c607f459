#include <doctest.h>

#include <random>

#include "rsvm/errors.hpp"
#include "rsvm/screening.hpp"
#include "rsvm/solver.hpp"
#include "support/oracles.hpp"

using namespace rsvm;
using doctest::Approx;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (const double x : v) out[i++] = x;
  return out;
}

Hyperparams hp_with(double C, double tol = 1e-8) {
  Hyperparams hp;
  hp.C = C;
  hp.gap_tol = tol;
  hp.max_epochs = 200000;
  return hp;
}

SolveOptions opts(double tol, int max_epochs = 200000) {
  SolveOptions o;
  o.tol = tol;
  o.max_epochs = max_epochs;
  return o;
}

}  // namespace

TEST_CASE("dual_gradient examples") {
  CHECK(dual_gradient(vec({0.0, 0.0}), testing::two_sample(0.3)) == Vector::Ones(2));
  const Vector g = dual_gradient(vec({0.25, 0.25}), testing::two_sample(0.0));
  CHECK(g[0] == Approx(0.5));
  CHECK(g[1] == Approx(0.5));
}

TEST_CASE("dual_gradient matches central differences of an independent dual") {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  int checked = 0;
  for (int trial = 0; trial < 400 && checked < 60; ++trial) {
    const Index n = 2 + static_cast<Index>(rng() % 8);
    const Index d = 1 + static_cast<Index>(rng() % 4);
    const Dataset ds = testing::random_dataset(rng, n, d, 0.1 * (trial % 3), 1.0);
    const double C = 2.0;
    Vector alpha(n);
    for (Index i = 0; i < n; ++i) alpha[i] = C * u(rng);
    const DualAggregates agg = dual_aggregates(alpha, ds);
    if (agg.d.norm() - agg.s <= 0.1) continue;
    ++checked;
    const Vector g = dual_gradient(alpha, ds);
    const std::vector<double> av(alpha.data(), alpha.data() + n);
    const auto f = [&](const std::vector<double>& a) { return testing::robust_dual_ld(a, ds); };
    for (Index i = 0; i < n; ++i) {
      CHECK(std::abs(g[i] - testing::central_difference(f, av, static_cast<std::size_t>(i), 1e-6)) <= 1e-5);
    }
  }
  CHECK(checked == 60);
}

TEST_CASE("project_box") {
  Hyperparams hp = hp_with(1.0);
  CHECK(project_box(vec({-1.0, 0.5, 9.0}), hp) == vec({0.0, 0.5, 1.0}));
  FrozenAssignment frozen;
  frozen.fixed_C = {0};
  frozen.fixed_zero = {2};
  CHECK(project_box(vec({0.2, 0.3, 0.4}), hp, frozen) == vec({1.0, 0.3, 0.0}));
  const Vector feasible = vec({0.0, 0.25, 1.0});
  CHECK(project_box(feasible, hp) == feasible);
}

TEST_CASE("FrozenAssignment validation") {
  FrozenAssignment f;
  f.fixed_zero = {0};
  f.fixed_C = {0};
  CHECK_THROWS_AS(f.validate(2), ValidationError);
  f.fixed_C = {5};
  CHECK_THROWS_AS(f.validate(2), ValidationError);
  f.fixed_C = {1};
  CHECK_NOTHROW(f.validate(2));
}

TEST_CASE("solve reaches the analytic optimum of the two-sample set") {
  SUBCASE("rho = 0") {
    const SolveReport r = solve(testing::two_sample(0.0), hp_with(1.0), {}, Vector::Zero(2), opts(1e-8));
    CHECK(r.converged);
    CHECK(r.iterate.gap <= 1e-8);
    CHECK(r.iterate.dual_value == Approx(0.5).epsilon(1e-8));
    CHECK(r.iterate.w[0] == Approx(1.0).epsilon(1e-4));
  }
  SUBCASE("rho = 0.3") {
    const SolveReport r = solve(testing::two_sample(0.3), hp_with(1.0), {}, Vector::Zero(2), opts(1e-8));
    CHECK(r.converged);
    CHECK(r.iterate.alpha[0] == 1.0);
    CHECK(r.iterate.alpha[1] == 1.0);
    CHECK(r.iterate.dual_value == Approx(1.02).epsilon(1e-10));
    CHECK(r.iterate.w[0] == Approx(1.4).epsilon(1e-10));
  }
}

TEST_CASE("solve starts from alpha = 0 with gap C n") {
  const SolveReport r = solve(testing::three_sample(0.0), hp_with(2.0), {}, Vector::Zero(3), opts(1e-8));
  REQUIRE(!r.gap_history.empty());
  CHECK(r.gap_history.front() == 6.0);
}

TEST_CASE("solve with every coordinate frozen returns the pinned iterate") {
  FrozenAssignment frozen;
  frozen.fixed_C = {0, 1};
  const SolveReport r = solve(testing::two_sample(0.3), hp_with(1.0), frozen, Vector::Ones(2), opts(1e-8));
  CHECK(r.epochs == 0);
  CHECK(r.iterate.alpha == Vector::Ones(2));
  CHECK(r.converged);
}

TEST_CASE("solve rejects alpha0 inconsistent with the frozen sets") {
  FrozenAssignment frozen;
  frozen.fixed_C = {0};
  CHECK_THROWS_AS(solve(testing::two_sample(0.3), hp_with(1.0), frozen, Vector::Zero(2), opts(1e-8)),
                  ValidationError);
  CHECK_THROWS_AS(solve(testing::two_sample(0.3), hp_with(1.0), {}, vec({2.0, 0.0}), opts(1e-8)),
                  ValidationError);
}

TEST_CASE("max_epochs = 0 returns the start point uncertified") {
  const SolveReport r = solve(testing::two_sample(0.0), hp_with(1.0), {}, Vector::Zero(2), opts(1e-8, 0));
  CHECK_FALSE(r.converged);
  CHECK(r.epochs == 0);
  CHECK(r.iterate.gap == 2.0);
}

TEST_CASE("solve properties on random instances") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    const Index n = 5 + static_cast<Index>(rng() % 60);
    const Index d = 1 + static_cast<Index>(rng() % 8);
    const Dataset ds = testing::random_dataset(rng, n, d, 0.05 * (trial % 4), 1.0);
    const Hyperparams hp = hp_with(std::pow(10.0, (trial % 4) - 2.0));
    const double tol = 1e-7;
    const SolveReport r = solve(ds, hp, {}, Vector::Zero(n), opts(tol));
    CAPTURE(trial);
    REQUIRE(r.converged);

    // Certificate is reproducible from alpha alone.
    CHECK(evaluate_iterate(r.iterate.alpha, ds, hp).gap <= tol);
    for (const double g : r.gap_history) CHECK(g >= 0.0);
    // Monotone ascent up to the rounding of recomputed aggregates.
    for (std::size_t k = 1; k < r.dual_history.size(); ++k) {
      CHECK(r.dual_history[k] >= r.dual_history[k - 1] - 1e-12 * (1.0 + std::abs(r.dual_history[k - 1])));
    }
    // Optimality conditions hold at the returned point up to the gap scale.
    CHECK(kkt_residuals(r.iterate.alpha, ds, hp, 1e-2).num_violations == 0);
  }
}

TEST_CASE("pinning coordinates from a certified run keeps the optimum") {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 15; ++trial) {
    const Index n = 30 + static_cast<Index>(rng() % 40);
    const Dataset ds = testing::random_dataset(rng, n, 3, 0.05, 1.0);
    const Hyperparams hp = hp_with(1.0);
    const SolveReport ref = solve(ds, hp, {}, Vector::Zero(n), opts(1e-10));
    REQUIRE(ref.converged);
    const Partition ideal = ideal_screen(ref.iterate, ds, 1e-4);
    FrozenAssignment frozen{ideal.zero_set(), ideal.C_set()};
    Vector alpha0 = project_box(Vector::Zero(n), hp, frozen);
    const double tol = 1e-8;
    const SolveReport pinned = solve(ds, hp, frozen, alpha0, opts(tol));
    REQUIRE(pinned.converged);
    CHECK(std::abs(pinned.iterate.dual_value - ref.iterate.dual_value) <= 2 * tol);
    for (const Index i : frozen.fixed_C) CHECK(pinned.iterate.alpha[i] == hp.C);
    for (const Index i : frozen.fixed_zero) CHECK(pinned.iterate.alpha[i] == 0.0);
  }
}

TEST_CASE("ProjectedAscent keeps inactive coordinates fixed and pin updates the cache") {
  const Dataset ds = testing::three_sample(0.1);
  const Hyperparams hp = hp_with(1.0);
  ProjectedAscent engine(ds, hp, Vector::Zero(3));
  engine.set_active({0, 1});
  for (int k = 0; k < 20; ++k) engine.step();
  CHECK(engine.alpha()[2] == 0.0);
  engine.pin(2, 0.5);
  CHECK(engine.alpha()[2] == 0.5);
  CHECK(engine.dual_value() == Approx(dual_objective(engine.alpha(), ds, hp)).epsilon(1e-12));
  CHECK_THROWS_AS(engine.pin(2, 1.5), ValidationError);
  CHECK_THROWS_AS(engine.set_active({7}), ValidationError);
}

TEST_CASE("brute_force_dual") {
  SUBCASE("two-sample rho = 0.3") {
    const BruteForceResult r = brute_force_dual(testing::two_sample(0.3), hp_with(1.0), 200);
    CHECK(std::abs(r.dual_value - 1.02) <= 5e-3);
  }
  SUBCASE("single sample") {
    const Dataset ds = testing::make_dataset({{1.0}}, {1.0}, 0.0);
    const BruteForceResult r = brute_force_dual(ds, hp_with(1.0), 100);
    CHECK(r.alpha[0] == 1.0);
    CHECK(r.dual_value == Approx(0.5));
  }
  SUBCASE("collapsed box") {
    const BruteForceResult r = brute_force_dual(testing::two_sample(0.0), hp_with(1e-9), 10);
    CHECK(std::abs(r.dual_value) < 1e-8);
  }
  SUBCASE("too many samples") {
    const Dataset ds = testing::make_dataset({{1}, {2}, {3}, {4}, {5}}, {1, 1, 1, 1, 1}, 0.0);
    CHECK_THROWS_AS(brute_force_dual(ds, hp_with(1.0), 4), ValidationError);
  }
}

TEST_CASE("solve agrees with the grid oracle on tiny instances") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 10; ++trial) {
    const Index n = 1 + static_cast<Index>(rng() % 3);
    const Index d = 1 + static_cast<Index>(rng() % 3);
    const Dataset ds = testing::random_dataset(rng, n, d, 0.05 * (trial % 3), 1.0);
    const Hyperparams hp = hp_with(1.0);
    const SolveReport r = solve(ds, hp, {}, Vector::Zero(n), opts(1e-9));
    const BruteForceResult grid = brute_force_dual(ds, hp, 100);
    CHECK(r.iterate.dual_value >= grid.dual_value - 1e-12);
    CHECK(std::abs(r.iterate.dual_value - grid.dual_value) <= 1e-3);
  }
}
