#include <doctest.h>

#include <limits>
#include <random>

#include "rsvm/errors.hpp"
#include "rsvm/screening.hpp"
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

Hyperparams hp_with(double C) {
  Hyperparams hp;
  hp.C = C;
  return hp;
}

DualIterate certified(const Dataset& ds, const Hyperparams& hp) {
  SolveOptions o;
  o.tol = 1e-12;
  o.max_epochs = 500000;
  const SolveReport r = solve(ds, hp, {}, Vector::Zero(ds.size()), o);
  REQUIRE(r.iterate.gap <= 1e-10);
  return r.iterate;
}

}  // namespace

TEST_CASE("gap_ball") {
  DualIterate it;
  it.w = vec({1.0});
  it.gap = 0.0;
  CHECK(gap_ball(it).radius == 0.0);
  it.gap = 0.02;
  CHECK(gap_ball(it).radius == Approx(0.2));
  const DualIterate start = evaluate_iterate(Vector::Zero(3), testing::three_sample(0.0), hp_with(2.0));
  CHECK(gap_ball(start).radius == Approx(std::sqrt(2.0 * 2.0 * 3.0)));
  CHECK(gap_ball(start).center.isZero());
  it.gap = -1e-6;
  CHECK_THROWS_AS(gap_ball(it), NumericalError);
}

TEST_CASE("margin_bounds") {
  const Sample s{vec({1.0}), 1, 0.3};
  SUBCASE("zero radius collapses onto the margin") {
    const MarginBounds b = margin_bounds({vec({1.4}), 0.0, 0.0}, s.view());
    CHECK(b.lower == Approx(0.98));
    CHECK(b.upper == Approx(0.98));
  }
  SUBCASE("hand-substituted example") {
    const MarginBounds b = margin_bounds({vec({1.4}), 0.2, 0.02}, s.view());
    CHECK(b.lower == Approx(0.72));
    CHECK(b.upper == Approx(1.24));
  }
  SUBCASE("ball around the origin") {
    const Sample t{vec({3.0, 4.0}), -1, 0.5};
    const MarginBounds b = margin_bounds({vec({0.0, 0.0}), 2.0, 2.0}, t.view());
    CHECK(b.lower == Approx(-0.5 * 2.0 - 2.0 * 5.0));
    CHECK(b.upper == Approx(2.0 * 5.0));
  }
  CHECK_THROWS_AS(margin_bounds({vec({1.0, 1.0}), 0.1, 0.0}, s.view()), ValidationError);
}

TEST_CASE("classify") {
  CHECK(classify({1.5, 2.0}) == ScreenDecision::ScreenZero);
  CHECK(classify({0.2, 0.9}) == ScreenDecision::ScreenC);
  CHECK(classify({0.72, 1.24}) == ScreenDecision::Keep);
  CHECK(classify({1.0, 1.3}) == ScreenDecision::Keep);
  CHECK(classify({0.5, 1.0}) == ScreenDecision::Keep);
}

TEST_CASE("Partition bookkeeping") {
  Partition p(5);
  p.screen_zero(1, 0);
  p.screen_C(3, 2);
  CHECK(p.num_zero() == 1);
  CHECK(p.num_C() == 1);
  CHECK(p.num_free() == 3);
  CHECK(p.zero_set() == std::vector<Index>{1});
  CHECK(p.C_set() == std::vector<Index>{3});
  CHECK(p.free_set() == std::vector<Index>{0, 2, 4});
  CHECK(p.screened_at(3) == 2);
  CHECK(p.screened_at(0) == -1);
  CHECK(p.screened_fraction() == Approx(0.4));
  CHECK_THROWS_AS(p.screen_C(1, 3), NumericalError);
  CHECK_NOTHROW(p.check());
}

TEST_CASE("ideal_screen") {
  SUBCASE("three-sample set") {
    const Dataset ds = testing::three_sample(0.0);
    const DualIterate opt = certified(ds, hp_with(1.0));
    CHECK(opt.w[0] == Approx(1.0).epsilon(1e-8));
    const Partition p = ideal_screen(opt, ds);
    CHECK(p.zero_set() == std::vector<Index>{2});
    CHECK(p.free_set() == std::vector<Index>{0, 1});
    CHECK(p.C_set().empty());
  }
  SUBCASE("two-sample rho = 0.3") {
    const Dataset ds = testing::two_sample(0.3);
    const Partition p = ideal_screen(evaluate_iterate(vec({1.0, 1.0}), ds, hp_with(1.0)), ds);
    CHECK(p.C_set() == std::vector<Index>{0, 1});
  }
  SUBCASE("huge radii force w* = 0") {
    const Dataset ds = testing::two_sample(50.0);
    const DualIterate opt = evaluate_iterate(vec({1.0, 1.0}), ds, hp_with(1.0));
    CHECK(opt.w.isZero());
    CHECK(ideal_screen(opt, ds).num_C() == 2);
  }
  SUBCASE("uncertified input") {
    const Dataset ds = testing::two_sample(0.0);
    CHECK_THROWS_AS(ideal_screen(evaluate_iterate(Vector::Zero(2), ds, hp_with(1.0)), ds), ValidationError);
  }
}

TEST_CASE("dynamic_screen examples") {
  SUBCASE("three-sample set") {
    const Dataset ds = testing::three_sample(0.0);
    ScreenOptions o;
    o.eps = 1e-8;
    const ScreenResult r = dynamic_screen(ds, hp_with(1.0), o);
    CHECK(r.converged);
    for (const Index i : r.partition.zero_set()) CHECK(i == 2);
    CHECK(r.iterate.w[0] == Approx(1.0).epsilon(1e-4));
  }
  SUBCASE("F_min = n disables screening") {
    const Dataset ds = set_radii(gen_gaussian({60, 3, 2.0, 1.0, 4}), 0.02);
    ScreenOptions o;
    o.eps = 1e-8;
    o.f_min = ds.size();
    const ScreenResult r = dynamic_screen(ds, hp_with(1.0), o);
    CHECK(r.trace.rows.size() == 1);
    CHECK(r.partition.num_free() == ds.size());
    SolveOptions so;
    so.tol = 1e-8;
    const SolveReport plain = solve(ds, hp_with(1.0), {}, Vector::Zero(ds.size()), so);
    CHECK(r.converged);
    CHECK(std::abs(r.iterate.primal_value - plain.iterate.primal_value) <= 2e-8);
  }
  SUBCASE("infinite eps stops at the first gap") {
    ScreenOptions o;
    o.eps = std::numeric_limits<double>::infinity();
    const ScreenResult r = dynamic_screen(testing::three_sample(0.1), hp_with(1.0), o);
    CHECK(r.trace.rows.size() == 1);
    CHECK(r.epochs == 0);
    CHECK(r.converged);
  }
  SUBCASE("option validation") {
    ScreenOptions o;
    o.screen_every = 0;
    CHECK_THROWS_AS(dynamic_screen(testing::two_sample(0.0), hp_with(1.0), o), ValidationError);
    o = {};
    o.f_min = -1;
    CHECK_THROWS_AS(dynamic_screen(testing::two_sample(0.0), hp_with(1.0), o), ValidationError);
  }
}

TEST_CASE("GAP ball contains the analytic optimum at every outer iteration") {
  struct Case {
    Dataset ds;
    double w_star;
  };
  for (const Case& c : {Case{testing::two_sample(0.0), 1.0}, Case{testing::two_sample(0.3), 1.4},
                        Case{testing::three_sample(0.0), 1.0}}) {
    ScreenOptions o;
    o.eps = 1e-10;
    o.screen_every = 1;
    int balls = 0;
    o.on_ball = [&](const SafeBall& b) {
      ++balls;
      CHECK(std::abs(b.center[0] - c.w_star) <= b.radius);
    };
    dynamic_screen(c.ds, hp_with(1.0), o);
    CHECK(balls >= 1);
  }
}

TEST_CASE("margin bounds sandwich the margin over the ball") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 20, d = 1 + static_cast<Index>(rng() % 5);
    const Dataset ds = testing::random_dataset(rng, n, d, 0.1 * (trial % 4), 2.0);
    const Hyperparams hp = hp_with(1.0);
    SolveOptions so;
    so.tol = 1e-3;
    so.max_epochs = 1 + static_cast<int>(rng() % 20);
    const SafeBall ball = gap_ball(solve(ds, hp, {}, Vector::Zero(n), so).iterate);
    for (int k = 0; k < 200; ++k) {
      const Vector w = testing::uniform_in_ball(rng, ball.center, ball.radius);
      for (Index i = 0; i < n; ++i) {
        const MarginBounds b = margin_bounds(ball, ds.sample(i));
        const double psi = testing::robust_margin_ld(w, ds, i);
        CHECK(b.lower <= psi);
        CHECK(psi <= b.upper);
      }
    }
  }
}

TEST_CASE("bound width is 2R(||x|| + rho) away from the origin") {
  const Sample s{vec({1.0, 2.0}), -1, 0.3};
  const SafeBall ball{vec({3.0, -1.0}), 0.25, 0.25 * 0.25 / 2};
  const MarginBounds b = margin_bounds(ball, s.view());
  CHECK(b.upper - b.lower == Approx(2 * 0.25 * (std::sqrt(5.0) + 0.3)));
}

TEST_CASE("dynamic_screen partitions grow monotonically and stay safe") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const Dataset ds = set_radii(gen_gaussian({120, 4, 2.5, 1.0, seed}), 0.01 * static_cast<double>(seed % 4));
    const Hyperparams hp = hp_with(seed % 2 ? 1.0 : 0.1);
    ScreenOptions o;
    o.eps = 1e-7;
    const ScreenResult r = dynamic_screen(ds, hp, o);
    CAPTURE(seed);
    REQUIRE(r.converged);
    for (std::size_t k = 1; k < r.trace.rows.size(); ++k) {
      CHECK(r.trace.rows[k].n_free <= r.trace.rows[k - 1].n_free);
      CHECK(r.trace.rows[k].n_zero >= r.trace.rows[k - 1].n_zero);
      CHECK(r.trace.rows[k].n_C >= r.trace.rows[k - 1].n_C);
    }
    for (const auto& row : r.trace.rows) CHECK(row.n_zero + row.n_C + row.n_free == ds.size());
    for (const Index i : r.partition.zero_set()) CHECK(r.iterate.alpha[i] == 0.0);
    for (const Index i : r.partition.C_set()) CHECK(r.iterate.alpha[i] == hp.C);

    const AuditReport audit = verify_no_false_screening(r.partition, ds, hp);
    CHECK(audit.reference_certified);
    CHECK(audit.passed);

    const DualIterate ref = certified(ds, hp);
    CHECK((r.iterate.w - ref.w).norm() <= std::sqrt(2.0 * o.eps) + std::sqrt(2.0 * ref.gap));
  }
}

TEST_CASE("verify_no_false_screening") {
  const Dataset ds = set_radii(gen_gaussian({80, 3, 1.0, 1.0, 3}), 0.02);
  const Hyperparams hp = hp_with(1.0);
  SUBCASE("empty partition passes vacuously") {
    CHECK(verify_no_false_screening(Partition(ds.size()), ds, hp).passed);
  }
  SUBCASE("screening the worst sample to R is caught") {
    const DualIterate ref = certified(ds, hp);
    const Vector psi = margins(ref.w, ds);
    Index worst = 0;
    psi.minCoeff(&worst);
    Partition p(ds.size());
    p.screen_zero(worst, 0);
    const AuditReport audit = verify_no_false_screening(p, ds, hp, ref);
    CHECK_FALSE(audit.passed);
    CHECK(audit.bad_zero == std::vector<Index>{worst});
  }
}

TEST_CASE("trace CSV layout") {
  ScreenTrace t;
  t.rows.push_back({0, 2.0, 2.0, 0, 1, 3, 0.5});
  const std::string csv = t.to_csv();
  CHECK(csv.rfind("iter,gap,radius,n_zero,n_C,n_free,seconds\n", 0) == 0);
  CHECK(csv.find("0,2,2,0,1,3,0.5") != std::string::npos);
}
