#include "support.hpp"

#include "tinlinq/error.hpp"
#include "tinlinq/fixtures.hpp"
#include "tinlinq/matching.hpp"
#include "tinlinq/power.hpp"
#include "tinlinq/region.hpp"

#include <doctest.h>

#include <functional>

using namespace tinlinq;
using namespace tinlinq::testing;

namespace {

GdofTuple tuple(std::initializer_list<double> v) {
  Eigen::VectorXd d(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double x : v) d(i++) = x;
  return GdofTuple{d};
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::ParseError;
}

}  // namespace

TEST_SUITE("power") {
  TEST_CASE("assignment matrix") {
    const AssignmentMatrix m = build_assignment_matrix(fixtures::fix_a(), tuple({0.5, 0.6, 0.7}), {0, 1, 2});
    Eigen::Matrix3d expected;
    expected << 1.5, 0.5, 0.1,
                0.2, 0.4, 0.5,
                1.0, 0.5, 0.8;
    CHECK((m.a - expected).cwiseAbs().maxCoeff() < 1e-12);

    const AssignmentMatrix sub = build_assignment_matrix(fixtures::fix_a(), tuple({1.0, 0.5, 0.0}), {0, 1});
    Eigen::Matrix2d e2;
    e2 << 1.0, 0.5, 0.2, 0.5;
    CHECK((sub.a - e2).cwiseAbs().maxCoeff() < 1e-12);

    CHECK(code_of([] { build_assignment_matrix(fixtures::fix_a(), tuple({2.1, 0.1, 0.1}), {0, 1, 2}); }) ==
          ErrorCode::ImmediatelyInfeasible);
  }

  TEST_CASE("Kuhn-Munkres trace on fixture A") {
    const PowerSolution s = solve_power_hungarian(fixtures::fix_a(), tuple({0.5, 0.6, 0.7}));
    CHECK(s.r[0] == doctest::Approx(-1.2));
    CHECK(s.r[1] == doctest::Approx(-0.4));
    CHECK(s.r[2] == doctest::Approx(-0.7));
    CHECK(s.labels.y_v(0) == doctest::Approx(0.3));
    CHECK(s.labels.y_v(1) == doctest::Approx(0.0));
    CHECK(s.labels.y_v(2) == doctest::Approx(0.1));
    CHECK(s.trace.initial_y_u(0) == doctest::Approx(1.5));
    CHECK(s.trace.initial_y_u(1) == doctest::Approx(0.5));
    CHECK(s.trace.initial_y_u(2) == doctest::Approx(1.0));
    REQUIRE(s.trace.steps.size() == 2);
    CHECK(s.trace.steps[0] == doctest::Approx(0.2));
    CHECK(s.trace.steps[1] == doctest::Approx(0.1));
    CHECK(s.rounds == 2);
  }

  TEST_CASE("single user at its direct strength needs full power") {
    Eigen::MatrixXd m(1, 1);
    m << 1.3;
    const ChannelMatrix a(m);
    CHECK(solve_power_hungarian(a, tuple({1.3})).r[0] == doctest::Approx(0.0));
    const PowerSolution au = solve_power_auction(a, tuple({0.4}));
    CHECK(au.r[0] == doctest::Approx(-0.9));
  }

  TEST_CASE("infeasible targets") {
    CHECK(code_of([] { solve_power_hungarian(fixtures::fix_a(), tuple({2.0, 1.0, 1.5})); }) ==
          ErrorCode::InfeasibleGdof);
    CHECK(code_of([] { solve_power_auction(fixtures::fix_a(), tuple({2.0, 1.0, 1.5})); }) ==
          ErrorCode::InfeasibleOrEpsilonTooLarge);
    CHECK_FALSE(is_feasible(fixtures::fix_b(), tuple({0.6, 0.6, 0.7})));
    CHECK(is_feasible(fixtures::fix_a(), tuple({0.5, 0.6, 0.7})));
    CHECK(is_feasible(fixtures::fix_a(), tuple({0.0, 0.0, 0.0})));
  }

  TEST_CASE("auction on the fixtures") {
    const PowerSolution a = solve_power_auction(fixtures::fix_a(), tuple({0.5, 0.6, 0.7}));
    CHECK(std::abs(a.r[0] + 1.2) <= 3e-5);
    CHECK(std::abs(a.r[1] + 0.4) <= 3e-5);
    CHECK(std::abs(a.r[2] + 0.7) <= 3e-5);

    const GdofTuple d = tuple({0.4, 0.4, 0.4});
    const PowerSolution h = solve_power_hungarian(fixtures::fix_b(), d);
    const PowerSolution b = solve_power_auction(fixtures::fix_b(), d);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(b.r[k] - h.r[k]) <= 3e-5);

    AuctionOptions snap;
    snap.snap = true;
    const PowerSolution s = solve_power_auction(fixtures::fix_b(), d, snap);
    for (int k = 0; k < 3; ++k) CHECK(s.r[k] == doctest::Approx(h.r[k]).epsilon(1e-12));
  }

  TEST_CASE("labels are dual feasible, tight on the diagonal and dual optimal") {
    Rng rng(401);
    int solved = 0;
    for (int trial = 0; trial < 600; ++trial) {
      const int k = uniform_int(rng, 1, 7);
      const ChannelMatrix a = random_alpha(rng, k);
      const GdofTuple d{random_feasible_target(rng, a)};
      const UserSet sup = d.support(1e-9);
      if (sup.empty()) continue;
      ++solved;
      const PowerSolution s = solve_power_hungarian(a, d);
      const AssignmentMatrix m = build_assignment_matrix(a, d, sup);
      const auto n = static_cast<int>(sup.size());
      for (int i = 0; i < n; ++i) {
        CHECK(s.labels.y_u(i) >= -1e-12);
        CHECK(s.labels.y_v(i) >= -1e-12);
        CHECK(s.labels.y_u(i) + s.labels.y_v(i) == doctest::Approx(m.a(i, i)).epsilon(1e-10));
        for (int j = 0; j < n; ++j) CHECK(s.labels.y_u(i) + s.labels.y_v(j) >= m.a(i, j) - 1e-9);
      }
      // strong duality against the brute-force assignment value
      double best = -1e300;
      std::vector<int> perm(static_cast<std::size_t>(n));
      std::iota(perm.begin(), perm.end(), 0);
      do {
        double w = 0.0;
        for (int i = 0; i < n; ++i) w += m.a(i, perm[static_cast<std::size_t>(i)]);
        best = std::max(best, w);
      } while (std::next_permutation(perm.begin(), perm.end()));
      CHECK(s.labels.y_u.sum() + s.labels.y_v.sum() == doctest::Approx(best).epsilon(1e-10));
      // target reached exactly
      const GdofTuple got = achieved_gdof(a, s.r);
      for (int u = 0; u < k; ++u) CHECK(got[u] == doctest::Approx(d[u]).epsilon(1e-9));
    }
    CHECK(solved > 500);
  }

  TEST_CASE("minimum power against the LP label oracle") {
    Rng rng(402);
    for (int trial = 0; trial < 200; ++trial) {
      const int k = uniform_int(rng, 2, 6);
      const ChannelMatrix a = random_alpha(rng, k);
      const GdofTuple d{random_feasible_target(rng, a)};
      const UserSet sup = d.support(1e-9);
      if (sup.size() < 2) continue;
      const PowerSolution s = solve_power_hungarian(a, d);
      const Eigen::VectorXd yu = max_left_label_oracle(build_assignment_matrix(a, d, sup).a);
      REQUIRE(yu.size() == static_cast<Eigen::Index>(sup.size()));
      for (std::size_t p = 0; p < sup.size(); ++p) CHECK(s.r[sup[p]] == doctest::Approx(-yu(static_cast<Eigen::Index>(p))).epsilon(1e-7));
    }
  }

  TEST_CASE("no other feasible allocation uses less power on any link") {
    Rng rng(403);
    for (int trial = 0; trial < 100; ++trial) {
      const int k = uniform_int(rng, 2, 4);
      const ChannelMatrix a = random_alpha(rng, k);
      const GdofTuple d{random_feasible_target(rng, a)};
      const UserSet sup = d.support(1e-9);
      if (sup.empty()) continue;
      const PowerSolution s = solve_power_hungarian(a, d);
      for (int sample = 0; sample < 300; ++sample) {
        Eigen::VectorXd r = s.r.r;
        for (int u : sup) r(u) = uniform(rng, -2.5, 0.0);
        bool ok = true;
        for (int u : sup) ok = ok && gdof_of(a, r, u) >= d[u] - 1e-12;
        if (!ok) continue;
        for (int u : sup) CHECK(r(u) >= s.r[u] - 1e-9);
      }
    }
  }

  TEST_CASE("auction within K epsilon of Kuhn-Munkres") {
    Rng rng(404);
    for (int trial = 0; trial < 150; ++trial) {
      const int k = uniform_int(rng, 1, 8);
      const ChannelMatrix a = random_alpha(rng, k);
      const GdofTuple d{random_feasible_target(rng, a, 0.05)};
      const UserSet sup = d.support(1e-9);
      if (sup.empty()) continue;
      AuctionOptions opts;
      opts.epsilon = 1e-4;
      const PowerSolution h = solve_power_hungarian(a, d);
      const PowerSolution au = solve_power_auction(a, d, opts);
      for (std::size_t p = 0; p < sup.size(); ++p) {
        CHECK(std::abs(au.labels.y_v(static_cast<Eigen::Index>(p)) - h.labels.y_v(static_cast<Eigen::Index>(p))) <=
              static_cast<double>(sup.size()) * opts.epsilon + 1e-12);
        CHECK(std::abs(au.r[sup[p]] - h.r[sup[p]]) <= static_cast<double>(sup.size()) * opts.epsilon + 1e-12);
      }
    }
  }

  TEST_CASE("minimum prices equal the Kuhn-Munkres labels") {
    Rng rng(405);
    for (int trial = 0; trial < 300; ++trial) {
      const int k = uniform_int(rng, 1, 7);
      const ChannelMatrix a = random_alpha_coarse(rng, k);
      const GdofTuple d{random_feasible_target(rng, a)};
      const UserSet sup = d.support(1e-9);
      if (sup.empty()) continue;
      const PowerSolution h = solve_power_hungarian(a, d);
      const LabelPair bf = minimum_price_labels(build_assignment_matrix(a, d, sup));
      CHECK((bf.y_u - h.labels.y_u).cwiseAbs().maxCoeff() < 1e-9);
    }
  }

  TEST_CASE("feasibility verdict matches region membership") {
    Rng rng(406);
    for (int trial = 0; trial < 1000; ++trial) {
      const int k = uniform_int(rng, 1, 5);
      const ChannelMatrix a = random_alpha_coarse(rng, k);
      Eigen::VectorXd d(k);
      for (int u = 0; u < k; ++u) d(u) = uniform_int(rng, 0, 3) == 0 ? 0.0 : uniform(rng, 0.0, a(u, u));
      const GdofTuple t{d};
      const bool member = union_membership(a, t).member;
      CHECK(is_feasible(a, t) == member);
      bool solved = true;
      try {
        solve_power_hungarian(a, t);
      } catch (const Error& e) {
        CHECK(is_infeasibility(e.code()));
        solved = false;
      }
      if (!t.support(1e-9).empty()) CHECK(solved == member);
    }
  }

  TEST_CASE("label-update rounds and tree searches") {
    Rng rng(407);
    int max_rounds = 0;
    for (int trial = 0; trial < 300; ++trial) {
      const int k = uniform_int(rng, 2, 7);
      const ChannelMatrix a = random_alpha(rng, k);
      const GdofTuple d{random_feasible_target(rng, a)};
      const UserSet sup = d.support(1e-9);
      if (sup.empty()) continue;
      const PowerSolution s = solve_power_hungarian(a, d);
      CHECK(s.phases <= static_cast<int>(sup.size()));
      max_rounds = std::max(max_rounds, s.rounds);
    }
    MESSAGE("largest number of label updates seen: " << max_rounds);
  }
}
