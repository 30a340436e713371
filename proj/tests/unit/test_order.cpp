#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "sliceforge/error.hpp"
#include "sliceforge/order.hpp"

using namespace sliceforge;

namespace {

OrderProblem small_problem(std::map<int, double> w, int backbone = 0,
                           std::vector<PrecedenceTriple> triples = {}) {
  OrderProblem p;
  for (const auto &[id, _] : w)
    p.hinge_ids.push_back(id);
  p.w_distance = std::move(w);
  p.backbone = backbone;
  p.triples = std::move(triples);
  p.big_m = static_cast<int>(p.hinge_ids.size()) + 1;
  return p;
}

AssemblyPlan plan_of(std::vector<int> order) {
  AssemblyPlan a;
  a.hinge_order = order;
  for (std::size_t i = 0; i < order.size(); ++i)
    a.position[order[i]] = static_cast<int>(i);
  return a;
}

} // namespace

TEST_CASE("a lone backbone is placed first at zero cost") {
  const auto plan = solve_order(small_problem({{5, 0.7}}, 5));
  CHECK(plan.hinge_order == std::vector<int>{5});
  CHECK(plan.objective == 0.0);
  CHECK(plan.exact);
}

TEST_CASE("without precedence the heavier hinge goes earlier") {
  // Backbone b = 0, p = 1 (0.2), q = 2 (0.9): q at 1 and p at 2 costs 1.3,
  // the other feasible order costs 2.0.
  const auto p = small_problem({{0, 0.0}, {1, 0.2}, {2, 0.9}});
  const auto plan = solve_order(p);
  CHECK(plan.hinge_order == std::vector<int>{0, 2, 1});
  CHECK(plan.objective == doctest::Approx(1.3));
  CHECK(order_objective(p, {0, 1, 2}) == doctest::Approx(2.0));
  CHECK(oracle::best_order(p) == doctest::Approx(1.3));
}

TEST_CASE("precedence overrides weight") {
  // Hinge 1 is light but must precede 2 and 3.
  const auto p = small_problem({{0, 0}, {1, 0.1}, {2, 1.0}, {3, 0.8}}, 0, {{2, 1, 3, 0}});
  const auto plan = solve_order(p);
  CHECK(plan.hinge_order == std::vector<int>{0, 1, 2, 3});
  CHECK(verify_plan(plan, p).passed());
}

TEST_CASE("exact search matches exhaustive enumeration") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 80; ++trial) {
    const int n = 1 + trial % 8;
    const auto p = fixture::random_problem(n, rng);
    const auto plan = solve_order(p);
    CAPTURE(trial);
    CHECK(plan.exact);
    CHECK(plan.objective == doctest::Approx(oracle::best_order(p)).epsilon(1e-12));
    CHECK(verify_plan(plan, p).passed());
  }
}

TEST_CASE("ties resolve to the lexicographically smallest order") {
  const auto p = small_problem({{0, 0}, {3, 0.5}, {1, 0.5}, {2, 0.5}});
  CHECK(solve_order(p).hinge_order == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("scaling weights leaves the optimum unchanged") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    auto p = fixture::random_problem(6, rng);
    const auto before = solve_order(p).hinge_order;
    for (auto &[id, w] : p.w_distance)
      w *= 3.5;
    CHECK(solve_order(p).hinge_order == before);
  }
}

TEST_CASE("infeasible precedence is reported") {
  SUBCASE("cycle") {
    const auto p = small_problem({{0, 0}, {1, 1}, {2, 1}, {3, 1}}, 0,
                                 {{2, 1, 3, 0}, {1, 2, 3, 0}});
    CHECK_THROWS_AS(solve_order(p), InfeasibleError);
  }
  SUBCASE("backbone forced after another hinge") {
    const auto p = small_problem({{0, 0}, {1, 1}, {2, 1}}, 0, {{0, 1, 2, 0}});
    try {
      solve_order(p);
      FAIL("expected InfeasibleError");
    } catch (const InfeasibleError &e) {
      CHECK(std::string(e.what()).find("backbone") != std::string::npos);
    }
  }
}

TEST_CASE("malformed problems are rejected") {
  CHECK_THROWS_AS(solve_order(OrderProblem{}), ValidationError);
  CHECK_THROWS_AS(solve_order(small_problem({{0, 0}, {1, -1}})), ValidationError);
  CHECK_THROWS_AS(solve_order(small_problem({{0, 0}, {1, 1}}, 7)), ValidationError);
  CHECK_THROWS_AS(solve_order(small_problem({{0, 0}, {1, 1}}, 0, {{1, 9, 0, 0}})),
                  ValidationError);
}

TEST_CASE("above the threshold the greedy order is flagged heuristic") {
  std::mt19937_64 rng(3);
  const auto p = fixture::random_problem(20, rng, 6);
  const auto plan = solve_order(p, 16);
  CHECK_FALSE(plan.exact);
  CHECK(plan.warnings.size() == 1);
  CHECK(verify_plan(plan, p).passed());
  // The same problem solved exactly with a raised threshold is no worse.
  const auto small = fixture::random_problem(10, rng, 4);
  CHECK(solve_order(small, 4).objective >= solve_order(small, 16).objective - 1e-12);
}

TEST_CASE("verification lists each kind of violation") {
  const auto p = small_problem({{0, 0}, {1, 1}, {2, 1}, {3, 1}}, 0, {{2, 1, 3, 0}});
  CHECK(verify_plan(plan_of({0, 1, 2, 3}), p).passed());

  const auto bad_triple = verify_plan(plan_of({0, 2, 1, 3}), p);
  CHECK_FALSE(bad_triple.precedence_ok);
  REQUIRE(bad_triple.precedence_violations.size() == 1);
  CHECK(bad_triple.precedence_violations[0] == PrecedenceTriple{2, 1, 3, 0});
  CHECK(bad_triple.summary().find("(2,1,3)") != std::string::npos);

  const auto bad_backbone = verify_plan(plan_of({1, 2, 0, 3}), p);
  CHECK_FALSE(bad_backbone.backbone_ok);
  CHECK(bad_backbone.backbone_position == 2);

  const auto bad_perm = verify_plan(plan_of({0, 1, 1, 3}), p);
  CHECK_FALSE(bad_perm.bijection_ok);
  CHECK(verify_plan(plan_of({0, 1, 2, 3}), p).objective == doctest::Approx(6.0));
}

TEST_CASE("slice order follows first appearance in the hinge order") {
  using fixture::make_slice;
  std::vector<Slice> s;
  for (int i = 0; i < 4; ++i)
    s.push_back(make_slice(i, i < 2 ? Axis::X : Axis::Y, i, {0, 0, 4, 4}));
  std::vector<Hinge> h(2);
  h[0].id = 0, h[0].slice_a = 1, h[0].slice_b = 2;
  h[1].id = 1, h[1].slice_a = 0, h[1].slice_b = 2;
  std::vector<std::string> warnings;
  const auto order = derive_slice_order(plan_of({1, 0}), h, s, &warnings);
  CHECK(order == std::vector<int>{0, 2, 1, 3});
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("slice 3") != std::string::npos);
}

TEST_CASE("LP export carries one disjunction pair per hinge pair") {
  const auto p = small_problem({{0, 0}, {1, 0.25}, {2, 1}}, 0, {{2, 1, 0, 0}});
  const std::string lp = to_lp(p);
  CHECK(lp.find("Minimize") != std::string::npos);
  CHECK(lp.find("o1a_0_1:") != std::string::npos);
  CHECK(lp.find("o1b_1_2:") != std::string::npos);
  CHECK(lp.find("o2a_0: x1 - x2 <= -1") != std::string::npos);
  CHECK(lp.find(" o3: x0 = 0") != std::string::npos);
  CHECK(lp.find("0.25 x1") != std::string::npos);
  CHECK(lp.rfind("End\n") == lp.size() - 4);
}

TEST_CASE("weights are distances to the volume centre in normalized coordinates") {
  using fixture::make_slice;
  const std::vector<Slice> s = {make_slice(0, Axis::X, 4, {0, 0, 8, 8}, {0}),
                                make_slice(1, Axis::Y, 4, {0, 0, 8, 8}, {0}),
                                make_slice(2, Axis::Y, 8, {0, 0, 8, 8}, {1})};
  const auto h = compute_hinges(s, {});
  REQUIRE(h.size() == 2);
  const auto p = make_order_problem(h, s, {8, 8, 8}, 0, {});
  CHECK(p.w_distance.at(0) == doctest::Approx(0.0));
  // Second hinge: x = 4 (0), y = 8 (+1), z midpoint 4 (0).
  CHECK(p.w_distance.at(1) == doctest::Approx(1.0));
  CHECK(p.big_m == 3);
}
