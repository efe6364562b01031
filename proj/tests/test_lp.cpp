#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "pnd/lp.hpp"

using namespace pnd;
using namespace pnd::lp;
using namespace pnd::oracle;

namespace {

void check_optimality(const LinearProgram& lp, const LpSolution& s) {
  const int n = lp.cost.size();
  std::span<const double> x(s.x.data(), n);
  for (int j = 0; j < n; ++j) {
    CHECK(s.x[j] >= lp.lower[j] - 1e-7);
    CHECK(s.x[j] <= lp.upper[j] + 1e-7);
  }
  // strong duality: c'x = b'y + sum over columns of d_j at its bound
  double dual = 0.0;
  for (size_t i = 0; i < lp.rows.size(); ++i) {
    double act = lp.rows[i].activity(x);
    if (lp.rows[i].sense != Sense::ge) CHECK(act <= lp.rows[i].rhs + 1e-6);
    if (lp.rows[i].sense != Sense::le) CHECK(act >= lp.rows[i].rhs - 1e-6);
    dual += lp.rows[i].rhs * s.duals[i];
    // complementary slackness
    CHECK(std::abs(s.duals[i] * (act - lp.rows[i].rhs)) <= 1e-6);
  }
  for (int j = 0; j < n; ++j) dual += s.reduced_costs[j] * s.x[j];
  CHECK(std::abs(dual - s.objective) <= 1e-6 * (1 + std::abs(s.objective)));
}

}  // namespace

TEST_CASE("small examples") {
  LinearProgram lp;
  lp.cost = Vector::Constant(2, -1.0);
  lp.lower = Vector::Zero(2);
  lp.upper = Vector::Ones(2);
  lp.rows.push_back(make_row({1, 1}, Sense::le, 1));
  LpSolution s = solve(lp);
  REQUIRE(s.status == Status::optimal);
  CHECK(s.objective == doctest::Approx(-1));

  Solver warm(lp);
  warm.solve();
  std::vector<Row> cut{make_row({1, 0}, Sense::le, 0)};
  LpSolution w = warm.resolve_with_new_rows(cut);
  REQUIRE(w.status == Status::optimal);
  CHECK(w.objective == doctest::Approx(-1));
  CHECK(w.x[0] == doctest::Approx(0));
  CHECK(w.x[1] == doctest::Approx(1));

  std::vector<Row> slack{make_row({1, 1}, Sense::le, 5)};
  LpSolution same = warm.resolve_with_new_rows(slack);
  CHECK(same.objective == doctest::Approx(-1));
  CHECK(same.iterations == 0);

  LinearProgram bad;
  bad.cost = Vector::Ones(1);
  bad.lower = Vector::Constant(1, -10);
  bad.upper = Vector::Constant(1, 10);
  bad.rows.push_back(make_row({1}, Sense::ge, 1));
  bad.rows.push_back(make_row({1}, Sense::le, 0));
  CHECK(solve(bad).status == Status::infeasible);

  LinearProgram unb;
  unb.cost = Vector::Constant(1, -1.0);
  unb.lower = Vector::Zero(1);
  unb.upper = Vector::Constant(1, kInf);
  unb.rows.push_back(make_row({1}, Sense::ge, 1));
  CHECK(solve(unb).status == Status::unbounded);

  LinearProgram free_var;
  free_var.cost = Vector::Ones(1);
  free_var.lower = Vector::Constant(1, -kInf);
  free_var.upper = Vector::Constant(1, kInf);
  free_var.rows.push_back(make_row({1}, Sense::ge, -3));
  LpSolution f = solve(free_var);
  REQUIRE(f.status == Status::optimal);
  CHECK(f.objective == doctest::Approx(-3));
}

TEST_CASE("random LPs against vertex enumeration") {
  std::mt19937 rng(7);
  int optimal = 0, infeasible = 0;
  for (int t = 0; t < 200; ++t) {
    int n = 1 + t % 5;
    int m = 1 + (t * 7) % 12;
    LinearProgram lp = random_lp(rng, n, m);
    std::optional<double> want = vertex_oracle(lp);
    LpSolution got = solve(lp);
    if (!want) {
      CHECK(got.status == Status::infeasible);
      ++infeasible;
      continue;
    }
    ++optimal;
    REQUIRE(got.status == Status::optimal);
    CHECK(std::abs(got.objective - *want) <= 1e-6 * (1 + std::abs(*want)));
    check_optimality(lp, got);
  }
  CHECK(optimal > 40);
  CHECK(infeasible > 5);
}

TEST_CASE("warm and cold agree over cut sequences") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int t = 0; t < 200; ++t) {
    int n = 2 + t % 6;
    LinearProgram lp = random_lp(rng, n, 2);
    Solver warm(lp);
    LpSolution w = warm.solve();
    for (int step = 0; step < 4; ++step) {
      std::vector<double> c(n);
      for (double& v : c) v = std::round(u(rng));
      Row r = make_row(c, Sense::le, std::round(u(rng)));
      lp.rows.push_back(r);
      std::vector<Row> add{r};
      w = warm.resolve_with_new_rows(add);
      LpSolution cold = solve(lp);
      REQUIRE(w.status == cold.status);
      if (cold.status == Status::optimal) CHECK(w.objective == doctest::Approx(cold.objective));
      if (cold.status != Status::optimal) break;
    }
  }
}

TEST_CASE("bound changes, added columns and row removal") {
  LinearProgram lp;
  lp.cost = Vector::Constant(3, -1.0);
  lp.lower = Vector::Zero(3);
  lp.upper = Vector::Ones(3);
  lp.rows.push_back(make_row({1, 1, 1}, Sense::le, 2));
  lp.rows.push_back(make_row({1, 0, 0}, Sense::le, 5));
  Solver s(lp);
  CHECK(s.solve().objective == doctest::Approx(-2));
  s.set_bounds(0, 0, 0);
  s.set_bounds(1, 0, 0);
  CHECK(s.solve().objective == doctest::Approx(-1));
  s.set_bounds(0, 0, 1);
  s.set_bounds(1, 0, 1);
  int j = s.add_column(-3.0, 0.0, 1.0, {{0, 1.0}});
  LpSolution a = s.solve();
  CHECK(a.objective == doctest::Approx(-4));
  CHECK(a.x[j] == doctest::Approx(1));
  CHECK(s.slack_basic(1));
  CHECK(s.remove_rows({1}) == 1);
  CHECK(s.rows() == 1);
  CHECK(s.solve().objective == doctest::Approx(-4));
}

TEST_CASE("removing several rows keeps the solver consistent") {
  std::mt19937 rng(21);
  for (int t = 0; t < 100; ++t) {
    int n = 2 + t % 4;
    LinearProgram lp = random_lp(rng, n, 3 + t % 8);
    Solver s(lp);
    LpSolution first = s.solve();
    if (first.status != Status::optimal) continue;
    std::vector<int> drop;
    for (int i = 0; i < s.rows(); ++i)
      if (rng() % 2) drop.push_back(i);
    std::vector<char> kept(s.rows(), 1);
    int removable = 0;
    for (int i : drop)
      if (s.slack_basic(i)) {
        kept[i] = 0;
        ++removable;
      }
    CHECK(s.remove_rows(drop) == removable);
    LinearProgram reduced = lp;
    reduced.rows.clear();
    for (size_t i = 0; i < lp.rows.size(); ++i)
      if (kept[i]) reduced.rows.push_back(lp.rows[i]);
    REQUIRE(s.rows() == static_cast<int>(reduced.rows.size()));
    LpSolution warm = s.solve();
    std::optional<double> want = vertex_oracle(reduced);
    REQUIRE(want);
    REQUIRE(warm.status == Status::optimal);
    CHECK(std::abs(warm.objective - *want) <= 1e-6 * (1 + std::abs(*want)));
    // dropping only non-binding rows leaves the optimum unchanged
    CHECK(std::abs(warm.objective - first.objective) <= 1e-6 * (1 + std::abs(first.objective)));
  }
}

TEST_CASE("Bland's rule keeps degenerate problems correct") {
  // Beale's cycling example, with Bland forced from the first degenerate pivot.
  LinearProgram lp;
  lp.cost.resize(4);
  lp.cost << -0.75, 20, -0.5, 6;
  lp.lower = Vector::Zero(4);
  lp.upper = Vector::Constant(4, 100);
  lp.rows.push_back(make_row({0.25, -8, -1, 9}, Sense::le, 0));
  lp.rows.push_back(make_row({0.5, -12, -0.5, 3}, Sense::le, 0));
  lp.rows.push_back(make_row({0, 0, 1, 0}, Sense::le, 1));
  Settings st;
  st.bland_threshold = 1;
  Solver s(lp, st);
  LpSolution sol = s.solve();
  REQUIRE(sol.status == Status::optimal);
  CHECK(sol.objective == doctest::Approx(*vertex_oracle(lp)));
}
