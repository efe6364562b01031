#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "pnd/mip.hpp"

using namespace pnd;

namespace {

lp::Row dense_row(const std::vector<double>& c, lp::Sense s, double rhs) {
  lp::Row r;
  for (int j = 0; j < static_cast<int>(c.size()); ++j) {
    r.index.push_back(j);
    r.value.push_back(c[j]);
  }
  r.sense = s;
  r.rhs = rhs;
  return r;
}

}  // namespace

TEST_CASE("random binary programs against enumeration") {
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> u(-9, 9);
  for (int t = 0; t < 60; ++t) {
    const int n = 3 + t % 6;
    mip::Problem p;
    p.lp.cost.resize(n);
    p.lp.lower = Vector::Zero(n);
    p.lp.upper = Vector::Ones(n);
    p.integer.assign(n, 1);
    for (int j = 0; j < n; ++j) p.lp.cost[j] = u(rng);
    for (int i = 0; i < 3; ++i) {
      std::vector<double> c(n);
      for (double& v : c) v = u(rng);
      p.lp.rows.push_back(dense_row(c, i % 2 ? lp::Sense::ge : lp::Sense::le, u(rng) / 2.0));
    }
    double best = lp::kInf;
    for (int bits = 0; bits < (1 << n); ++bits) {
      std::vector<double> x(n);
      for (int j = 0; j < n; ++j) x[j] = (bits >> j) & 1;
      bool ok = true;
      for (const lp::Row& r : p.lp.rows) {
        double a = r.activity(x);
        if (r.sense == lp::Sense::le && a > r.rhs + 1e-9) ok = false;
        if (r.sense == lp::Sense::ge && a < r.rhs - 1e-9) ok = false;
      }
      if (!ok) continue;
      double v = 0;
      for (int j = 0; j < n; ++j) v += p.lp.cost[j] * x[j];
      best = std::min(best, v);
    }
    mip::BranchAndCut bc(p);
    mip::Result r = bc.solve();
    if (std::isinf(best)) {
      CHECK(r.status == mip::Status::infeasible);
    } else {
      REQUIRE(r.status == mip::Status::optimal);
      CHECK(r.objective == doctest::Approx(best));
      CHECK(r.root_bound <= r.objective + 1e-6);
    }
  }
}

TEST_CASE("lazy constraints through the separator") {
  // min sum x over 5 binaries subject to lazily generated x_i + x_j >= 1 on a 5-cycle
  const int n = 5;
  mip::Problem p;
  p.lp.cost = Vector::Ones(n);
  p.lp.lower = Vector::Zero(n);
  p.lp.upper = Vector::Ones(n);
  p.integer.assign(n, 1);
  mip::BranchAndCut bc(p);
  int calls = 0;
  bc.set_separator([&](const Vector& x, bool, mip::CutContext& ctx) {
    ++calls;
    for (int i = 0; i < n; ++i) {
      int j = (i + 1) % n;
      if (x[i] + x[j] < 1 - 1e-6) {
        lp::Row r;
        r.index = {i, j};
        r.value = {1, 1};
        r.sense = lp::Sense::ge;
        r.rhs = 1;
        ctx.add_cut(r, 7);
      }
    }
  });
  int incumbents = 0;
  bc.on_incumbent([&](const Vector&, double) { ++incumbents; });
  mip::Result r = bc.solve();
  REQUIRE(r.status == mip::Status::optimal);
  CHECK(r.objective == doctest::Approx(3));
  CHECK(r.root_bound == doctest::Approx(2.5));
  CHECK(r.cuts == 5);
  CHECK(r.cuts_by_family[7] == 5);
  CHECK(incumbents >= 1);
  CHECK(calls > 0);
}

TEST_CASE("columns added by the separator") {
  // min -y with y <= x0, y <= x1 added when first separated, x0 + x1 <= 1
  mip::Problem p;
  p.lp.cost = Vector::Zero(2);
  p.lp.lower = Vector::Zero(2);
  p.lp.upper = Vector::Ones(2);
  p.integer.assign(2, 1);
  p.lp.rows.push_back(dense_row({1, 1}, lp::Sense::le, 1));
  mip::BranchAndCut bc(p);
  int y = -1;
  bc.set_separator([&](const Vector&, bool, mip::CutContext& ctx) {
    if (y >= 0) return;
    y = ctx.add_column(-1.0, 0.0, 1.0);
    for (int j = 0; j < 2; ++j) {
      lp::Row r;
      r.index = {y, j};
      r.value = {1, -1};
      r.rhs = 0;
      ctx.add_cut(r);
    }
  });
  mip::Result r = bc.solve();
  REQUIRE(r.status == mip::Status::optimal);
  CHECK(r.objective == doctest::Approx(0));
}

TEST_CASE("node limit reports the open bound") {
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> w(20, 60);
  const int n = 20;
  mip::Problem p;
  p.lp.cost.resize(n);
  p.lp.lower = Vector::Zero(n);
  p.lp.upper = Vector::Ones(n);
  p.integer.assign(n, 1);
  std::vector<double> a(n);
  for (int j = 0; j < n; ++j) {
    a[j] = w(rng);
    p.lp.cost[j] = -(a[j] + w(rng) % 7);
  }
  p.lp.rows.push_back(dense_row(a, lp::Sense::le, 301.5));
  mip::Settings s;
  s.node_limit = 3;
  mip::BranchAndCut bc(p, s);
  mip::Result r = bc.solve();
  CHECK(r.status == mip::Status::node_limit);
  CHECK(r.nodes == 3);
  CHECK(r.best_bound <= r.objective);
}
