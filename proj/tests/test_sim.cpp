#include <doctest.h>

#include <cmath>
#include <vector>

#include "pnd/linalg.hpp"
#include "pnd/maxflow.hpp"
#include "pnd/sim.hpp"

using namespace pnd;

namespace {

std::vector<char> design_of(const NetworkInstance& net, std::initializer_list<int> arcs) {
  std::vector<char> x(net.arc_count(), 0);
  for (int a : arcs) x[a] = 1;
  return x;
}

const std::initializer_list<int> kFig1a{1, 3, 4, 11, 14};
const std::initializer_list<int> kFig1d{0, 1, 3, 4, 8, 11, 14};

}  // namespace

TEST_CASE("deterministic capacities meeting demand give full service") {
  NetworkInstance net = table1_instance();
  Matrix zero = Matrix::Zero(net.arc_count(), net.arc_count());
  NetworkInstance det(net.node_count(), net.source(), net.sink(), net.demand(), net.arcs(), net.mu(), zero);
  SimOptions opt;
  opt.samples = 500;
  SimReport r = simulate(det, design_of(det, kFig1a), opt);
  CHECK(r.service_level == 1.0);
  CHECK(r.min_cut_min == doctest::Approx(r.min_cut_max));
  CHECK(r.min_cut_min >= det.demand());
}

TEST_CASE("table 1 designs") {
  NetworkInstance net = table1_instance();
  SimOptions opt;
  opt.samples = 10000;
  opt.seed = 7;
  SimReport a = simulate(net, design_of(net, kFig1a), opt);
  CHECK(std::abs(a.service_level - 0.3981) <= 0.015);
  CHECK(std::abs(a.min_cut_mean - 222.1) <= 2.0);
  CHECK(a.min_cut_min <= a.min_cut_mean);
  CHECK(a.min_cut_mean <= a.min_cut_max);
  SimReport d = simulate(net, design_of(net, kFig1d), opt);
  CHECK(std::abs(d.service_level - 0.9968) <= 0.005);
  CHECK(std::abs(d.min_cut_max - 356.4) <= 6.0);
}

TEST_CASE("sampler moments") {
  NetworkInstance net = table1_instance();
  const int m = net.arc_count();
  Matrix chol = cholesky(net.cov());
  CHECK((chol * chol.transpose() - net.cov()).cwiseAbs().maxCoeff() < 1e-6);
  const long n = 100000;
  Vector sum = Vector::Zero(m);
  Matrix sq = Matrix::Zero(m, m);
  for (long s = 0; s < n; ++s) {
    Vector c = sample_capacities(net, chol, 3, s);
    sum += c;
    sq += (c - net.mu()) * (c - net.mu()).transpose();
  }
  Vector mean = sum / n;
  Matrix cov = sq / n;
  CHECK((mean.array() / net.mu().array() - 1.0).abs().maxCoeff() <= 0.005);
  CHECK((cov - net.cov()).norm() / net.cov().norm() <= 0.05);
  for (int a = 0; a < m; ++a) {
    double sd = std::sqrt(net.cov()(a, a));
    CHECK(std::abs(mean[a] - net.mu()[a]) <= 5 * sd / std::sqrt(double(n)) + 1e-9);
    for (int b = 0; b < m; ++b) {
      double sb = std::sqrt(net.cov()(b, b));
      CHECK(std::abs(cov(a, b) - net.cov()(a, b)) <= 0.02 * sd * sb + 1e-9);
    }
  }
}

TEST_CASE("service level varies across seeds within its standard error") {
  NetworkInstance net = table1_instance();
  SimOptions opt;
  opt.samples = 4000;
  opt.seed = 100;
  auto x = design_of(net, kFig1a);
  const double p = simulate(net, x, opt).service_level;
  const double se = std::sqrt(p * (1 - p) / opt.samples);
  for (std::uint64_t seed = 101; seed < 106; ++seed) {
    opt.seed = seed;
    CHECK(std::abs(simulate(net, x, opt).service_level - p) <= 3 * std::sqrt(2.0) * se);
  }
}

TEST_CASE("results do not depend on the worker count") {
  NetworkInstance net = table1_instance();
  SimOptions opt;
  opt.samples = 3001;
  opt.keep_values = true;
  SimReport one = simulate(net, design_of(net, kFig1d), opt);
  opt.workers = 4;
  SimReport four = simulate(net, design_of(net, kFig1d), opt);
  CHECK(one.service_level == four.service_level);
  CHECK(one.values == four.values);
  CHECK(one.truncated == four.truncated);
}

TEST_CASE("per-sample values match an independent max flow") {
  NetworkInstance net = table1_instance();
  SimOptions opt;
  opt.samples = 50;
  opt.seed = 11;
  opt.keep_values = true;
  auto x = design_of(net, kFig1a);
  SimReport r = simulate(net, x, opt);
  Matrix chol = cholesky(net.cov());
  for (long s = 0; s < opt.samples; ++s) {
    Vector c = sample_capacities(net, chol, opt.seed, s);
    std::vector<double> cap(net.arc_count());
    for (int a = 0; a < net.arc_count(); ++a) cap[a] = x[a] ? std::max(0.0, c[a]) : 0.0;
    CHECK(r.values[s] == doctest::Approx(max_flow_min_cut(net, cap).value));
  }
}

TEST_CASE("disconnected design serves nothing") {
  NetworkInstance net = table1_instance();
  SimOptions opt;
  opt.samples = 100;
  SimReport r = simulate(net, design_of(net, {0, 1}), opt);
  CHECK_FALSE(r.connected);
  CHECK(r.service_level == 0.0);
}

TEST_CASE("tradeoff curve") {
  NetworkInstance net = table1_instance();
  SolveConfig base;
  SimOptions opt;
  opt.samples = 2000;
  auto rows = tradeoff_curve(net, {0.5, 0.3, 0.1, 0.025}, OmegaModel::normal, base, opt);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].cost == 307);
  CHECK(rows[0].cost_ratio == doctest::Approx(100.0));
  for (size_t k = 1; k < rows.size(); ++k) {
    CHECK(rows[k].cost >= rows[k - 1].cost);
    CHECK(rows[k].omega > rows[k - 1].omega);
  }
  CHECK(rows.back().cost == 414);
  CHECK(rows.back().sim.service_level > rows.front().sim.service_level);
  CHECK(tradeoff_csv_row(rows[0]).rfind("0.5,0.000000,0.5000,307,100.00,", 0) == 0);
}
