#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "pnd/instgen.hpp"
#include "pnd/maxflow.hpp"
#include "pnd/network.hpp"
#include "pnd/omega.hpp"
#include "pnd/separation.hpp"

using namespace pnd;

namespace {

std::vector<double> design(const NetworkInstance& net, std::initializer_list<int> arcs) {
  std::vector<double> x(net.arc_count(), 0.0);
  for (int a : arcs) x[a] = 1.0;
  return x;
}

// theta of one cut from scratch
double theta_direct(const NetworkInstance& net, const std::vector<double>& x, double omega, const Cut& c) {
  double m = 0, v = 0;
  for (int a : c.arc_ids) {
    m += x[a] * net.mu()[a];
    for (int b : c.arc_ids) v += x[a] * x[b] * net.cov()(a, b);
  }
  return m - omega * std::sqrt(std::max(0.0, v));
}

std::vector<double> random_xbar(std::mt19937& rng, int m) {
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> x(m);
  for (double& v : x) {
    double r = u(rng);
    v = r < 0.2 ? 0.0 : r < 0.4 ? 1.0 : u(rng);
  }
  return x;
}

}  // namespace

TEST_CASE("theta of the source cut on table 1") {
  NetworkInstance net = table1_instance();
  std::vector<double> x(net.arc_count(), 1.0);
  auto p = SeparationProblem::make(net, x, 1.95996);
  std::vector<char> side(6, 0);
  side[0] = 1;
  Cut c = Cut::from_source_side(net, side);
  CHECK(eval_theta(p, c) == doctest::Approx(337 - 1.95996 * std::sqrt(994.0)).epsilon(1e-12));
  CHECK(eval_theta(p, c) == doctest::Approx(275.21).epsilon(1e-4));
}

TEST_CASE("inconsistent labels are rejected") {
  NetworkInstance net = table1_instance();
  std::vector<double> x(net.arc_count(), 1.0);
  auto p = SeparationProblem::make(net, x, 1.0);
  std::vector<char> w{1, 0, 0, 0, 0, 0};
  std::vector<char> z(net.arc_count(), 0);
  CHECK_THROWS_AS(eval_theta(p, z, w), std::domain_error);
  for (int a = 0; a < 5; ++a) z[a] = 1;
  CHECK_NOTHROW(eval_theta(p, z, w));
  std::vector<char> bad_w{0, 0, 0, 0, 0, 0};
  CHECK_THROWS_AS(eval_theta(p, z, bad_w), std::domain_error);
}

TEST_CASE("deterministic min cut of the 50 percent design") {
  NetworkInstance net = table1_instance();
  auto x = design(net, {1, 3, 4, 11, 14});
  auto p = SeparationProblem::make(net, x, 0.0);
  auto r = separate_enumeration(p);
  REQUIRE(r.cut);
  CHECK(r.theta == doctest::Approx(233.0));
  std::vector<char> expect{1, 0, 0, 0, 1, 0};
  CHECK(r.cut->source_side == expect);
  CHECK(r.status == SeparationResult::Status::none);
}

TEST_CASE("omega zero matches max flow") {
  NetworkInstance net = table1_instance();
  std::vector<double> x(net.arc_count(), 1.0);
  auto r = separate_enumeration(SeparationProblem::make(net, x, 0.0));
  std::vector<double> cap(net.mu().data(), net.mu().data() + net.arc_count());
  auto mf = max_flow_min_cut(net, cap);
  CHECK(r.theta == doctest::Approx(326.0));
  CHECK(mf.value == doctest::Approx(r.theta));
}

TEST_CASE("published designs against their own service levels") {
  NetworkInstance net = table1_instance();
  // 97.5 percent design is feasible at its omega
  auto xd = design(net, {0, 1, 3, 4, 8, 11, 14});
  auto rd = separate_enumeration(SeparationProblem::make(net, xd, 1.95996));
  CHECK(rd.status == SeparationResult::Status::none);
  CHECK(rd.theta >= 230.0);
  // 80 percent design is feasible at its omega but not at 97.5
  auto xc = design(net, {0, 1, 3, 4, 6, 11, 13, 14});
  double om80 = omega_from_epsilon(OmegaModel::normal, 0.2);
  CHECK(separate_enumeration(SeparationProblem::make(net, xc, om80)).status == SeparationResult::Status::none);
  CHECK(separate_enumeration(SeparationProblem::make(net, xc, 1.95996)).status ==
        SeparationResult::Status::violated);
}

TEST_CASE("bqc stage one returns the linear cut") {
  NetworkInstance net = table1_instance();
  auto x = design(net, {1, 3, 11, 14});
  auto p = SeparationProblem::make(net, x, 1.0);
  auto r = separate(p, SepStrategy::bqc);
  CHECK(r.status == SeparationResult::Status::violated);
  CHECK(r.linear_stage);
  REQUIRE(r.cut);
  CHECK(r.cut->consistent(net));
  CHECK(theta_direct(net, x, 1.0, *r.cut) < 230 - kViolationTol);
}

TEST_CASE("strategies agree with enumeration") {
  std::mt19937 rng(7);
  const Regime regimes[] = {Regime::independent, Regime::correlated, Regime::general};
  int checked = 0;
  for (int k = 0; k < 9; ++k) {
    GenSpec g;
    g.nodes = 8;
    g.regime = regimes[k % 3];
    g.omega = 1.0 + (k % 4);
    g.beta = 0.4 + 0.1 * (k % 3);
    g.seed = 100 + k;
    NetworkInstance net = generate(g);
    for (int t = 0; t < 4; ++t) {
      auto x = random_xbar(rng, net.arc_count());
      auto p = SeparationProblem::make(net, x, g.omega);
      auto ref = separate_enumeration(p);
      std::vector<SepStrategy> strategies{SepStrategy::mc, SepStrategy::bqc};
      if (net.is_diagonal()) {
        strategies.push_back(SepStrategy::qcqp);
        strategies.push_back(SepStrategy::nw);
      }
      for (SepStrategy s : strategies) {
        SepOptions opt;
        opt.exact_minimum = true;
        auto r = separate(p, s, opt);
        INFO("instance ", net.id(), " trial ", t, " strategy ", to_string(s));
        CHECK(r.status == ref.status);
        // bqc is a feasibility search and returns no cut when nothing is violated
        if (s == SepStrategy::bqc && r.status == SeparationResult::Status::none) continue;
        REQUIRE(r.cut);
        CHECK(r.cut->consistent(net));
        CHECK(r.theta == doctest::Approx(theta_direct(net, x, g.omega, *r.cut)).epsilon(1e-9));
        CHECK(std::abs(r.theta - ref.theta) <= 1e-6 * std::max(1.0, std::abs(ref.theta)));
        ++checked;
      }
    }
  }
  CHECK(checked > 60);
}

TEST_CASE("support restriction keeps the status") {
  std::mt19937 rng(11);
  for (int k = 0; k < 6; ++k) {
    GenSpec g;
    g.nodes = 7;
    g.regime = k % 2 ? Regime::correlated : Regime::independent;
    g.omega = 2.0;
    g.seed = 300 + k;
    NetworkInstance net = generate(g);
    auto x = random_xbar(rng, net.arc_count());
    auto full = SeparationProblem::make(net, x, g.omega, -1.0);
    auto restricted = SeparationProblem::make(net, x, g.omega, 1e-9);
    CHECK(full.support.size() == static_cast<size_t>(net.arc_count()));
    CHECK(restricted.support.size() <= full.support.size());
    for (SepStrategy s : {SepStrategy::mc, SepStrategy::bqc}) {
      CHECK(separate(full, s).status == separate(restricted, s).status);
    }
  }
}

TEST_CASE("qcqp rejects correlated data") {
  GenSpec g;
  g.nodes = 6;
  g.regime = Regime::correlated;
  NetworkInstance net = generate(g);
  std::vector<double> x(net.arc_count(), 1.0);
  auto p = SeparationProblem::make(net, x, 1.0);
  CHECK_THROWS_AS(separate_bnb(p, SepStrategy::qcqp), std::invalid_argument);
  CHECK_THROWS_AS(separate_bnb(p, SepStrategy::nw), std::invalid_argument);
}

TEST_CASE("strategy names") {
  CHECK(parse_sep_strategy("enum") == SepStrategy::enumeration);
  CHECK(parse_sep_strategy("bqc") == SepStrategy::bqc);
  CHECK_THROWS(parse_sep_strategy("sdp"));
}
