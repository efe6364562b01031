#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "pnd/cqnd.hpp"
#include "pnd/instgen.hpp"
#include "pnd/omega.hpp"

using namespace pnd;
using namespace pnd::oracle;

namespace {

SolveConfig config(double omega, const char* cuts = "none") {
  SolveConfig c;
  c.omega = omega;
  c.cuts = CutFamilies::parse(cuts);
  return c;
}

}  // namespace

TEST_CASE("table 1 designs") {
  NetworkInstance net = table1_instance();
  auto a = solve_cqnd(net, config(0.0));
  CHECK(a.stats.status == "optimal");
  CHECK(a.design.cost == doctest::Approx(307));
  CHECK(a.design.arcs() == std::vector<int>{1, 3, 4, 11, 14});
  CHECK(a.design.certified);
  CHECK(a.design.worst_slack == doctest::Approx(3.0));

  auto d = solve_cqnd(net, config(omega_from_epsilon(OmegaModel::normal, 0.025), "polymatroid,cover,aggregate"));
  CHECK(d.design.cost == doctest::Approx(414));
  CHECK(d.design.certified);

  auto f = solve_cqnd(net, config(omega_from_epsilon(OmegaModel::normal, 0.001), "pack,xpack"));
  CHECK(f.design.cost == doctest::Approx(570));
  CHECK(f.design.arcs().size() == 9);
}

TEST_CASE("every cut set reaches the same optimum") {
  NetworkInstance net = table1_instance();
  const double omega = omega_from_epsilon(OmegaModel::normal, 0.2);
  for (const char* cuts : {"none", "pack", "xpack", "polymatroid", "polymatroid,cover", "polymatroid,aggregate",
                           "pack,xpack,polymatroid,cover,aggregate"}) {
    INFO(cuts);
    auto r = solve_cqnd(net, config(omega, cuts));
    CHECK(r.design.cost == doctest::Approx(389));
    CHECK(r.stats.rgap >= 0.0);
  }
}

TEST_CASE("separation strategies reach the same optimum") {
  NetworkInstance net = table1_instance();
  for (SepStrategy s : {SepStrategy::enumeration, SepStrategy::bqc, SepStrategy::mc, SepStrategy::qcqp,
                        SepStrategy::nw}) {
    auto c = config(omega_from_epsilon(OmegaModel::normal, 0.025));
    c.separation = s;
    INFO(to_string(s));
    CHECK(solve_cqnd(net, c).design.cost == doctest::Approx(414));
  }
}

TEST_CASE("solver matches design enumeration") {
  int checked = 0;
  long general_covers = 0;
  for (int seed = 1; checked < 24 && seed < 300; ++seed) {
    GenSpec g;
    g.nodes = 6 + seed % 2;
    g.seed = seed;
    g.regime = static_cast<Regime>(seed % 3);
    g.omega = 1.0 + seed % 3;
    NetworkInstance net = generate(g);
    if (net.arc_count() > 14) continue;
    double oracle = brute_force_cost(net, g.omega);
    for (const char* cuts : {"none", "pack,xpack,polymatroid,cover,aggregate"}) {
      auto r = solve_cqnd(net, config(g.omega, cuts));
      INFO(net.id(), " ", cuts);
      if (std::isinf(oracle)) {
        CHECK(r.stats.status == "infeasible");
      } else {
        CHECK(r.stats.status == "optimal");
        CHECK(r.design.cost == doctest::Approx(oracle));
        CHECK(r.design.certified);
      }
      if (g.regime == Regime::general) general_covers += r.stats.covers;
    }
    ++checked;
  }
  CHECK(checked == 24);
  CHECK(general_covers > 0);
}

TEST_CASE("cost grows with omega") {
  GenSpec g;
  g.nodes = 7;
  g.regime = Regime::correlated;
  g.seed = 5;
  g.omega = 2.0;
  NetworkInstance net = generate(g);
  double last = 0.0;
  for (double om : {0.0, 0.5, 1.0, 1.5, 2.0}) {
    auto r = solve_cqnd(net, config(om, "polymatroid,cover"));
    double cost = r.stats.status == "infeasible" ? INFINITY : r.design.cost;
    CHECK(cost >= last - 1e-9);
    last = cost;
  }
}

TEST_CASE("infeasible instance") {
  NetworkInstance net = table1_instance().with_demand(1000.0);
  auto r = solve_cqnd(net, config(1.0));
  CHECK(r.stats.status == "infeasible");
  CHECK(r.design.x.empty());
}

TEST_CASE("deterministic instance with integral root") {
  // one arc s->t whose mean equals the demand
  NetworkInstance net(2, 0, 1, 5.0, {{0, 1, 3.0}}, Vector::Constant(1, 5.0), Matrix::Zero(1, 1));
  auto r = solve_cqnd(net, config(0.0));
  CHECK(r.design.cost == doctest::Approx(3.0));
  CHECK(r.stats.rgap == doctest::Approx(0.0));
}

TEST_CASE("cut family parsing and config checks") {
  auto f = CutFamilies::parse("polymatroid, cover,aggregate");
  CHECK(f.polymatroid);
  CHECK(f.cover);
  CHECK(f.aggregate);
  CHECK_FALSE(f.pack);
  CHECK(f.str() == "polymatroid,cover,aggregate");
  CHECK(CutFamilies::parse("none").str() == "none");
  CHECK_THROWS_AS(CutFamilies::parse("gomory"), std::invalid_argument);
  SolveConfig c;
  c.node_limit = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = SolveConfig{};
  c.branching = "random";
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("csv row") {
  NetworkInstance net = table1_instance();
  auto c = config(0.0);
  auto r = solve_cqnd(net, c);
  std::string row = csv_row(net, c, r, false);
  CHECK(row.rfind("table1,6,15,", 0) == 0);
  CHECK(row.find(",307,") != std::string::npos);
  CHECK(row.find(",optimal,") != std::string::npos);
  CHECK(csv_header(false) == "instance,n,m,beta,omega,cost,rgap,cuts,covers,nodes,status,egap");
  CHECK(csv_row(net, c, solve_cqnd(net, c), false) == row);
}

TEST_CASE("limits report an end gap") {
  GenSpec g;
  g.nodes = 9;
  g.seed = 2;
  g.omega = 3.0;
  NetworkInstance net = generate(g);
  auto c = config(3.0);
  c.node_limit = 2;
  auto r = solve_cqnd(net, c);
  if (r.stats.status == "node-limit" && !r.design.x.empty()) {
    REQUIRE(r.stats.egap);
    CHECK(*r.stats.egap >= 0.0);
  }
  CHECK(r.stats.nodes <= 2);
}
