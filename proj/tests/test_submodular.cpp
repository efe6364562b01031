#include <doctest.h>

#include <cmath>
#include <vector>

#include "pnd/capacity_model.hpp"
#include "pnd/network.hpp"
#include "pnd/submodular.hpp"

using namespace pnd;

TEST_CASE("variance of independent arcs is modular, sqrt of it submodular") {
  Vector s2(4);
  s2 << 1, 4, 9, 2;
  Matrix cov = s2.asDiagonal();
  CapacityModel m(Vector::Constant(4, 10.0), cov, 1.0, 5.0);
  SetFunction var(4, [&](std::span<const char> in) { return m.variance_of_set(in); });
  CHECK(certify_modularity(var).kind == Modularity::modular);
  SetFunction sq(4, [&](std::span<const char> in) { return std::sqrt(m.variance_of_set(in)); });
  auto c = certify_modularity(sq);
  CHECK(c.kind == Modularity::submodular);
  REQUIRE(c.not_supermodular);
  CHECK(c.not_supermodular->rho_smaller > c.not_supermodular->rho_larger);
}

TEST_CASE("neither") {
  SetFunction g(3, [](std::span<const char> in) {
    int k = in[0] + in[1] + in[2];
    return k == 2 ? 5.0 : double(k);
  });
  CHECK(certify_modularity(g).kind == Modularity::neither);
}

TEST_CASE("greedy vertex and polymatroid separation") {
  // g(S) = min(|S|, 2)
  SetFunction g(3, [](std::span<const char> in) {
    return std::min(2.0, double(in[0] + in[1] + in[2]));
  });
  std::vector<int> order{2, 0, 1};
  PolymatroidVertex v = greedy_vertex(g, order);
  CHECK(v.v[2] == 1);
  CHECK(v.v[0] == 1);
  CHECK(v.v[1] == 0);
  CHECK(v.consistent(g));
  std::vector<double> x{0.9, 0.9, 0.5};
  PolymatroidSeparation sep = separate_polymatroid(x, g, 1.5);
  CHECK(sep.vertex.order == std::vector<int>{0, 1, 2});
  CHECK(sep.violation == doctest::Approx(0.3));
  SetFunction off(1, [](std::span<const char> in) { return 1.0 + in[0]; });
  std::vector<int> one{0};
  CHECK_THROWS_AS(greedy_vertex(off, one), std::domain_error);
  CHECK(greedy_vertex(off.shifted(), one).v[0] == 1.0);
}

TEST_CASE("nw inequalities underestimate a supermodular function") {
  SetFunction theta(2, [](std::span<const char> in) { return -std::sqrt(double(in[0] + in[1])); });
  std::vector<char> none{0, 0};
  NwInequality ineq = nw_inequality(theta, none, NwVariant::submod1);
  CHECK(ineq.constant == doctest::Approx(0));
  CHECK(ineq.coef[0] == doctest::Approx(-1));
  CHECK(ineq.coef[1] == doctest::Approx(-1));

  // exhaustive validity on a random-ish supermodular function
  Vector a(4);
  a << 3, 1, 4, 2;
  SetFunction h(4, [&](std::span<const char> in) {
    double s = 0;
    for (int i = 0; i < 4; ++i) s += a[i] * in[i];
    return 5.0 - std::sqrt(1.0 + s) + 0.5 * in[0];
  });
  REQUIRE(certify_modularity(h).supermodular);
  for (auto variant : {NwVariant::submod1, NwVariant::submod2}) {
    for (int sb = 0; sb < 16; ++sb) {
      std::vector<char> s(4);
      for (int k = 0; k < 4; ++k) s[k] = (sb >> k) & 1;
      NwInequality w = nw_inequality(h, s, variant);
      for (int zb = 0; zb < 16; ++zb) {
        std::vector<char> z(4);
        std::vector<double> zd(4);
        for (int k = 0; k < 4; ++k) zd[k] = z[k] = (zb >> k) & 1;
        CHECK(h(z) >= w.evaluate(zd) - 1e-9);
        if (zb == sb) CHECK(h(z) == doctest::Approx(w.evaluate(zd)));
      }
    }
  }
}
