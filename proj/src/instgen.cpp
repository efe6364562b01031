#include "pnd/instgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>
#include <stdexcept>

#include <Eigen/QR>

#include "pnd/maxflow.hpp"
#include "pnd/rng.hpp"
#include "pnd/separation.hpp"

namespace pnd {

Regime parse_regime(std::string_view name) {
  if (name == "independent") return Regime::independent;
  if (name == "correlated") return Regime::correlated;
  if (name == "general") return Regime::general;
  throw std::invalid_argument("unknown regime '" + std::string(name) + "'");
}

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::independent: return "independent";
    case Regime::correlated: return "correlated";
    case Regime::general: return "general";
  }
  return "unknown";
}

void GenSpec::validate() const {
  if (nodes < 3) throw std::invalid_argument("generate: need at least 3 nodes");
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("generate: beta must lie in (0, 1)");
  if (omega < 0.0) throw std::invalid_argument("generate: omega must be non-negative");
  if (cost_low > cost_high) throw std::invalid_argument("generate: empty cost range");
}

std::string GenSpec::id() const {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%s-n%d-b%g-o%g-s%llu", std::string(to_string(regime)).c_str(), nodes, beta,
                omega, static_cast<unsigned long long>(seed));
  return buf;
}

namespace {

struct Topology {
  std::vector<Arc> arcs;
};

Topology random_topology(int n, RngStream& rng) {
  std::set<std::pair<int, int>> present;
  const double p = 1.0 / std::sqrt(static_cast<double>(n));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.uniform() < p) present.emplace(i, j);
  // path s -> random permutation of internal nodes -> t
  std::vector<int> inner;
  for (int v = 1; v < n - 1; ++v) inner.push_back(v);
  for (int k = static_cast<int>(inner.size()) - 1; k > 0; --k)
    std::swap(inner[k], inner[rng.below(static_cast<std::uint64_t>(k) + 1)]);
  std::vector<int> path{0};
  path.insert(path.end(), inner.begin(), inner.end());
  path.push_back(n - 1);
  for (size_t k = 0; k + 1 < path.size(); ++k) present.emplace(path[k], path[k + 1]);
  Topology t;
  for (auto [i, j] : present) t.arcs.push_back({i, j, 0.0});
  return t;
}

Matrix random_correlation(int m, RngStream& rng) {
  Matrix g(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  Vector lambda(m);
  for (int i = 0; i < m; ++i) lambda[i] = rng.uniform();
  lambda.array() += 0.5 * lambda.maxCoeff();
  Matrix s = q * lambda.asDiagonal() * q.transpose();
  Vector inv = s.diagonal().cwiseSqrt().cwiseInverse();
  Matrix r = inv.asDiagonal() * s * inv.asDiagonal();
  r = 0.5 * (r + r.transpose());
  r.diagonal().setOnes();
  return r;
}

void fill_capacities(const GenSpec& spec, int m, RngStream& rng, Vector& mu, Matrix& cov) {
  mu.resize(m);
  cov = Matrix::Zero(m, m);
  const double om = spec.omega;
  if (spec.regime == Regime::independent) {
    for (int a = 0; a < m; ++a) {
      mu[a] = rng.uniform(0.0, 100.0);
      double s = rng.uniform(0.0, om > 0 ? mu[a] / om : mu[a]);
      cov(a, a) = s * s;
    }
    return;
  }
  Matrix r = random_correlation(m, rng);
  Vector sigma(m);
  for (int a = 0; a < m; ++a) sigma[a] = rng.uniform(0.0, om > 0 ? 50.0 / om : 50.0);
  cov = sigma.asDiagonal() * r * sigma.asDiagonal();
  cov = 0.5 * (cov + cov.transpose());
  const double scale = om > 0 ? om : 1.0;
  for (int a = 0; a < m; ++a) {
    if (spec.regime == Regime::correlated) mu[a] = rng.uniform(scale * sigma[a], 2.0 * scale * sigma[a]);
    else mu[a] = rng.uniform(0.0, 2.0 * scale * sigma[a]);
  }
}

double mean_max_flow(int n, int s, int t, const std::vector<Arc>& arcs, const Vector& mu) {
  MaxFlow mf(n, s, t);
  for (const Arc& a : arcs) mf.add_arc(a.tail, a.head);
  return mf.solve(std::span<const double>(mu.data(), mu.size()));
}

inline constexpr int kMaxRedraws = 100;

// min over cuts of mu'z - omega sqrt(z'Sigma z) with every arc built
double robust_flow(int n, const std::vector<Arc>& arcs, const Vector& mu, const Matrix& cov, double omega) {
  if (omega <= 0) return mean_max_flow(n, 0, n - 1, arcs, mu);
  NetworkInstance probe(n, 0, n - 1, 0.0, arcs, mu, cov);
  std::vector<double> ones(arcs.size(), 1.0);
  SeparationProblem p = SeparationProblem::make(probe, ones, omega);
  SepOptions opt;
  opt.exact_minimum = true;
  SeparationResult r = n - 2 <= opt.enumeration_limit ? separate_enumeration(p, opt)
                                                       : separate(p, SepStrategy::bqc, opt);
  return r.cut ? r.theta : 0.0;
}

// redraws capacities until the full network has a positive robust flow
double draw_capacities(const GenSpec& spec, int n, const std::vector<Arc>& arcs, RngStream& rng, Vector& mu,
                       Matrix& cov) {
  const int m = static_cast<int>(arcs.size());
  double phi = 0.0;
  for (int k = 0; k < kMaxRedraws; ++k) {
    fill_capacities(spec, m, rng, mu, cov);
    phi = robust_flow(n, arcs, mu, cov, spec.omega);
    if (phi > 0) return phi;
  }
  throw std::runtime_error("instgen: no draw with positive robust flow for " + spec.id());
}

std::uint64_t spec_seed(const GenSpec& spec, std::uint64_t salt) {
  std::uint64_t h = spec.seed * 0x100000001B3ull + salt;
  auto mix = [&](double v) { h = h * 0x9E3779B97F4A7C15ull + static_cast<std::uint64_t>(std::llround(v * 1e6)); };
  mix(spec.omega);
  mix(spec.beta);
  return h;
}

}  // namespace

NetworkInstance generate(const GenSpec& spec) {
  spec.validate();
  RngStream rng(spec_seed(spec, static_cast<std::uint64_t>(spec.regime) * 7919 +
                                    static_cast<std::uint64_t>(spec.nodes)));
  const int n = spec.nodes;
  Topology topo = random_topology(n, rng);
  for (Arc& a : topo.arcs) a.cost = std::floor(rng.uniform(spec.cost_low, spec.cost_high + 1.0));
  for (Arc& a : topo.arcs) a.cost = std::min(a.cost, spec.cost_high);
  Vector mu;
  Matrix cov;
  double phi = draw_capacities(spec, n, topo.arcs, rng, mu, cov);
  NetworkInstance inst(n, 0, n - 1, spec.beta * phi, topo.arcs, mu, cov);
  inst.set_id(spec.id());
  inst.set_beta(spec.beta);
  return inst;
}

double great_circle_km(double lat1, double lon1, double lat2, double lon2) {
  const double r = 6371.0;
  const double k = std::numbers::pi / 180.0;
  double dlat = (lat2 - lat1) * k, dlon = (lon2 - lon1) * k;
  double h = std::sin(dlat / 2) * std::sin(dlat / 2) +
             std::cos(lat1 * k) * std::cos(lat2 * k) * std::sin(dlon / 2) * std::sin(dlon / 2);
  return 2.0 * r * std::asin(std::min(1.0, std::sqrt(h)));
}

NetworkInstance generate_from_cities(const nlohmann::json& cities, const GenSpec& spec) {
  if (!cities.contains("cities") || !cities["cities"].is_array())
    throw SchemaError("cities: missing array field 'cities'");
  const auto& list = cities["cities"];
  const int n = static_cast<int>(list.size());
  GenSpec s = spec;
  s.nodes = n;
  s.validate();
  std::vector<double> lat(n), lon(n);
  for (int i = 0; i < n; ++i) {
    if (!list[i].contains("lat") || !list[i].contains("lon"))
      throw SchemaError("cities[" + std::to_string(i) + "]: missing 'lat' or 'lon'");
    lat[i] = list[i]["lat"].get<double>();
    lon[i] = list[i]["lon"].get<double>();
  }
  const int src = cities.value("source", 0);
  const int snk = cities.value("sink", n - 1);
  if (src < 0 || src >= n || snk < 0 || snk >= n || src == snk)
    throw SchemaError("cities: source/sink out of range");
  // relabel so that the source is 0 and the sink n-1, keeping the other order
  std::vector<int> order{src};
  for (int i = 0; i < n; ++i)
    if (i != src && i != snk) order.push_back(i);
  order.push_back(snk);
  RngStream rng(spec_seed(s, 0xC17E5ull));
  Topology topo = random_topology(n, rng);
  for (Arc& a : topo.arcs) {
    int u = order[a.tail], v = order[a.head];
    a.cost = great_circle_km(lat[u], lon[u], lat[v], lon[v]);
  }
  Vector mu;
  Matrix cov;
  double phi = draw_capacities(s, n, topo.arcs, rng, mu, cov);
  NetworkInstance inst(n, 0, n - 1, s.beta * phi, topo.arcs, mu, cov);
  inst.set_id("cities-" + s.id());
  inst.set_beta(s.beta);
  return inst;
}

std::vector<GenSpec> grid(Regime regime, const std::vector<int>& nodes, const std::vector<double>& betas,
                          const std::vector<double>& omegas, int seeds) {
  std::vector<GenSpec> out;
  for (int n : nodes)
    for (double b : betas)
      for (double o : omegas)
        for (int s = 1; s <= seeds; ++s) {
          GenSpec g;
          g.nodes = n;
          g.beta = b;
          g.omega = o;
          g.regime = regime;
          g.seed = static_cast<std::uint64_t>(s);
          out.push_back(g);
        }
  return out;
}

std::vector<GenSpec> named_grid(std::string_view name) {
  const std::vector<double> betas{0.3, 0.5, 0.7};
  const std::vector<double> omegas{1.0, 3.0, 5.0};
  auto pick = [&](std::string_view regime, int n) { return grid(parse_regime(regime), {n}, betas, omegas, 5); };
  if (name.starts_with("paper-")) return pick(name.substr(6), 10);
  if (name.starts_with("small-")) return pick(name.substr(6), 6);
  throw std::invalid_argument("unknown grid '" + std::string(name) + "'");
}

double positive_beta_fraction(const NetworkInstance& inst, double omega) {
  const int m = inst.arc_count();
  long pos = 0, total = 0;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      ++total;
      if (omega * omega * inst.cov()(i, j) - inst.mu()[i] * inst.mu()[j] > 0) ++pos;
    }
  return total ? static_cast<double>(pos) / total : 0.0;
}

}  // namespace pnd
