#include "pnd/network.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "pnd/config.hpp"
#include "pnd/linalg.hpp"

namespace pnd {

NetworkInstance::NetworkInstance(int nodes, int source, int sink, double demand,
                                 std::vector<Arc> arcs, Vector mu, Matrix cov)
    : nodes_(nodes),
      source_(source),
      sink_(sink),
      demand_(demand),
      arcs_(std::move(arcs)),
      mu_(std::move(mu)),
      cov_(std::move(cov)) {}

Vector NetworkInstance::costs() const {
  Vector h(arc_count());
  for (int a = 0; a < arc_count(); ++a) h[a] = arcs_[a].cost;
  return h;
}

bool NetworkInstance::is_diagonal() const {
  for (int i = 0; i < cov_.rows(); ++i)
    for (int j = 0; j < cov_.cols(); ++j)
      if (i != j && cov_(i, j) != 0.0) return false;
  return true;
}

NetworkInstance NetworkInstance::with_demand(double d) const {
  NetworkInstance copy = *this;
  copy.demand_ = d;
  return copy;
}

bool NetworkInstance::has_path(const std::vector<char>& selected) const {
  std::vector<char> seen(nodes_, 0);
  std::vector<int> stack{source_};
  seen[source_] = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    if (u == sink_) return true;
    for (int a = 0; a < arc_count(); ++a) {
      if (!selected[a] || arcs_[a].tail != u || seen[arcs_[a].head]) continue;
      seen[arcs_[a].head] = 1;
      stack.push_back(arcs_[a].head);
    }
  }
  return false;
}

void NetworkInstance::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
  if (nodes_ < 2) fail("nodes: need at least 2 nodes");
  if (source_ < 0 || source_ >= nodes_) fail("source: node id out of range");
  if (sink_ < 0 || sink_ >= nodes_) fail("sink: node id out of range");
  if (source_ == sink_) fail("source and sink must differ");
  if (!(demand_ >= 0.0) || !std::isfinite(demand_)) fail("demand: must be finite and >= 0");
  const int m = arc_count();
  if (m == 0) fail("arcs: empty arc list");
  for (int a = 0; a < m; ++a) {
    const Arc& arc = arcs_[a];
    std::string where = "arcs[" + std::to_string(a) + "]";
    if (arc.tail < 0 || arc.tail >= nodes_ || arc.head < 0 || arc.head >= nodes_)
      fail(where + ": endpoint out of range");
    if (arc.tail == arc.head) fail(where + ": self loop");
    if (!(arc.cost >= 0.0) || !std::isfinite(arc.cost)) fail(where + ".cost: must be >= 0");
  }
  if (mu_.size() != m) fail("mu: length differs from arc count");
  if (!mu_.allFinite()) fail("mu: non-finite entry");
  if (cov_.rows() != m || cov_.cols() != m) fail("cov: shape differs from arc count");
  for (int i = 0; i < m; ++i) {
    if (cov_(i, i) < 0.0) fail("cov: negative variance at arc " + std::to_string(i));
    for (int j = i + 1; j < m; ++j) {
      if (std::abs(cov_(i, j) - cov_(j, i)) > kTol.symmetry)
        fail("cov: not symmetric at (" + std::to_string(i) + "," + std::to_string(j) + ")");
      if (std::abs(cov_(i, j)) > std::sqrt(cov_(i, i) * cov_(j, j)) + kTol.symmetry)
        fail("cov: |sigma_ij| exceeds sigma_i sigma_j at (" + std::to_string(i) + "," +
             std::to_string(j) + ")");
    }
  }
  if (!is_psd(cov_, kTol.psd_jitter)) fail("cov: not positive semidefinite");
  if (!has_path(std::vector<char>(m, 1))) fail("arcs: no directed source-sink path");
}

NetworkInstance instance_from_json(const nlohmann::json& j) {
  auto need = [&](const char* key) -> const nlohmann::json& {
    if (!j.contains(key)) throw SchemaError(std::string("missing field '") + key + "'");
    return j.at(key);
  };
  auto number = [](const nlohmann::json& v, const std::string& where) {
    if (!v.is_number()) throw SchemaError("field '" + where + "' must be a number");
    return v.get<double>();
  };
  auto integer = [](const nlohmann::json& v, const std::string& where) {
    if (!v.is_number_integer()) throw SchemaError("field '" + where + "' must be an integer");
    return v.get<int>();
  };
  int nodes = integer(need("nodes"), "nodes");
  int source = integer(need("source"), "source");
  int sink = integer(need("sink"), "sink");
  double demand = number(need("demand"), "demand");
  const auto& jarcs = need("arcs");
  if (!jarcs.is_array()) throw SchemaError("field 'arcs' must be an array");
  std::vector<Arc> arcs;
  Vector mu(static_cast<Eigen::Index>(jarcs.size()));
  for (std::size_t a = 0; a < jarcs.size(); ++a) {
    const auto& ja = jarcs[a];
    std::string w = "arcs[" + std::to_string(a) + "]";
    for (const char* k : {"tail", "head", "cost", "mu"})
      if (!ja.contains(k)) throw SchemaError("missing field '" + w + "." + k + "'");
    arcs.push_back({integer(ja["tail"], w + ".tail"), integer(ja["head"], w + ".head"),
                    number(ja["cost"], w + ".cost")});
    mu[static_cast<Eigen::Index>(a)] = number(ja["mu"], w + ".mu");
  }
  const auto m = static_cast<Eigen::Index>(arcs.size());
  const auto& jcov = need("cov");
  Matrix cov = Matrix::Zero(m, m);
  if (jcov.is_object()) {
    if (!jcov.contains("diag") || !jcov["diag"].is_array())
      throw SchemaError("field 'cov.diag' must be an array");
    if (static_cast<Eigen::Index>(jcov["diag"].size()) != m)
      throw SchemaError("field 'cov.diag' must have one entry per arc");
    for (Eigen::Index i = 0; i < m; ++i)
      cov(i, i) = number(jcov["diag"][i], "cov.diag[" + std::to_string(i) + "]");
  } else if (jcov.is_array()) {
    if (static_cast<Eigen::Index>(jcov.size()) != m)
      throw SchemaError("field 'cov' must have one row per arc");
    for (Eigen::Index i = 0; i < m; ++i) {
      const auto& row = jcov[i];
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != m)
        throw SchemaError("field 'cov[" + std::to_string(i) + "]' must have one entry per arc");
      for (Eigen::Index k = 0; k < m; ++k)
        cov(i, k) = number(row[k], "cov[" + std::to_string(i) + "][" + std::to_string(k) + "]");
    }
  } else {
    throw SchemaError("field 'cov' must be a matrix or {\"diag\": [...]}");
  }
  NetworkInstance inst(nodes, source, sink, demand, std::move(arcs), std::move(mu),
                       std::move(cov));
  if (j.contains("id") && j["id"].is_string()) inst.set_id(j["id"].get<std::string>());
  if (j.contains("beta") && j["beta"].is_number()) inst.set_beta(j["beta"].get<double>());
  return inst;
}

nlohmann::json instance_to_json(const NetworkInstance& inst) {
  nlohmann::json j;
  if (!inst.id().empty()) j["id"] = inst.id();
  j["nodes"] = inst.node_count();
  j["source"] = inst.source();
  j["sink"] = inst.sink();
  j["demand"] = inst.demand();
  if (inst.beta()) j["beta"] = *inst.beta();
  j["arcs"] = nlohmann::json::array();
  for (int a = 0; a < inst.arc_count(); ++a) {
    const Arc& arc = inst.arc(a);
    j["arcs"].push_back({{"tail", arc.tail}, {"head", arc.head}, {"cost", arc.cost},
                         {"mu", inst.mu()[a]}});
  }
  const int m = inst.arc_count();
  if (inst.is_diagonal()) {
    std::vector<double> diag(m);
    for (int a = 0; a < m; ++a) diag[a] = inst.cov()(a, a);
    j["cov"] = {{"diag", diag}};
  } else {
    auto rows = nlohmann::json::array();
    for (int i = 0; i < m; ++i) {
      std::vector<double> row(m);
      for (int k = 0; k < m; ++k) row[k] = inst.cov()(i, k);
      rows.push_back(row);
    }
    j["cov"] = rows;
  }
  return j;
}

NetworkInstance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
  try {
    return instance_from_json(j);
  } catch (const SchemaError& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

void save_instance(const NetworkInstance& inst, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write instance file " + path.string());
  out << instance_to_json(inst).dump(1) << '\n';
}

NetworkInstance table1_instance() {
  // Nodes: s=0, 1..4, t=5.
  struct Row { int tail, head; double mean, variance, cost; };
  static constexpr Row rows[] = {
      {0, 1, 81, 16, 14},  {0, 2, 90, 676, 42}, {0, 3, 12, 4, 91},   {0, 4, 91, 289, 79},
      {0, 5, 63, 9, 95},   {1, 2, 9, 4, 65},    {1, 3, 27, 25, 3},   {1, 4, 54, 36, 84},
      {1, 5, 95, 256, 93}, {2, 3, 96, 169, 67}, {2, 4, 15, 1, 75},   {2, 5, 97, 64, 74},
      {3, 4, 95, 16, 39},  {3, 5, 48, 9, 65},   {4, 5, 80, 49, 17}};
  std::vector<Arc> arcs;
  Vector mu(15);
  Matrix cov = Matrix::Zero(15, 15);
  for (int a = 0; a < 15; ++a) {
    arcs.push_back({rows[a].tail, rows[a].head, rows[a].cost});
    mu[a] = rows[a].mean;
    cov(a, a) = rows[a].variance;
  }
  NetworkInstance inst(6, 0, 5, 230.0, std::move(arcs), std::move(mu), std::move(cov));
  inst.set_id("table1");
  return inst;
}

}  // namespace pnd
