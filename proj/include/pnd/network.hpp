#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>
#include <stdexcept>

namespace pnd {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct Arc {
  int tail = 0;
  int head = 0;
  double cost = 0.0;
};

/// Directed network with random arc capacities (mean vector + covariance).
///
/// Arc identity is the index into `arcs`; parallel arcs are allowed. The
/// instance is immutable once validated and may be shared between threads.
class NetworkInstance {
 public:
  NetworkInstance() = default;
  NetworkInstance(int nodes, int source, int sink, double demand, std::vector<Arc> arcs,
                  Vector mu, Matrix cov);

  int node_count() const { return nodes_; }
  int source() const { return source_; }
  int sink() const { return sink_; }
  double demand() const { return demand_; }
  int arc_count() const { return static_cast<int>(arcs_.size()); }
  const std::vector<Arc>& arcs() const { return arcs_; }
  const Arc& arc(int a) const { return arcs_[a]; }
  const Vector& mu() const { return mu_; }
  const Matrix& cov() const { return cov_; }
  Vector sigma() const { return cov_.diagonal().cwiseMax(0.0).cwiseSqrt(); }
  Vector costs() const;
  bool is_diagonal() const;

  const std::string& id() const { return id_; }
  void set_id(std::string id) { id_ = std::move(id); }
  std::optional<double> beta() const { return beta_; }
  void set_beta(double beta) { beta_ = beta; }

  NetworkInstance with_demand(double d) const;

  /// Throws std::invalid_argument describing the first violated invariant.
  void validate() const;

  /// True when some directed s-t path exists using only arcs with selected[a] != 0.
  bool has_path(const std::vector<char>& selected) const;

 private:
  int nodes_ = 0;
  int source_ = 0;
  int sink_ = 1;
  double demand_ = 0.0;
  std::vector<Arc> arcs_;
  Vector mu_;
  Matrix cov_;
  std::string id_;
  std::optional<double> beta_;
};

/// Error raised for malformed instance files; `what()` names the field.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

NetworkInstance instance_from_json(const nlohmann::json& j);
nlohmann::json instance_to_json(const NetworkInstance& inst);
NetworkInstance load_instance(const std::filesystem::path& path);
void save_instance(const NetworkInstance& inst, const std::filesystem::path& path);

/// Table 1 of the six-node example network (demand 230), built in code.
NetworkInstance table1_instance();

}  // namespace pnd
