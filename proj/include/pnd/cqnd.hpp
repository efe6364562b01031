#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pnd/network.hpp"
#include "pnd/separation.hpp"

namespace pnd {

/// Strengthening families on top of the always-on outer approximation.
struct CutFamilies {
  bool pack = false;         // x(N \ P) >= 1
  bool xpack = false;        // lifted packs
  bool polymatroid = false;  // extended polymatroid of q, or of q~ when CV fails
  bool cover = false;        // lifted covers of polymatroid knapsacks
  bool aggregate = false;    // lifted covers of the summed knapsacks

  /// Comma list of pack, xpack, polymatroid, cover, aggregate; "none" or empty for OA only.
  static CutFamilies parse(std::string_view list);
  std::string str() const;
};

struct SolveConfig {
  double omega = 0.0;
  std::optional<SepStrategy> separation;  // unset: enum up to 12 internal nodes, else bqc
  CutFamilies cuts;
  long node_limit = 10000000;
  double time_limit = 1800.0;
  double memory_limit_mb = 500.0;
  std::string branching = "most-fractional";
  std::uint64_t seed = 1;
  int threads = 1;
  int root_rounds = 200;
  int node_rounds = 20;
  bool certify = true;

  void validate() const;
};

struct Design {
  std::vector<char> x;
  double cost = 0.0;
  double worst_slack = 0.0;  // min over cuts of f_C(x) - d
  bool certified = false;

  std::vector<int> arcs() const;
};

struct SolveStats {
  std::string status;  // optimal, infeasible, node-limit, time-limit, memory-limit, numerical
  double objective = 0.0;
  double best_bound = 0.0;
  double root_bound = 0.0;
  double rgap = 0.0;                // percent, (z_o - z_r) / z_o
  std::optional<double> egap;       // percent, only when not solved
  std::map<std::string, long> cuts_by_family;
  long cuts = 0;
  long covers = 0;
  long nodes = 0;
  long separations = 0;
  long lp_iterations = 0;
  double seconds = 0.0;
};

struct SolveOutcome {
  Design design;
  SolveStats stats;
};

SolveOutcome solve_cqnd(const NetworkInstance& inst, const SolveConfig& config);

/// Root gap of a full solve, in percent.
double root_gap(const NetworkInstance& inst, const SolveConfig& config);

/// Min over all cuts of f_C(x) - d; throws SizeError past the enumeration limit.
double worst_cut_slack(const NetworkInstance& inst, const std::vector<char>& x, double omega);

std::string csv_header(bool with_time = true);
std::string csv_row(const NetworkInstance& inst, const SolveConfig& config, const SolveOutcome& out,
                    bool with_time = true);

}  // namespace pnd
