#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pnd/cqnd.hpp"
#include "pnd/network.hpp"
#include "pnd/omega.hpp"

namespace pnd {

struct SimOptions {
  long samples = 10000;
  std::uint64_t seed = 1;
  int workers = 1;
  bool keep_values = false;  // per-sample min cuts in SimReport::values
};

struct SimReport {
  long samples = 0;
  std::uint64_t seed = 0;
  double service_level = 0.0;  // fraction of samples with min cut >= d
  double min_cut_min = 0.0;
  double min_cut_mean = 0.0;
  double min_cut_max = 0.0;
  long truncated = 0;          // negative capacity draws set to 0 (selected arcs only)
  bool connected = true;
  std::vector<double> values;
};

/// Capacities mu + L z with z standard normal, truncated at 0; draw k of sample s uses
/// counter s * m + k, so results do not depend on how samples are split across workers.
SimReport simulate(const NetworkInstance& inst, const std::vector<char>& design, const SimOptions& opt);

/// Raw capacity draw of one sample (before truncation).
Vector sample_capacities(const NetworkInstance& inst, const Matrix& chol, std::uint64_t seed, long sample);

struct TradeoffRow {
  double epsilon = 0.0;
  double omega = 0.0;
  double cost = 0.0;
  double cost_ratio = 0.0;  // percent of the epsilon = 0.5 design
  std::string status;
  std::vector<int> arcs;
  SimReport sim;
};

/// solve_cqnd per epsilon, then simulate each design.
std::vector<TradeoffRow> tradeoff_curve(const NetworkInstance& inst, const std::vector<double>& epsilons,
                                        OmegaModel model, const SolveConfig& base, const SimOptions& sim);

std::string sim_csv_header();
std::string sim_csv_row(const std::string& label, const SimReport& r);
std::string tradeoff_csv_header();
std::string tradeoff_csv_row(const TradeoffRow& r);

}  // namespace pnd
