#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "pnd/network.hpp"

namespace pnd {

enum class Regime { independent, correlated, general };

Regime parse_regime(std::string_view name);
std::string_view to_string(Regime r);

struct GenSpec {
  int nodes = 10;
  double omega = 1.0;
  double beta = 0.5;
  Regime regime = Regime::independent;
  std::uint64_t seed = 1;
  double cost_low = 1.0;   // integer design costs drawn from [cost_low, cost_high]
  double cost_high = 100.0;

  void validate() const;
  std::string id() const;
};

/// Random instance: source 0, sink n-1, arc i->j (i < j) with probability 1/sqrt(n),
/// plus a path through a random permutation of the internal nodes; demand = beta * phi, phi the
/// minimum over cuts of mu'z - omega sqrt(z'Sigma z) with every arc built (capacities redrawn until positive).
NetworkInstance generate(const GenSpec& spec);

/// Same capacity model over a city list {"cities": [{"name", "lat", "lon"}, ...], "source", "sink"},
/// with arc costs proportional to great-circle distance (km).
NetworkInstance generate_from_cities(const nlohmann::json& cities, const GenSpec& spec);

double great_circle_km(double lat1, double lon1, double lat2, double lon2);

/// Cartesian grid of specs; seeds 1..seeds.
std::vector<GenSpec> grid(Regime regime, const std::vector<int>& nodes, const std::vector<double>& betas,
                          const std::vector<double>& omegas, int seeds);

/// Named grids: paper-independent, paper-correlated, paper-general (n = 10, beta in {.3,.5,.7},
/// omega in {1,3,5}, five seeds), and their small-* variants (n = 6).
std::vector<GenSpec> named_grid(std::string_view name);

/// Fraction of pairs i < j with positive beta_ij = omega^2 sigma_ij - mu_i mu_j.
double positive_beta_fraction(const NetworkInstance& inst, double omega);

}  // namespace pnd
