#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "physarum/model.hpp"
#include "physarum/oracle.hpp"

namespace physarum::properties {

/// Sample counts for the randomized identity and bound suites.
struct SuiteConfig {
  std::uint64_t seed = 1;
  std::size_t energy_samples = 100;    // random x > 0, checked against every vertex
  std::size_t gradient_samples = 100;  // random (x, h in ker A) pairs
  std::size_t bound_samples = 1000;    // log-uniform x in [1e-4, 1e4]^n
  std::size_t feasible_samples = 200;  // convex combinations of vertices plus rays
  std::size_t key_samples = 200;       // random w > 0
};

struct Check {
  std::string name;
  std::size_t samples = 0;
  std::size_t violations = 0;
  double worst = 0.0;  // max over samples of measured / allowed
};

struct SuiteReport {
  std::vector<Check> checks;

  bool ok() const;
  const Check& find(const std::string& name) const;
};

/// Runs every pointwise identity and bound of the dynamics:
///   energy_identity    |y'A'p - b'p| <= 1e-8 (|b'p| + 1) for every vertex y
///   energy_by_flux     |b'p - q'W^{-1}q| <= 1e-10 (|b'p| + 1)
///   flux_feasible      |Aq - b|_inf <= 1e-8 (|b|_inf + 1)
///   direction_split    |P - P_f - P_o|_inf <= 1e-10 (|P_f|_inf + |P_o|_inf + 1)
///   gradient_identity  residual <= 1e-8 (|c|_inf |h|_inf + 1)
///   q_bound            |q|_inf <= D^2 n |b|_1 (1 + 1e-8)
///   atp_bound          |A'p|_inf <= D C_s (1 + 1e-8) at feasible x
///   pf_vanishes        |P_f|_inf <= 1e-8 (|x|_inf + 1) at feasible x
///   key_bound          w_i |A'L^{-1}a_i|_inf <= D (1 + 1e-8)
SuiteReport run_suite(const ValidatedLP& lp, const Params& params, const oracle::OracleResult& oracle,
                      const SuiteConfig& config = {});

}  // namespace physarum::properties
