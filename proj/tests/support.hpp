#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "physarum/exact.hpp"
#include "physarum/model.hpp"

#ifndef PHYSARUM_DATA_DIR
#define PHYSARUM_DATA_DIR "data/instances"
#endif

namespace physarum::testing {

inline std::string instance_path(const std::string& name) {
  return std::string(PHYSARUM_DATA_DIR) + "/" + name + ".json";
}

inline LinearProgram make_lp(std::initializer_list<std::initializer_list<std::int64_t>> A,
                             std::initializer_list<std::int64_t> b, std::initializer_list<std::int64_t> c) {
  LinearProgram lp;
  lp.A.resize(static_cast<Index>(A.size()), static_cast<Index>(A.begin()->size()));
  Index i = 0;
  for (const auto& row : A) {
    Index j = 0;
    for (auto v : row) lp.A(i, j++) = v;
    ++i;
  }
  lp.b = Eigen::Map<const IntVector>(b.begin(), static_cast<Index>(b.size()));
  lp.c = Eigen::Map<const IntVector>(c.begin(), static_cast<Index>(c.size()));
  return lp;
}

inline ValidatedLP simple2() { return validate(make_lp({{1, 1}}, {1}, {1, 2})); }
inline ValidatedLP identity2() { return validate(make_lp({{1, 0}, {0, 1}}, {2, 3}, {1, 1})); }
inline ValidatedLP triangle() { return validate(make_lp({{1, 0, 1}, {-1, 1, 0}}, {1, 0}, {1, 1, 3})); }

struct FuzzOptions {
  Index max_m = 3;
  Index max_n = 6;
  std::int64_t entry = 3;   // A entries in [-entry, entry]
  std::int64_t x_min = 0;   // planted solution entries in [x_min, x_max]
  std::int64_t x_max = 3;
  std::int64_t c_max = 3;   // costs in [1, c_max]
  bool nonzero_b = false;
};

/// Random full-row-rank instance with b = A x_hat for a planted integer x_hat >= 0,
/// so the feasible region is never empty.
inline ValidatedLP random_instance(std::mt19937_64& rng, const FuzzOptions& o = {}) {
  std::uniform_int_distribution<Index> mdist(1, o.max_m);
  std::uniform_int_distribution<std::int64_t> adist(-o.entry, o.entry);
  std::uniform_int_distribution<std::int64_t> xdist(o.x_min, o.x_max);
  std::uniform_int_distribution<std::int64_t> cdist(1, o.c_max);
  for (;;) {
    const Index m = mdist(rng);
    std::uniform_int_distribution<Index> ndist(std::max<Index>(m, 2), o.max_n);
    const Index n = ndist(rng);
    LinearProgram lp;
    lp.A.resize(m, n);
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < n; ++j) lp.A(i, j) = adist(rng);
    IntVector x(n);
    for (Index j = 0; j < n; ++j) x(j) = xdist(rng);
    lp.b = lp.A * x;
    lp.c.resize(n);
    for (Index j = 0; j < n; ++j) lp.c(j) = cdist(rng);
    if (o.nonzero_b && lp.b.isZero()) continue;
    if (exact::rank(lp.A) != m) continue;
    return validate(std::move(lp));
  }
}

}  // namespace physarum::testing
