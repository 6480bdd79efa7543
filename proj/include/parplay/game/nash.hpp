#pragma once

#include <limits>
#include <vector>

#include "parplay/game/cost_matrix.hpp"

namespace parplay {

/// Pareto-optimal pure equilibria with their cost pairs, in row-major profile order.
struct EquilibriumSet {
  std::vector<ProfileIndex> profiles;
  std::vector<CostPair> costs;

  std::size_t size() const { return profiles.size(); }
  bool empty() const { return profiles.empty(); }

  friend bool operator==(const EquilibriumSet&, const EquilibriumSet&) = default;
};

/// Profiles where neither agent can lower its own cost by a unilateral switch.
/// Ties count as best responses, so infinite columns admit every all-infinite row.
inline std::vector<ProfileIndex> find_pure_nash(const CostMatrix& costs) {
  const std::size_t rows = costs.rows();
  const std::size_t cols = costs.cols();
  std::vector<double> col_best(cols, std::numeric_limits<double>::infinity());
  std::vector<double> row_best(rows, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      const CostPair& c = costs.at(i, j);
      col_best[j] = std::min(col_best[j], c[0]);
      row_best[i] = std::min(row_best[i], c[1]);
    }
  std::vector<ProfileIndex> out;
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      const CostPair& c = costs.at(i, j);
      if (c[0] <= col_best[j] && c[1] <= row_best[i]) out.push_back({i, j});
    }
  return out;
}

/// true iff `a` is strictly cheaper than `b` for every agent.
inline bool strictly_dominates(const CostPair& a, const CostPair& b) { return a[0] < b[0] && a[1] < b[1]; }

inline EquilibriumSet pareto_filter(const std::vector<ProfileIndex>& nash, const CostMatrix& costs) {
  EquilibriumSet out;
  for (const ProfileIndex& p : nash) {
    const CostPair& cp = costs.at(p);
    bool dominated = false;
    for (const ProfileIndex& q : nash) {
      if (strictly_dominates(costs.at(q), cp)) {
        dominated = true;
        break;
      }
    }
    if (!dominated) {
      out.profiles.push_back(p);
      out.costs.push_back(cp);
    }
  }
  return out;
}

inline EquilibriumSet solve_equilibria(const CostMatrix& costs) { return pareto_filter(find_pure_nash(costs), costs); }

}  // namespace parplay
