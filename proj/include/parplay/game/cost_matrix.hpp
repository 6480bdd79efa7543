#pragma once

#include <array>
#include <cmath>
#include <compare>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace parplay {

inline constexpr double kInfiniteCost = std::numeric_limits<double>::infinity();

/// (c1, c2): cost to agent 1 and agent 2 of one action profile, in seconds.
using CostPair = std::array<double, 2>;

inline constexpr CostPair kCollisionCost{kInfiniteCost, kInfiniteCost};

struct ProfileIndex {
  std::size_t i1 = 0;
  std::size_t i2 = 0;

  std::size_t operator[](int agent) const { return agent == 0 ? i1 : i2; }
  friend auto operator<=>(const ProfileIndex&, const ProfileIndex&) = default;
};

/// Row index = agent-1 action, column index = agent-2 action.
class CostMatrix {
 public:
  CostMatrix() = default;
  CostMatrix(std::size_t rows, std::size_t cols, CostPair fill = {0.0, 0.0})
      : rows_(rows), cols_(cols), entries_(rows * cols, fill) {}

  static CostMatrix from_rows(const std::vector<std::vector<double>>& c1,
                              const std::vector<std::vector<double>>& c2) {
    if (c1.size() != c2.size() || c1.empty()) throw std::invalid_argument("CostMatrix: shape mismatch");
    CostMatrix m(c1.size(), c1.front().size());
    for (std::size_t i = 0; i < m.rows_; ++i) {
      if (c1[i].size() != m.cols_ || c2[i].size() != m.cols_) throw std::invalid_argument("CostMatrix: ragged rows");
      for (std::size_t j = 0; j < m.cols_; ++j) m.at(i, j) = {c1[i][j], c2[i][j]};
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size(int agent) const { return agent == 0 ? rows_ : cols_; }

  CostPair& at(std::size_t i, std::size_t j) { return entries_.at(i * cols_ + j); }
  const CostPair& at(std::size_t i, std::size_t j) const { return entries_.at(i * cols_ + j); }
  const CostPair& at(ProfileIndex p) const { return at(p.i1, p.i2); }

  friend bool operator==(const CostMatrix&, const CostMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<CostPair> entries_;
};

}  // namespace parplay
