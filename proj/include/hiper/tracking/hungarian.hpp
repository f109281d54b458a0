#pragma once

#include <vector>

namespace hiper::tracking {

// Entries at or above kInfeasible mark forbidden pairs.
inline constexpr double kInfeasible = 1e15;

// Minimum-cost one-to-one assignment over an n x m row-major cost
// matrix (Jonker-Volgenant shortest augmenting paths). Rows or columns
// left over, or only matchable through forbidden pairs, stay -1.
std::vector<int> solve_assignment(const std::vector<double>& cost, int rows, int cols);

}  // namespace hiper::tracking
