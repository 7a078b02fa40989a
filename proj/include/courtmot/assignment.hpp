#pragma once

#include <vector>

namespace courtmot {

struct AssignmentResult {
  std::vector<int> row_to_col;  // -1 = unmatched
  std::vector<int> col_to_row;
  double total_cost = 0.0;
  int matched = 0;
};

// Min-cost one-to-one assignment with forbidden pairs. The objective is
// lexicographic: maximum number of allowed matches first, minimum total cost
// among those. allowed may be empty (everything allowed); otherwise it must
// have the shape of cost.
AssignmentResult solve_assignment(const std::vector<std::vector<double>>& cost,
                                  const std::vector<std::vector<char>>& allowed = {});

}  // namespace courtmot
