#pragma once

#include "gcs/types.hpp"

#include <vector>

namespace gcs {

// Vector of sigma_z eigenvalues (j_1, ..., j_N), entries exactly +1 or -1.
// Labels are ordered lexicographically with +1 before -1, so the all-(+1)
// label has index 0 and the all-(-1) label has index 2^N - 1. The index
// doubles as the row/column of the label in the sigma_z product basis.
class BranchLabel {
 public:
  BranchLabel() = default;
  explicit BranchLabel(std::vector<int> values);
  static BranchLabel from_index(int n_qubits, int index);

  int n_qubits() const { return static_cast<int>(values_.size()); }
  int operator[](int i) const { return values_[i]; }
  const std::vector<int>& values() const { return values_; }

  // Position in the sigma_z product basis (qubit 0 most significant).
  int index() const;

  bool operator==(const BranchLabel& other) const { return values_ == other.values_; }

  std::string str() const;

 private:
  std::vector<int> values_;
};

std::vector<BranchLabel> all_labels(int n_qubits);

// Ordered pair of labels (J, K) indexing one superposed phase space.
struct BranchKey {
  BranchLabel row;  // J
  BranchLabel col;  // K
  std::string str() const { return row.str() + "|" + col.str(); }
};

// Row-major index into the stored upper triangle (a <= b), a = row index,
// b = col index, dim = 2^N.
int upper_triangle_index(int a, int b, int dim);
int upper_triangle_count(int dim);

}  // namespace gcs
