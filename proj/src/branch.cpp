#include "gcs/branch.hpp"

namespace gcs {

BranchLabel::BranchLabel(std::vector<int> values) : values_(std::move(values)) {
  for (int v : values_) {
    if (v != 1 && v != -1) throw Error("BranchLabel: entries must be +1 or -1");
  }
}

BranchLabel BranchLabel::from_index(int n_qubits, int index) {
  std::vector<int> v(n_qubits);
  for (int i = 0; i < n_qubits; ++i) {
    const int bit = (index >> (n_qubits - 1 - i)) & 1;
    v[i] = bit == 0 ? 1 : -1;
  }
  return BranchLabel(std::move(v));
}

int BranchLabel::index() const {
  int idx = 0;
  for (int v : values_) idx = (idx << 1) | (v == 1 ? 0 : 1);
  return idx;
}

std::string BranchLabel::str() const {
  std::string s;
  for (int v : values_) s += (v == 1 ? '+' : '-');
  return s;
}

std::vector<BranchLabel> all_labels(int n_qubits) {
  std::vector<BranchLabel> out;
  const int dim = 1 << n_qubits;
  out.reserve(dim);
  for (int i = 0; i < dim; ++i) out.push_back(BranchLabel::from_index(n_qubits, i));
  return out;
}

int upper_triangle_index(int a, int b, int dim) {
  if (a > b || b >= dim) throw Error("upper_triangle_index: need a <= b < dim");
  return a * dim - a * (a - 1) / 2 + (b - a);
}

int upper_triangle_count(int dim) { return dim * (dim + 1) / 2; }

}  // namespace gcs
