#ifndef DROPSVM_SPARSE_HPP
#define DROPSVM_SPARSE_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <initializer_list>
#include <utility>
#include <vector>

namespace dropsvm {

using Index = std::uint32_t;

/// Sparse real vector stored as strictly increasing (index, value) pairs.
/// Explicit zeros are allowed but never produced by the library.
class SparseVector {
 public:
  SparseVector() = default;
  SparseVector(std::initializer_list<std::pair<Index, double>> entries);

  /// Builds from a dense vector, dropping exact zeros.
  static SparseVector from_dense(const Eigen::Ref<const Eigen::VectorXd>& dense);

  /// Appends an entry; `index` must exceed every stored index.
  void push_back(Index index, double value);

  std::size_t nnz() const { return index_.size(); }
  bool empty() const { return index_.empty(); }

  const std::vector<Index>& indices() const { return index_; }
  const std::vector<double>& values() const { return value_; }
  std::vector<double>& mutable_values() { return value_; }

  Index index(std::size_t k) const { return index_[k]; }
  double value(std::size_t k) const { return value_[k]; }

  /// One past the largest stored index, or 0 when empty.
  std::size_t min_dim() const { return index_.empty() ? 0 : index_.back() + 1; }

  /// Dot product with the first min_dim() coordinates of `w`.
  double dot(const Eigen::Ref<const Eigen::VectorXd>& w) const;

  Eigen::VectorXd to_dense(std::size_t dim) const;

  friend bool operator==(const SparseVector&, const SparseVector&) = default;

 private:
  std::vector<Index> index_;
  std::vector<double> value_;
};

}  // namespace dropsvm

#endif  // DROPSVM_SPARSE_HPP
