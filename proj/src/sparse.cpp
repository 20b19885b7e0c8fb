#include "dropsvm/sparse.hpp"

#include "dropsvm/errors.hpp"

namespace dropsvm {

SparseVector::SparseVector(std::initializer_list<std::pair<Index, double>> entries) {
  for (const auto& [i, v] : entries) push_back(i, v);
}

SparseVector SparseVector::from_dense(const Eigen::Ref<const Eigen::VectorXd>& dense) {
  SparseVector out;
  for (Eigen::Index d = 0; d < dense.size(); ++d) {
    if (dense[d] != 0.0) out.push_back(static_cast<Index>(d), dense[d]);
  }
  return out;
}

void SparseVector::push_back(Index index, double value) {
  if (!index_.empty() && index <= index_.back()) {
    throw DomainError("sparse indices must be strictly increasing");
  }
  index_.push_back(index);
  value_.push_back(value);
}

double SparseVector::dot(const Eigen::Ref<const Eigen::VectorXd>& w) const {
  if (min_dim() > static_cast<std::size_t>(w.size())) {
    throw DomainError("sparse vector index exceeds weight dimension");
  }
  double s = 0.0;
  for (std::size_t k = 0; k < index_.size(); ++k) s += value_[k] * w[index_[k]];
  return s;
}

Eigen::VectorXd SparseVector::to_dense(std::size_t dim) const {
  if (min_dim() > dim) throw DomainError("sparse vector index exceeds dimension");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
  for (std::size_t k = 0; k < index_.size(); ++k) out[index_[k]] = value_[k];
  return out;
}

}  // namespace dropsvm
