#ifndef DROPSVM_DATASET_HPP
#define DROPSVM_DATASET_HPP

#include <functional>
#include <vector>

#include "dropsvm/sparse.hpp"

namespace dropsvm {

enum class TaskKind { Binary, Multiclass, Regression };

struct Example {
  SparseVector x;
  double y = 0.0;
  double weight = 1.0;  // multiplies this example's loss
};

/// Read-only, index-ordered access to training examples. Engines only ever
/// visit examples through this interface, so corpora may be generated on the
/// fly instead of stored.
class ExampleStream {
 public:
  virtual ~ExampleStream() = default;
  virtual std::size_t size() const = 0;
  virtual std::size_t dim() const = 0;
  /// Calls `fn(i, example)` for i = 0 .. size()-1 in ascending order.
  virtual void for_each(const std::function<void(std::size_t, const Example&)>& fn) const = 0;
};

/// In-memory labeled examples.
struct Dataset : ExampleStream {
  std::vector<Example> examples;
  std::size_t dimension = 0;
  TaskKind task = TaskKind::Binary;
  int num_classes = 0;  // multiclass only

  std::size_t size() const override { return examples.size(); }
  std::size_t dim() const override { return dimension; }
  void for_each(const std::function<void(std::size_t, const Example&)>& fn) const override {
    for (std::size_t i = 0; i < examples.size(); ++i) fn(i, examples[i]);
  }

  /// Subset with the given example indices, in that order.
  Dataset subset(const std::vector<std::size_t>& indices) const;

  /// Throws DataError if labels, indices or values break the task's rules.
  void validate() const;
};

}  // namespace dropsvm

#endif  // DROPSVM_DATASET_HPP
