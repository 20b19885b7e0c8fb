#ifndef DROPSVM_BASELINE_HPP
#define DROPSVM_BASELINE_HPP

#include <cstdint>
#include <vector>

#include "dropsvm/dataset.hpp"
#include "dropsvm/linear.hpp"

namespace dropsvm {

/// Above this many corrupted copies the corpus regenerates them on every
/// pass instead of storing them.
inline constexpr std::size_t kMaterializeLimit = 2'000'000;

/// M corrupted copies of every source example, copy m of example n drawn
/// with seed derive_seed(seed, n * M + m) and weighted source.weight / M.
/// Visiting order is n-major. Copies are identical whether materialized or
/// streamed.
class ExplicitCorpus : public ExampleStream {
 public:
  ExplicitCorpus(const Dataset& source, std::size_t copies, const NoiseModel& noise,
                 std::uint64_t seed, std::size_t materialize_limit = kMaterializeLimit);

  std::size_t size() const override { return source_.size() * copies_; }
  std::size_t dim() const override { return source_.dim(); }
  void for_each(const std::function<void(std::size_t, const Example&)>& fn) const override;

  bool materialized() const { return !stored_.empty() || size() == 0; }
  std::size_t copies() const { return copies_; }

  /// Copy m of example n.
  Example copy(std::size_t n, std::size_t m) const;

 private:
  const Dataset& source_;
  std::size_t copies_;
  NoiseModel noise_;
  std::uint64_t seed_;
  std::vector<Example> stored_;
};

/// Trains `loss` on M explicitly corrupted copies per example without
/// marginalization (the engine sees NoiseModel::none()). Only hinge and
/// logistic losses are accepted. The returned model records cfg.noise.
LinearModel train_explicit(const Dataset& data, const TrainConfig& cfg, std::size_t copies,
                           std::uint64_t seed, Loss loss, TrainTrace* trace = nullptr);

/// The fixed-quadratic-loss baseline: the engine with its re-weights pinned
/// at the values that make the loss an expected squared loss.
LinearModel train_fixed_quadratic(Loss loss, const ExampleStream& data, const TrainConfig& cfg);

}  // namespace dropsvm

#endif  // DROPSVM_BASELINE_HPP
