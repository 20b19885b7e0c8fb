#include "dropsvm/baseline.hpp"

#include "dropsvm/errors.hpp"

namespace dropsvm {

ExplicitCorpus::ExplicitCorpus(const Dataset& source, std::size_t copies,
                               const NoiseModel& noise, std::uint64_t seed,
                               std::size_t materialize_limit)
    : source_(source), copies_(copies), noise_(noise), seed_(seed) {
  if (copies == 0) throw ParameterError("number of corrupted copies M must be at least 1");
  if (size() <= materialize_limit) {
    stored_.reserve(size());
    for (std::size_t n = 0; n < source_.size(); ++n) {
      for (std::size_t m = 0; m < copies_; ++m) stored_.push_back(copy(n, m));
    }
  }
}

Example ExplicitCorpus::copy(std::size_t n, std::size_t m) const {
  const Example& src = source_.examples.at(n);
  Example ex;
  ex.x = sample(src.x, noise_, derive_seed(seed_, n * copies_ + m), source_.dim());
  ex.y = src.y;
  ex.weight = src.weight / static_cast<double>(copies_);
  return ex;
}

void ExplicitCorpus::for_each(
    const std::function<void(std::size_t, const Example&)>& fn) const {
  if (!stored_.empty()) {
    for (std::size_t i = 0; i < stored_.size(); ++i) fn(i, stored_[i]);
    return;
  }
  std::size_t i = 0;
  for (std::size_t n = 0; n < source_.size(); ++n) {
    for (std::size_t m = 0; m < copies_; ++m) fn(i++, copy(n, m));
  }
}

LinearModel train_explicit(const Dataset& data, const TrainConfig& cfg, std::size_t copies,
                           std::uint64_t seed, Loss loss, TrainTrace* trace) {
  if (loss == Loss::EpsInsensitive) {
    throw ParameterError("explicit corruption supports hinge and logistic losses");
  }
  cfg.validate(loss);
  const ExplicitCorpus corpus(data, copies, cfg.noise, seed);
  TrainConfig plain = cfg;
  plain.noise = NoiseModel::none();
  LinearModel model = train_linear(loss, corpus, plain, trace);
  model.noise = cfg.noise;
  return model;
}

LinearModel train_fixed_quadratic(Loss loss, const ExampleStream& data, const TrainConfig& cfg) {
  TrainConfig fixed = cfg;
  fixed.reweight_mode = ReweightMode::FixedQuadratic;
  return train_linear(loss, data, fixed);
}

}  // namespace dropsvm
