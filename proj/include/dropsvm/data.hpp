#ifndef DROPSVM_DATA_HPP
#define DROPSVM_DATA_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dropsvm/dataset.hpp"
#include "dropsvm/latent.hpp"
#include "dropsvm/linear.hpp"

namespace dropsvm {

std::string to_string(TaskKind task);
TaskKind parse_task(const std::string& name);

/// Guesses the task from labels: all +/-1 is Binary, all small nonnegative
/// integers is Multiclass, anything else is Regression. An empty label set
/// is Binary.
TaskKind infer_task(const std::vector<double>& labels);

/// Reads the sparse text format
///   [#dim D] [#base 0|1]
///   <label> <idx>:<value> ...
/// Blank lines and other lines starting with '#' are skipped. Indices are
/// 1-based unless the header says otherwise. Without a `#dim` header D is one
/// past the largest index seen. The task is inferred unless given.
Dataset parse_sparse(std::istream& in, const std::string& source_name,
                     std::optional<TaskKind> task = std::nullopt);
Dataset load_sparse(const std::string& path, std::optional<TaskKind> task = std::nullopt);

/// Writes with a `#dim D #base B` header and values in round-trip precision.
void write_sparse(std::ostream& out, const Dataset& data, int base = 1);
void save_sparse(const std::string& path, const Dataset& data, int base = 1);

/// Dense comma-separated rows with the label in the last column. A first
/// line that does not parse as numbers is treated as a header.
Dataset load_csv(const std::string& path, std::optional<TaskKind> task = std::nullopt);

/// Dispatches on the extension: ".csv" is dense, anything else sparse.
Dataset load_dataset(const std::string& path, std::optional<TaskKind> task = std::nullopt);

/// Binary relabeling of a multiclass dataset: +1 for `cls`, -1 otherwise.
Dataset binary_relabel(const Dataset& data, int cls);

/// A trained binary scorer of either family.
using BinaryModel = std::variant<LinearModel, LatentModel>;

double score(const BinaryModel& model, const SparseVector& x);
std::size_t model_dim(const BinaryModel& model);

struct OneVsAllModel {
  std::vector<BinaryModel> models;  // models[k] scores class classes[k]
  std::vector<int> classes;
};

using BinaryTrainer = std::function<BinaryModel(const Dataset&)>;

/// Trains one binary model per class id 0..C-1. Classes are trained
/// independently (in parallel when threads are available).
OneVsAllModel one_vs_all_train(const Dataset& data, const BinaryTrainer& trainer);

/// Index of the largest score; ties go to the lowest index.
std::size_t argmax_lowest(const std::vector<double>& scores);

int one_vs_all_predict(const OneVsAllModel& model, const SparseVector& x);

/// Test-time feature deletion: every stored coordinate of every example is
/// removed independently with probability `fraction`. Survivors keep their
/// values.
Dataset delete_features(const Dataset& data, double fraction, std::uint64_t seed);

struct Fold {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};

/// k disjoint validation folds covering all examples, stratified by class
/// for classification tasks.
std::vector<Fold> kfold(const Dataset& data, int k, std::uint64_t seed);

struct MetricReport {
  TaskKind task = TaskKind::Binary;
  std::string name;  // "error_rate" or "r2"
  double value = 0.0;
  bool ok = true;
  std::string status;  // reason when !ok
};

/// Error rate of predicted labels, or predictive R^2 for regression.
MetricReport metrics(const std::vector<double>& predictions, const std::vector<double>& truths,
                     TaskKind task);

/// Number of worker threads: DROPSVM_THREADS if set to a positive integer,
/// otherwise the hardware concurrency (at least 1).
std::size_t thread_count();

/// Runs fn(i) for i in [0, n) on up to thread_count() threads. The first
/// exception thrown by any task is rethrown after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace dropsvm

#endif  // DROPSVM_DATA_HPP
