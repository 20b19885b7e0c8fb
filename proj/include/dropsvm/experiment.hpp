#ifndef DROPSVM_EXPERIMENT_HPP
#define DROPSVM_EXPERIMENT_HPP

#include <cstdint>
#include <functional>
#include <json.hpp>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dropsvm/data.hpp"
#include "dropsvm/model_io.hpp"

namespace dropsvm {

inline constexpr int kResultSchemaVersion = 1;

/// Everything a command needs. Field names double as config-file keys and
/// (with '_' spelled '-') as command-line flags.
struct ExperimentConfig {
  std::string train_path;
  std::string test_path;
  std::string model_path;        // written by train/cv, read by predict/nightmare
  std::string predictions_path;  // predict output; empty means none
  std::optional<TaskKind> task;  // inferred from labels when unset

  Loss loss = Loss::Hinge;
  std::string family = "linear";  // "linear" or "latent"
  NoiseKind noise = NoiseKind::Dropout;
  std::vector<double> noise_levels = {0.5};
  std::vector<double> c_grid = {1.0};
  double ell = 1.0;
  double epsilon = 0.1;
  std::string reweight = "adaptive";  // or "fixed"
  int max_iters = 100;
  double tol = 1e-5;

  std::vector<std::size_t> hidden_grid = {8};
  std::vector<double> alpha_reg_grid = {1.0};
  int alpha_steps = 5;

  int folds = 5;
  std::vector<std::uint64_t> seeds = {0};
  std::vector<double> deletion_grid = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  double validation_fraction = 0.2;  // nightmare's matched-deletion split
  std::vector<std::size_t> copies_grid = {1, 4, 16, 64, 256};

  bool timing = true;  // include wall-clock seconds in records

  /// Throws ParameterError for empty grids or out-of-range values.
  void validate() const;
};

nlohmann::json to_json(const ExperimentConfig& cfg);

/// Applies the keys of `j` on top of `cfg`. Unknown keys and ill-typed values
/// are ParameterErrors.
void apply_json(ExperimentConfig& cfg, const nlohmann::json& j);

/// Default grids: q in {0, 0.1, ..., 0.9}, c log-spaced.
std::vector<double> default_noise_grid();
std::vector<double> default_c_grid();

/// One point of a hyperparameter grid.
struct HyperPoint {
  double c = 1.0;
  double level = 0.0;  // noise parameter (dropout q, variance, scale)
  std::size_t hidden = 8;
  double alpha_reg = 1.0;
};

/// Smaller (level, c, hidden, alpha_reg) first; the cv tie-break order.
bool tie_break_less(const HyperPoint& a, const HyperPoint& b);

struct ResultRecord {
  std::string command;
  std::string kind;  // e.g. "train", "cv-point", "cv-best", "nightmare", "explicit"
  std::uint64_t seed = 0;
  nlohmann::json config;
  std::optional<HyperPoint> selected;
  std::string metric;  // "error_rate" or "r2"
  std::vector<double> fold_metrics;
  std::optional<double> train_metric;
  std::optional<double> validation_metric;
  std::optional<double> test_metric;
  std::map<std::string, double> extra;  // deletion_fraction, copies, ...
  double seconds = 0.0;
};

/// Serializes with "schema_version"; `timing` controls the "seconds" field.
nlohmann::json to_json(const ResultRecord& r, bool timing);

/// Parses and schema-checks a record; throws DataError on mismatch.
ResultRecord record_from_json(const nlohmann::json& j);

using RecordSink = std::function<void(const ResultRecord&)>;

/// The training configuration a grid point implies.
TrainConfig train_config(const ExperimentConfig& cfg, const HyperPoint& point);

/// Trains the configured family on `data`, going one-vs-all for multiclass
/// tasks.
AnyModel train_model(const Dataset& data, const ExperimentConfig& cfg, const HyperPoint& point,
                     std::uint64_t seed);

MetricReport evaluate(const AnyModel& model, const Dataset& data);

/// Lower is better: error rate, or 1 - R^2 for regression.
double loss_of(const MetricReport& m);

/// Command implementations. Each returns its records after passing them to
/// `sink` (when set) in emission order.
std::vector<ResultRecord> cmd_train(const ExperimentConfig& cfg, const RecordSink& sink = {});
std::vector<ResultRecord> cmd_predict(const ExperimentConfig& cfg, const RecordSink& sink = {});
std::vector<ResultRecord> cmd_cv(const ExperimentConfig& cfg, const RecordSink& sink = {});
std::vector<ResultRecord> cmd_nightmare(const ExperimentConfig& cfg,
                                        const RecordSink& sink = {});
std::vector<ResultRecord> cmd_compare_explicit(const ExperimentConfig& cfg,
                                               const RecordSink& sink = {});

}  // namespace dropsvm

#endif  // DROPSVM_EXPERIMENT_HPP
