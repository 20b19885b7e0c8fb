#include "dropsvm/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>

#include "dropsvm/baseline.hpp"
#include "dropsvm/errors.hpp"

namespace dropsvm {

using nlohmann::json;

namespace {

template <typename T>
void require_nonempty(const std::vector<T>& v, const char* name) {
  if (v.empty()) throw ParameterError(std::string(name) + " must not be empty");
}

ReweightMode parse_reweight(const std::string& s) {
  if (s == "adaptive") return ReweightMode::Adaptive;
  if (s == "fixed") return ReweightMode::FixedQuadratic;
  throw ParameterError("reweight must be 'adaptive' or 'fixed', got '" + s + "'");
}

}  // namespace

void ExperimentConfig::validate() const {
  require_nonempty(noise_levels, "noise_levels");
  require_nonempty(c_grid, "c_grid");
  require_nonempty(hidden_grid, "hidden_grid");
  require_nonempty(alpha_reg_grid, "alpha_reg_grid");
  require_nonempty(seeds, "seeds");
  require_nonempty(deletion_grid, "deletion_grid");
  require_nonempty(copies_grid, "copies_grid");
  for (double c : c_grid) {
    if (!(c > 0.0) || !std::isfinite(c)) throw ParameterError("c values must be positive");
  }
  for (double level : noise_levels) NoiseModel(noise, level);
  for (std::size_t k : hidden_grid) {
    if (k == 0) throw ParameterError("hidden sizes must be positive");
  }
  for (double a : alpha_reg_grid) {
    if (!(a > 0.0)) throw ParameterError("alpha_reg values must be positive");
  }
  for (double f : deletion_grid) {
    if (!(f >= 0.0 && f <= 1.0)) throw ParameterError("deletion fractions must lie in [0, 1]");
  }
  for (std::size_t m : copies_grid) {
    if (m == 0) throw ParameterError("copies must be at least 1");
  }
  if (family != "linear" && family != "latent") {
    throw ParameterError("family must be 'linear' or 'latent', got '" + family + "'");
  }
  if (family == "latent" && loss == Loss::EpsInsensitive) {
    throw ParameterError("latent models support hinge and logistic losses only");
  }
  parse_reweight(reweight);
  if (folds < 2) throw ParameterError("folds must be at least 2");
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
    throw ParameterError("validation_fraction must lie in (0, 1)");
  }
  if (alpha_steps < 0) throw ParameterError("alpha_steps must be nonnegative");
  TrainConfig probe;
  probe.ell = ell;
  probe.epsilon = epsilon;
  probe.max_irls_iters = max_iters;
  probe.irls_tol = tol;
  probe.reweight_mode = parse_reweight(reweight);
  probe.validate(loss);
}

json to_json(const ExperimentConfig& cfg) {
  json j;
  j["train_path"] = cfg.train_path;
  j["test_path"] = cfg.test_path;
  j["model_path"] = cfg.model_path;
  j["predictions_path"] = cfg.predictions_path;
  j["task"] = cfg.task ? json(to_string(*cfg.task)) : json(nullptr);
  j["loss"] = to_string(cfg.loss);
  j["family"] = cfg.family;
  j["noise"] = to_string(cfg.noise);
  j["noise_levels"] = cfg.noise_levels;
  j["c_grid"] = cfg.c_grid;
  j["ell"] = cfg.ell;
  j["epsilon"] = cfg.epsilon;
  j["reweight"] = cfg.reweight;
  j["max_iters"] = cfg.max_iters;
  j["tol"] = cfg.tol;
  j["hidden_grid"] = cfg.hidden_grid;
  j["alpha_reg_grid"] = cfg.alpha_reg_grid;
  j["alpha_steps"] = cfg.alpha_steps;
  j["folds"] = cfg.folds;
  j["seeds"] = cfg.seeds;
  j["deletion_grid"] = cfg.deletion_grid;
  j["validation_fraction"] = cfg.validation_fraction;
  j["copies_grid"] = cfg.copies_grid;
  j["timing"] = cfg.timing;
  return j;
}

namespace {

// Grids accept a bare scalar as a one-point grid.
template <typename T>
std::vector<T> grid_value(const json& v) {
  if (v.is_array()) return v.get<std::vector<T>>();
  return {v.get<T>()};
}

}  // namespace

void apply_json(ExperimentConfig& cfg, const json& j) {
  if (!j.is_object()) throw ParameterError("config must be a JSON object");
  for (const auto& [key, v] : j.items()) {
    try {
      if (key == "command") continue;
      if (key == "train_path") cfg.train_path = v.get<std::string>();
      else if (key == "test_path") cfg.test_path = v.get<std::string>();
      else if (key == "model_path") cfg.model_path = v.get<std::string>();
      else if (key == "predictions_path") cfg.predictions_path = v.get<std::string>();
      else if (key == "task") {
        if (v.is_null()) cfg.task.reset();
        else cfg.task = parse_task(v.get<std::string>());
      } else if (key == "loss") cfg.loss = parse_loss(v.get<std::string>());
      else if (key == "family") cfg.family = v.get<std::string>();
      else if (key == "noise") cfg.noise = parse_noise_kind(v.get<std::string>());
      else if (key == "noise_levels") cfg.noise_levels = grid_value<double>(v);
      else if (key == "c_grid") cfg.c_grid = grid_value<double>(v);
      else if (key == "ell") cfg.ell = v.get<double>();
      else if (key == "epsilon") cfg.epsilon = v.get<double>();
      else if (key == "reweight") cfg.reweight = v.get<std::string>();
      else if (key == "max_iters") cfg.max_iters = v.get<int>();
      else if (key == "tol") cfg.tol = v.get<double>();
      else if (key == "hidden_grid") cfg.hidden_grid = grid_value<std::size_t>(v);
      else if (key == "alpha_reg_grid") cfg.alpha_reg_grid = grid_value<double>(v);
      else if (key == "alpha_steps") cfg.alpha_steps = v.get<int>();
      else if (key == "folds") cfg.folds = v.get<int>();
      else if (key == "seeds") cfg.seeds = grid_value<std::uint64_t>(v);
      else if (key == "deletion_grid") cfg.deletion_grid = grid_value<double>(v);
      else if (key == "validation_fraction") cfg.validation_fraction = v.get<double>();
      else if (key == "copies_grid") cfg.copies_grid = grid_value<std::size_t>(v);
      else if (key == "timing") cfg.timing = v.get<bool>();
      else throw ParameterError("unknown config key '" + key + "'");
    } catch (const json::exception& e) {
      throw ParameterError("config key '" + key + "': " + e.what());
    }
  }
}

std::vector<double> default_noise_grid() {
  return {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
}

std::vector<double> default_c_grid() {
  std::vector<double> out;
  for (int e = -3; e <= 3; ++e) out.push_back(std::pow(10.0, e));
  return out;
}

bool tie_break_less(const HyperPoint& a, const HyperPoint& b) {
  if (a.level != b.level) return a.level < b.level;
  if (a.c != b.c) return a.c < b.c;
  if (a.hidden != b.hidden) return a.hidden < b.hidden;
  return a.alpha_reg < b.alpha_reg;
}

namespace {

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_from(const json& v) {
  return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
}

json point_json(const HyperPoint& p) {
  return {{"c", p.c}, {"noise_level", p.level}, {"hidden", p.hidden}, {"alpha_reg", p.alpha_reg}};
}

}  // namespace

json to_json(const ResultRecord& r, bool timing) {
  json j;
  j["schema_version"] = kResultSchemaVersion;
  j["command"] = r.command;
  j["kind"] = r.kind;
  j["seed"] = r.seed;
  j["metric"] = r.metric;
  j["selected"] = r.selected ? point_json(*r.selected) : json(nullptr);
  json folds = json::array();
  for (double m : r.fold_metrics) folds.push_back(number_or_null(m));
  j["fold_metrics"] = folds;
  j["train_metric"] = r.train_metric ? number_or_null(*r.train_metric) : json(nullptr);
  j["validation_metric"] =
      r.validation_metric ? number_or_null(*r.validation_metric) : json(nullptr);
  j["test_metric"] = r.test_metric ? number_or_null(*r.test_metric) : json(nullptr);
  json extra = json::object();
  for (const auto& [k, v] : r.extra) extra[k] = number_or_null(v);
  j["extra"] = extra;
  j["config"] = r.config;
  if (timing) j["seconds"] = r.seconds;
  return j;
}

ResultRecord record_from_json(const json& j) {
  try {
    if (!j.is_object()) throw DataError("record must be a JSON object");
    if (j.at("schema_version").get<int>() != kResultSchemaVersion) {
      throw DataError("unsupported result schema version");
    }
    ResultRecord r;
    r.command = j.at("command").get<std::string>();
    r.kind = j.at("kind").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.metric = j.at("metric").get<std::string>();
    if (const auto& s = j.at("selected"); !s.is_null()) {
      HyperPoint p;
      p.c = s.at("c").get<double>();
      p.level = s.at("noise_level").get<double>();
      p.hidden = s.at("hidden").get<std::size_t>();
      p.alpha_reg = s.at("alpha_reg").get<double>();
      r.selected = p;
    }
    for (const auto& m : j.at("fold_metrics")) r.fold_metrics.push_back(number_from(m));
    auto opt = [&](const char* key) -> std::optional<double> {
      const auto& v = j.at(key);
      if (v.is_null()) return std::nullopt;
      return v.get<double>();
    };
    r.train_metric = opt("train_metric");
    r.validation_metric = opt("validation_metric");
    r.test_metric = opt("test_metric");
    for (const auto& [k, v] : j.at("extra").items()) r.extra[k] = number_from(v);
    r.config = j.at("config");
    if (!r.config.is_object()) throw DataError("record config must be an object");
    if (j.contains("seconds")) r.seconds = j.at("seconds").get<double>();
    return r;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed result record: ") + e.what());
  }
}

TrainConfig train_config(const ExperimentConfig& cfg, const HyperPoint& point) {
  TrainConfig t;
  t.c = point.c;
  t.ell = cfg.ell;
  t.epsilon = cfg.epsilon;
  t.noise = NoiseModel(cfg.noise, point.level);
  t.max_irls_iters = cfg.max_iters;
  t.irls_tol = cfg.tol;
  t.reweight_mode = parse_reweight(cfg.reweight);
  return t;
}

AnyModel train_model(const Dataset& data, const ExperimentConfig& cfg, const HyperPoint& point,
                     std::uint64_t seed) {
  const TrainConfig tc = train_config(cfg, point);
  const bool latent = cfg.family == "latent";
  if (data.task == TaskKind::Regression) {
    if (cfg.loss != Loss::EpsInsensitive) {
      throw ParameterError("regression data needs the svr loss");
    }
    if (latent) throw ParameterError("latent models do not support regression");
  } else if (cfg.loss == Loss::EpsInsensitive) {
    throw ParameterError("the svr loss needs regression data");
  }
  LatentOptions lo;
  lo.hidden = point.hidden;
  lo.alpha_reg = point.alpha_reg;
  lo.seed = seed;
  lo.alpha_steps = cfg.alpha_steps;
  auto binary = [&](const Dataset& d) -> BinaryModel {
    if (latent) return train_latent(d, cfg.loss, tc, lo);
    return train_linear(cfg.loss, d, tc);
  };
  if (data.task == TaskKind::Multiclass) return one_vs_all_train(data, binary);
  BinaryModel m = binary(data);
  if (auto* lin = std::get_if<LinearModel>(&m)) return std::move(*lin);
  return std::get<LatentModel>(std::move(m));
}

MetricReport evaluate(const AnyModel& model, const Dataset& data) {
  std::vector<double> pred;
  std::vector<double> truth;
  pred.reserve(data.size());
  truth.reserve(data.size());
  for (const Example& ex : data.examples) {
    pred.push_back(predict_label(model, ex.x));
    truth.push_back(ex.y);
  }
  return metrics(pred, truth, data.task);
}

double loss_of(const MetricReport& m) {
  if (!m.ok || !std::isfinite(m.value)) return std::numeric_limits<double>::infinity();
  return m.name == "r2" ? 1.0 - m.value : m.value;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

class Emitter {
 public:
  Emitter(const ExperimentConfig& cfg, const char* command, const RecordSink& sink)
      : config_(to_json(cfg)), command_(command), sink_(sink) {}

  ResultRecord make(const std::string& kind, std::uint64_t seed) const {
    ResultRecord r;
    r.command = command_;
    r.kind = kind;
    r.seed = seed;
    r.config = config_;
    return r;
  }

  void emit(ResultRecord r) {
    std::lock_guard lock(mutex_);
    if (sink_) sink_(r);
    records_.push_back(std::move(r));
  }

  std::vector<ResultRecord> take() { return std::move(records_); }

 private:
  json config_;
  std::string command_;
  const RecordSink& sink_;
  std::mutex mutex_;
  std::vector<ResultRecord> records_;
};

Dataset load_with_task(const std::string& path, const ExperimentConfig& cfg, const char* what) {
  if (path.empty()) throw ParameterError(std::string(what) + " path is required");
  return load_dataset(path, cfg.task);
}

// Test sets inherit the training task so that, e.g., a test file that only
// contains some classes is not re-inferred differently.
Dataset load_like(const std::string& path, const Dataset& train) {
  Dataset d = load_dataset(path, train.task);
  if (d.dimension > train.dimension) {
    throw DataError("'" + path + "' has more features than the training data");
  }
  d.dimension = train.dimension;
  if (train.task == TaskKind::Multiclass) {
    d.num_classes = std::max(d.num_classes, train.num_classes);
  }
  return d;
}

HyperPoint first_point(const ExperimentConfig& cfg) {
  return {cfg.c_grid.front(), cfg.noise_levels.front(), cfg.hidden_grid.front(),
          cfg.alpha_reg_grid.front()};
}

std::vector<HyperPoint> grid_points(const ExperimentConfig& cfg) {
  std::vector<HyperPoint> out;
  const bool latent = cfg.family == "latent";
  const std::vector<std::size_t> hidden =
      latent ? cfg.hidden_grid : std::vector<std::size_t>{cfg.hidden_grid.front()};
  const std::vector<double> reg =
      latent ? cfg.alpha_reg_grid : std::vector<double>{cfg.alpha_reg_grid.front()};
  for (double level : cfg.noise_levels) {
    for (double c : cfg.c_grid) {
      for (std::size_t k : hidden) {
        for (double a : reg) out.push_back({c, level, k, a});
      }
    }
  }
  return out;
}

// Index of the lowest loss, ties resolved by tie_break_less.
std::size_t select_best(const std::vector<HyperPoint>& points, const std::vector<double>& losses) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (losses[i] < losses[best] ||
        (losses[i] == losses[best] && tie_break_less(points[i], points[best]))) {
      best = i;
    }
  }
  return best;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Deterministic stream ids for the different random consumers of a run.
constexpr std::uint64_t kValidationDeletion = 1;
constexpr std::uint64_t kTestDeletion = 2;

}  // namespace

std::vector<ResultRecord> cmd_train(const ExperimentConfig& cfg, const RecordSink& sink) {
  cfg.validate();
  Emitter out(cfg, "train", sink);
  const auto start = Clock::now();
  const Dataset train = load_with_task(cfg.train_path, cfg, "train");
  const HyperPoint point = first_point(cfg);
  const std::uint64_t seed = cfg.seeds.front();
  const AnyModel model = train_model(train, cfg, point, seed);
  if (!cfg.model_path.empty()) save_model(cfg.model_path, model);
  ResultRecord r = out.make("train", seed);
  r.selected = point;
  const MetricReport tm = evaluate(model, train);
  r.metric = tm.name;
  r.train_metric = tm.value;
  if (!cfg.test_path.empty()) r.test_metric = evaluate(model, load_like(cfg.test_path, train)).value;
  r.extra["examples"] = static_cast<double>(train.size());
  r.extra["dim"] = static_cast<double>(train.dim());
  r.seconds = seconds_since(start);
  out.emit(std::move(r));
  return out.take();
}

std::vector<ResultRecord> cmd_predict(const ExperimentConfig& cfg, const RecordSink& sink) {
  Emitter out(cfg, "predict", sink);
  const auto start = Clock::now();
  if (cfg.model_path.empty()) throw ParameterError("model path is required");
  const AnyModel model = load_model(cfg.model_path);
  std::optional<TaskKind> task = cfg.task;
  if (!task) {
    if (std::holds_alternative<OneVsAllModel>(model)) {
      task = TaskKind::Multiclass;
    } else if (const auto* lin = std::get_if<LinearModel>(&model);
               lin != nullptr && lin->loss == Loss::EpsInsensitive) {
      task = TaskKind::Regression;
    } else {
      task = TaskKind::Binary;
    }
  }
  if (cfg.test_path.empty()) throw ParameterError("test path is required");
  Dataset data = load_dataset(cfg.test_path, task);
  if (data.dimension > model_dim(model)) {
    throw DataError("'" + cfg.test_path + "' has more features than the model");
  }
  std::vector<double> pred;
  std::vector<double> truth;
  for (const Example& ex : data.examples) {
    pred.push_back(predict_label(model, ex.x));
    truth.push_back(ex.y);
  }
  if (!cfg.predictions_path.empty()) {
    std::ofstream f(cfg.predictions_path);
    if (!f) throw DataError("cannot write '" + cfg.predictions_path + "'");
    char buf[32];
    for (double p : pred) {
      std::snprintf(buf, sizeof buf, "%.17g", p);
      f << buf << '\n';
    }
  }
  ResultRecord r = out.make("predict", cfg.seeds.front());
  if (!pred.empty()) {
    const MetricReport m = metrics(pred, truth, data.task);
    r.metric = m.name;
    r.test_metric = m.value;
  }
  r.extra["examples"] = static_cast<double>(data.size());
  r.seconds = seconds_since(start);
  out.emit(std::move(r));
  return out.take();
}

std::vector<ResultRecord> cmd_cv(const ExperimentConfig& cfg, const RecordSink& sink) {
  cfg.validate();
  Emitter out(cfg, "cv", sink);
  const Dataset train = load_with_task(cfg.train_path, cfg, "train");
  std::optional<Dataset> test;
  if (!cfg.test_path.empty()) test = load_like(cfg.test_path, train);
  const std::vector<HyperPoint> points = grid_points(cfg);
  const auto nfolds = static_cast<std::size_t>(cfg.folds);

  for (std::size_t si = 0; si < cfg.seeds.size(); ++si) {
    const std::uint64_t seed = cfg.seeds[si];
    const auto start = Clock::now();
    const std::vector<Fold> folds = kfold(train, cfg.folds, seed);
    std::vector<MetricReport> unit(points.size() * nfolds);
    parallel_for(unit.size(), [&](std::size_t u) {
      const HyperPoint& p = points[u / nfolds];
      const Fold& f = folds[u % nfolds];
      const AnyModel m = train_model(train.subset(f.train), cfg, p, seed);
      unit[u] = evaluate(m, train.subset(f.validation));
    });

    std::vector<double> losses(points.size());
    std::string metric_name;
    for (std::size_t pi = 0; pi < points.size(); ++pi) {
      ResultRecord r = out.make("cv-point", seed);
      r.selected = points[pi];
      std::vector<double> fold_losses;
      for (std::size_t f = 0; f < nfolds; ++f) {
        const MetricReport& m = unit[pi * nfolds + f];
        metric_name = m.name;
        r.fold_metrics.push_back(m.ok ? m.value : std::numeric_limits<double>::quiet_NaN());
        fold_losses.push_back(loss_of(m));
      }
      losses[pi] = mean_of(fold_losses);
      r.metric = metric_name;
      r.validation_metric = mean_of(r.fold_metrics);
      out.emit(std::move(r));
    }

    const std::size_t best = select_best(points, losses);
    const AnyModel model = train_model(train, cfg, points[best], seed);
    if (si == 0 && !cfg.model_path.empty()) save_model(cfg.model_path, model);
    ResultRecord r = out.make("cv-best", seed);
    r.selected = points[best];
    r.metric = metric_name;
    for (std::size_t f = 0; f < nfolds; ++f) {
      const MetricReport& m = unit[best * nfolds + f];
      r.fold_metrics.push_back(m.ok ? m.value : std::numeric_limits<double>::quiet_NaN());
    }
    r.validation_metric = mean_of(r.fold_metrics);
    r.train_metric = evaluate(model, train).value;
    if (test) r.test_metric = evaluate(model, *test).value;
    r.seconds = seconds_since(start);
    out.emit(std::move(r));
  }
  return out.take();
}

std::vector<ResultRecord> cmd_nightmare(const ExperimentConfig& cfg, const RecordSink& sink) {
  cfg.validate();
  Emitter out(cfg, "nightmare", sink);
  if (cfg.test_path.empty()) throw ParameterError("test path is required");

  if (cfg.train_path.empty()) {
    // Fixed pre-trained model: only the deletion curve.
    if (cfg.model_path.empty()) throw ParameterError("nightmare needs a train path or a model path");
    const AnyModel model = load_model(cfg.model_path);
    const std::optional<TaskKind> task =
        cfg.task ? cfg.task
                 : std::optional<TaskKind>(std::holds_alternative<OneVsAllModel>(model)
                                               ? TaskKind::Multiclass
                                               : TaskKind::Binary);
    const Dataset test = load_dataset(cfg.test_path, task);
    for (const std::uint64_t seed : cfg.seeds) {
      for (double f : cfg.deletion_grid) {
        const auto start = Clock::now();
        ResultRecord r = out.make("nightmare", seed);
        const Dataset del = delete_features(test, f, derive_seed(seed, kTestDeletion));
        const MetricReport m = evaluate(model, del);
        r.metric = m.name;
        r.test_metric = m.value;
        r.extra["deletion_fraction"] = f;
        r.seconds = seconds_since(start);
        out.emit(std::move(r));
      }
    }
    return out.take();
  }

  const Dataset train = load_with_task(cfg.train_path, cfg, "train");
  if (train.task == TaskKind::Regression) throw ParameterError("nightmare needs a classification task");
  const Dataset test = load_like(cfg.test_path, train);
  const std::vector<HyperPoint> points = grid_points(cfg);
  const int k = std::max(2, static_cast<int>(std::lround(1.0 / cfg.validation_fraction)));

  for (const std::uint64_t seed : cfg.seeds) {
    const auto start = Clock::now();
    const Fold split = kfold(train, k, seed).front();
    const Dataset fit = train.subset(split.train);
    const Dataset val = train.subset(split.validation);
    std::vector<std::optional<AnyModel>> fit_models(points.size());
    std::vector<std::optional<AnyModel>> full_models(points.size());
    parallel_for(points.size(), [&](std::size_t i) {
      fit_models[i] = train_model(fit, cfg, points[i], seed);
    });
    const double setup = seconds_since(start);

    for (double f : cfg.deletion_grid) {
      const auto fstart = Clock::now();
      // The same deletion stream at every fraction keeps curves coupled
      // across fractions for a given seed.
      const Dataset val_del = delete_features(val, f, derive_seed(seed, kValidationDeletion));
      const Dataset test_del = delete_features(test, f, derive_seed(seed, kTestDeletion));
      std::vector<double> losses(points.size());
      parallel_for(points.size(), [&](std::size_t i) {
        losses[i] = loss_of(evaluate(*fit_models[i], val_del));
      });
      const std::size_t best = select_best(points, losses);
      if (!full_models[best]) full_models[best] = train_model(train, cfg, points[best], seed);
      const MetricReport m = evaluate(*full_models[best], test_del);
      ResultRecord r = out.make("nightmare", seed);
      r.selected = points[best];
      r.metric = m.name;
      r.validation_metric = losses[best];
      r.test_metric = m.value;
      r.extra["deletion_fraction"] = f;
      r.seconds = seconds_since(fstart) + (f == cfg.deletion_grid.front() ? setup : 0.0);
      out.emit(std::move(r));
    }
  }
  return out.take();
}

std::vector<ResultRecord> cmd_compare_explicit(const ExperimentConfig& cfg,
                                               const RecordSink& sink) {
  cfg.validate();
  Emitter out(cfg, "compare-explicit", sink);
  if (cfg.family != "linear") throw ParameterError("compare-explicit needs the linear family");
  if (cfg.loss == Loss::EpsInsensitive) {
    throw ParameterError("compare-explicit supports hinge and logistic losses");
  }
  const Dataset train = load_with_task(cfg.train_path, cfg, "train");
  if (train.task != TaskKind::Binary) throw ParameterError("compare-explicit needs binary data");
  if (cfg.test_path.empty()) throw ParameterError("test path is required");
  const Dataset test = load_like(cfg.test_path, train);
  const HyperPoint point = first_point(cfg);
  const TrainConfig tc = train_config(cfg, point);

  for (const std::uint64_t seed : cfg.seeds) {
    std::vector<ResultRecord> rows(cfg.copies_grid.size());
    parallel_for(rows.size(), [&](std::size_t i) {
      const auto start = Clock::now();
      const std::size_t m = cfg.copies_grid[i];
      const AnyModel model = train_explicit(train, tc, m, derive_seed(seed, m), cfg.loss);
      ResultRecord r = out.make("explicit", seed);
      r.selected = point;
      const MetricReport tm = evaluate(model, train);
      r.metric = tm.name;
      r.train_metric = tm.value;
      r.test_metric = evaluate(model, test).value;
      r.extra["copies"] = static_cast<double>(m);
      r.seconds = seconds_since(start);
      rows[i] = std::move(r);
    });
    for (auto& r : rows) out.emit(std::move(r));

    const auto start = Clock::now();
    const AnyModel model = train_linear(cfg.loss, train, tc);
    ResultRecord r = out.make("marginalized", seed);
    r.selected = point;
    const MetricReport tm = evaluate(model, train);
    r.metric = tm.name;
    r.train_metric = tm.value;
    r.test_metric = evaluate(model, test).value;
    r.seconds = seconds_since(start);
    out.emit(std::move(r));
  }
  return out.take();
}

}  // namespace dropsvm
