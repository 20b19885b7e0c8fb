#include "dropsvm/data.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "dropsvm/errors.hpp"

namespace dropsvm {

std::string to_string(TaskKind task) {
  switch (task) {
    case TaskKind::Binary: return "binary";
    case TaskKind::Multiclass: return "multiclass";
    case TaskKind::Regression: return "regression";
  }
  return "binary";
}

TaskKind parse_task(const std::string& name) {
  if (name == "binary") return TaskKind::Binary;
  if (name == "multiclass") return TaskKind::Multiclass;
  if (name == "regression") return TaskKind::Regression;
  throw ParameterError("unknown task '" + name + "'");
}

TaskKind infer_task(const std::vector<double>& labels) {
  bool pm1 = true;
  bool ints = true;
  for (double y : labels) {
    if (y != 1.0 && y != -1.0) pm1 = false;
    if (!(y >= 0.0 && y < 100000.0 && y == std::floor(y))) ints = false;
  }
  if (pm1) return TaskKind::Binary;
  if (ints) return TaskKind::Multiclass;
  return TaskKind::Regression;
}

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
  Dataset out;
  out.dimension = dimension;
  out.task = task;
  out.num_classes = num_classes;
  out.examples.reserve(indices.size());
  for (std::size_t i : indices) {
    if (i >= examples.size()) throw DomainError("subset index out of range");
    out.examples.push_back(examples[i]);
  }
  return out;
}

void Dataset::validate() const {
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const Example& ex = examples[i];
    const std::string where = " (example " + std::to_string(i) + ")";
    if (ex.x.min_dim() > dimension) throw DataError("feature index beyond dim" + where);
    for (double v : ex.x.values()) {
      if (!std::isfinite(v)) throw DataError("non-finite feature value" + where);
    }
    if (!std::isfinite(ex.y)) throw DataError("non-finite label" + where);
    switch (task) {
      case TaskKind::Binary:
        if (ex.y != 1.0 && ex.y != -1.0) throw DataError("binary labels must be +1 or -1" + where);
        break;
      case TaskKind::Multiclass:
        if (ex.y != std::floor(ex.y) || ex.y < 0.0 || ex.y >= num_classes) {
          throw DataError("multiclass labels must be integers in [0, C)" + where);
        }
        break;
      case TaskKind::Regression:
        break;
    }
  }
}

namespace {

double parse_double(std::string_view s, const std::string& where) {
  // strtod accepts the "+1" label spelling that from_chars rejects.
  const std::string tmp(s);
  char* end = nullptr;
  const double v = std::strtod(tmp.c_str(), &end);
  if (tmp.empty() || end != tmp.c_str() + tmp.size()) {
    throw DataError(where + ": cannot parse number '" + tmp + "'");
  }
  if (!std::isfinite(v)) throw DataError(where + ": non-finite value '" + tmp + "'");
  return v;
}

std::size_t parse_size(std::string_view s, const std::string& where) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw DataError(where + ": cannot parse index '" + std::string(s) + "'");
  }
  return v;
}

void finish(Dataset& data, std::optional<TaskKind> task) {
  std::vector<double> labels;
  labels.reserve(data.examples.size());
  for (const Example& ex : data.examples) labels.push_back(ex.y);
  data.task = task.value_or(infer_task(labels));
  if (data.task == TaskKind::Multiclass) {
    double top = -1.0;
    for (double y : labels) top = std::max(top, y);
    data.num_classes = static_cast<int>(top) + 1;
  }
  data.validate();
}

}  // namespace

Dataset parse_sparse(std::istream& in, const std::string& source_name,
                     std::optional<TaskKind> task) {
  Dataset data;
  std::optional<std::size_t> declared_dim;
  std::size_t base = 1;
  std::size_t seen_dim = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = source_name + ":" + std::to_string(lineno);
    std::istringstream tokens(line);
    std::string tok;
    if (!(tokens >> tok)) continue;
    if (tok[0] == '#') {
      // Header directives; any other comment is ignored.
      std::string key = tok;
      do {
        if (key == "#dim" || key == "#base") {
          std::string value;
          if (!(tokens >> value)) throw DataError(where + ": " + key + " needs a value");
          const std::size_t v = parse_size(value, where);
          if (key == "#dim") {
            declared_dim = v;
          } else {
            if (v > 1) throw DataError(where + ": #base must be 0 or 1");
            base = v;
          }
        }
      } while (tokens >> key);
      continue;
    }
    Example ex;
    ex.y = parse_double(tok, where);
    while (tokens >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos) throw DataError(where + ": expected idx:value, got '" + tok + "'");
      const std::size_t raw = parse_size(std::string_view(tok).substr(0, colon), where);
      if (raw < base) throw DataError(where + ": index below base " + std::to_string(base));
      const std::size_t idx = raw - base;
      if (idx > std::numeric_limits<Index>::max() - 1) throw DataError(where + ": index too large");
      const double value = parse_double(std::string_view(tok).substr(colon + 1), where);
      if (!ex.x.empty() && idx <= ex.x.indices().back()) {
        throw DataError(where + ": indices must be strictly increasing");
      }
      if (value != 0.0) ex.x.push_back(static_cast<Index>(idx), value);
      seen_dim = std::max(seen_dim, idx + 1);
    }
    data.examples.push_back(std::move(ex));
  }
  if (declared_dim) {
    if (seen_dim > *declared_dim) {
      throw DataError(source_name + ": feature index exceeds declared #dim " +
                      std::to_string(*declared_dim));
    }
    data.dimension = *declared_dim;
  } else {
    data.dimension = seen_dim;
  }
  finish(data, task);
  return data;
}

Dataset load_sparse(const std::string& path, std::optional<TaskKind> task) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return parse_sparse(in, path, task);
}

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_sparse(std::ostream& out, const Dataset& data, int base) {
  if (base != 0 && base != 1) throw ParameterError("base must be 0 or 1");
  out << "#dim " << data.dimension << " #base " << base << '\n';
  for (const Example& ex : data.examples) {
    out << format_double(ex.y);
    for (std::size_t k = 0; k < ex.x.nnz(); ++k) {
      out << ' ' << (ex.x.index(k) + static_cast<std::size_t>(base)) << ':'
          << format_double(ex.x.value(k));
    }
    out << '\n';
  }
}

void save_sparse(const std::string& path, const Dataset& data, int base) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  write_sparse(out, data, base);
  if (!out) throw DataError("write failed for '" + path + "'");
}

Dataset load_csv(const std::string& path, std::optional<TaskKind> task) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  Dataset data;
  std::string line;
  std::size_t lineno = 0;
  std::optional<std::size_t> columns;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const std::string where = path + ":" + std::to_string(lineno);
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      const auto a = cell.find_first_not_of(" \t");
      const auto b = cell.find_last_not_of(" \t");
      cells.push_back(a == std::string::npos ? std::string() : cell.substr(a, b - a + 1));
    }
    std::vector<double> row;
    try {
      for (const auto& c : cells) row.push_back(parse_double(c, where));
    } catch (const DataError&) {
      if (lineno == 1 && data.examples.empty()) continue;  // header
      throw;
    }
    if (row.size() < 2) throw DataError(where + ": need at least one feature and a label");
    if (columns && *columns != row.size()) throw DataError(where + ": inconsistent column count");
    columns = row.size();
    Example ex;
    ex.y = row.back();
    for (std::size_t d = 0; d + 1 < row.size(); ++d) {
      if (row[d] != 0.0) ex.x.push_back(static_cast<Index>(d), row[d]);
    }
    data.examples.push_back(std::move(ex));
  }
  data.dimension = columns ? *columns - 1 : 0;
  finish(data, task);
  return data;
}

Dataset load_dataset(const std::string& path, std::optional<TaskKind> task) {
  if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0) {
    return load_csv(path, task);
  }
  return load_sparse(path, task);
}

Dataset binary_relabel(const Dataset& data, int cls) {
  Dataset out = data;
  out.task = TaskKind::Binary;
  out.num_classes = 0;
  for (Example& ex : out.examples) ex.y = static_cast<int>(ex.y) == cls ? 1.0 : -1.0;
  return out;
}

double score(const BinaryModel& model, const SparseVector& x) {
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, LinearModel>) {
          return predict(m, x);
        } else {
          return predict_latent(m, x);
        }
      },
      model);
}

std::size_t model_dim(const BinaryModel& model) {
  return std::visit([](const auto& m) { return m.dim(); }, model);
}

OneVsAllModel one_vs_all_train(const Dataset& data, const BinaryTrainer& trainer) {
  if (data.task != TaskKind::Multiclass) throw ParameterError("one-vs-all needs a multiclass dataset");
  if (data.num_classes < 2) throw ParameterError("one-vs-all needs at least two classes");
  const auto c = static_cast<std::size_t>(data.num_classes);
  std::vector<std::size_t> counts(c, 0);
  for (const Example& ex : data.examples) ++counts[static_cast<std::size_t>(ex.y)];
  for (std::size_t k = 0; k < c; ++k) {
    if (counts[k] == 0) {
      warn("class " + std::to_string(k) + " has no examples; training it on all-negative labels");
    }
  }
  OneVsAllModel out;
  out.classes.resize(c);
  std::iota(out.classes.begin(), out.classes.end(), 0);
  std::vector<std::optional<BinaryModel>> slots(c);
  parallel_for(c, [&](std::size_t k) {
    slots[k] = trainer(binary_relabel(data, static_cast<int>(k)));
  });
  out.models.reserve(c);
  for (auto& s : slots) out.models.push_back(std::move(*s));
  return out;
}

std::size_t argmax_lowest(const std::vector<double>& scores) {
  if (scores.empty()) throw DomainError("argmax of an empty score list");
  std::size_t best = 0;
  for (std::size_t k = 1; k < scores.size(); ++k) {
    if (scores[k] > scores[best]) best = k;
  }
  return best;
}

int one_vs_all_predict(const OneVsAllModel& model, const SparseVector& x) {
  std::vector<double> scores;
  scores.reserve(model.models.size());
  for (const BinaryModel& m : model.models) scores.push_back(score(m, x));
  return model.classes[argmax_lowest(scores)];
}

Dataset delete_features(const Dataset& data, double fraction, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw ParameterError("deletion fraction must be in [0, 1]");
  Dataset out = data;
  if (fraction == 0.0) return out;
  for (std::size_t i = 0; i < out.examples.size(); ++i) {
    const SparseVector& x = data.examples[i].x;
    std::mt19937_64 rng(derive_seed(seed, i));
    std::bernoulli_distribution drop(fraction);
    SparseVector kept;
    for (std::size_t k = 0; k < x.nnz(); ++k) {
      if (!drop(rng)) kept.push_back(x.index(k), x.value(k));
    }
    out.examples[i].x = std::move(kept);
  }
  return out;
}

std::vector<Fold> kfold(const Dataset& data, int k, std::uint64_t seed) {
  const std::size_t n = data.size();
  if (k < 2) throw ParameterError("k must be at least 2");
  if (n < static_cast<std::size_t>(k)) throw ParameterError("need at least k examples for k folds");
  std::mt19937_64 rng(seed);

  // Groups are dealt round-robin with a shared counter, so each fold gets
  // every class's count divided by k up to one example.
  std::vector<std::vector<std::size_t>> groups;
  bool stratify = data.task != TaskKind::Regression;
  if (stratify) {
    std::map<double, std::vector<std::size_t>> by_label;
    for (std::size_t i = 0; i < n; ++i) by_label[data.examples[i].y].push_back(i);
    for (const auto& [label, members] : by_label) {
      if (members.size() < static_cast<std::size_t>(k)) {
        warn("a class has fewer than k members; using unstratified folds");
        stratify = false;
        break;
      }
    }
    if (stratify) {
      for (auto& [label, members] : by_label) groups.push_back(std::move(members));
    }
  }
  if (!stratify) {
    groups.assign(1, std::vector<std::size_t>(n));
    std::iota(groups[0].begin(), groups[0].end(), 0);
  }

  std::vector<int> assignment(n);
  std::size_t counter = 0;
  for (auto& g : groups) {
    std::shuffle(g.begin(), g.end(), rng);
    for (std::size_t i : g) assignment[i] = static_cast<int>(counter++ % static_cast<std::size_t>(k));
  }
  std::vector<Fold> folds(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < n; ++i) {
    for (int f = 0; f < k; ++f) {
      auto& fold = folds[static_cast<std::size_t>(f)];
      (assignment[i] == f ? fold.validation : fold.train).push_back(i);
    }
  }
  return folds;
}

MetricReport metrics(const std::vector<double>& predictions, const std::vector<double>& truths,
                     TaskKind task) {
  if (predictions.size() != truths.size()) throw DomainError("prediction and truth lengths differ");
  if (predictions.empty()) throw DomainError("metrics need at least one prediction");
  MetricReport r;
  r.task = task;
  const auto n = static_cast<double>(truths.size());
  if (task != TaskKind::Regression) {
    r.name = "error_rate";
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < truths.size(); ++i) wrong += predictions[i] != truths[i];
    r.value = static_cast<double>(wrong) / n;
    return r;
  }
  r.name = "r2";
  const double mean = std::accumulate(truths.begin(), truths.end(), 0.0) / n;
  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    ss_res += (truths[i] - predictions[i]) * (truths[i] - predictions[i]);
    ss_tot += (truths[i] - mean) * (truths[i] - mean);
  }
  if (!(ss_tot > 0.0)) {
    r.ok = false;
    r.value = std::numeric_limits<double>::quiet_NaN();
    r.status = "R^2 undefined: responses have zero variance";
    return r;
  }
  r.value = 1.0 - ss_res / ss_tot;
  return r;
}

std::size_t thread_count() {
  if (const char* env = std::getenv("DROPSVM_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    warn("ignoring invalid DROPSVM_THREADS value '" + std::string(env) + "'");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min(n, thread_count());
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace dropsvm
