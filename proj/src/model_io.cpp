#include "dropsvm/model_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "dropsvm/errors.hpp"

namespace dropsvm {

namespace {

constexpr int kFormatVersion = 1;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_header(std::ostream& out, const char* type, Loss loss, const NoiseModel& noise,
                  std::size_t dim, double b) {
  out << "type " << type << '\n';
  out << "loss " << to_string(loss) << '\n';
  out << "noise " << to_string(noise.kind()) << ' ' << fmt(noise.param()) << '\n';
  out << "dim " << dim << '\n';
  out << "offset " << fmt(b) << '\n';
}

void write_vector(std::ostream& out, const char* key, const Eigen::VectorXd& v) {
  out << key;
  for (Eigen::Index i = 0; i < v.size(); ++i) out << ' ' << fmt(v[i]);
  out << '\n';
}

void write_binary(std::ostream& out, const BinaryModel& model) {
  if (const auto* lin = std::get_if<LinearModel>(&model)) {
    write_header(out, "linear", lin->loss, lin->noise, lin->dim(), lin->b);
    write_vector(out, "weights", lin->w);
    return;
  }
  const auto& lat = std::get<LatentModel>(model);
  write_header(out, "latent", lat.loss, lat.noise, lat.dim(), lat.b);
  out << "hidden " << lat.hidden() << '\n';
  for (Eigen::Index d = 0; d < lat.alpha.rows(); ++d) {
    write_vector(out, "alpha", lat.alpha.row(d).transpose());
  }
  write_vector(out, "weights", lat.w);
}

// Line-oriented reader that reports positions in errors.
class Reader {
 public:
  Reader(std::istream& in, std::string name) : in_(in), name_(std::move(name)) {}

  std::istringstream expect(const std::string& key) {
    std::string line;
    while (std::getline(in_, line)) {
      ++lineno_;
      if (line.find_first_not_of(" \t\r") != std::string::npos) break;
      line.clear();
    }
    std::istringstream ss(line);
    std::string got;
    if (!(ss >> got) || got != key) fail("expected '" + key + "'");
    return ss;
  }

  double number(std::istringstream& ss) {
    std::string tok;
    if (!(ss >> tok)) fail("missing number");
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size() || !std::isfinite(v)) fail("bad number '" + tok + "'");
    return v;
  }

  std::size_t count(std::istringstream& ss) {
    const double v = number(ss);
    if (v < 0 || v != std::floor(v) || v > 1e9) fail("bad count");
    return static_cast<std::size_t>(v);
  }

  std::string word(std::istringstream& ss) {
    std::string tok;
    if (!(ss >> tok)) fail("missing word");
    return tok;
  }

  void done(std::istringstream& ss) {
    std::string extra;
    if (ss >> extra) fail("unexpected trailing '" + extra + "'");
  }

  Eigen::VectorXd vector(const std::string& key, std::size_t n) {
    auto ss = expect(key);
    Eigen::VectorXd v(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) v[static_cast<Eigen::Index>(i)] = number(ss);
    done(ss);
    return v;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw DataError(name_ + ":" + std::to_string(lineno_) + ": " + what);
  }

 private:
  std::istream& in_;
  std::string name_;
  std::size_t lineno_ = 0;
};

struct Header {
  std::string type;
  Loss loss;
  NoiseModel noise;
  std::size_t dim;
  double b;
};

Header read_header(Reader& r, const std::string& type) {
  Header h;
  h.type = type;
  {
    auto ss = r.expect("loss");
    try {
      h.loss = parse_loss(r.word(ss));
    } catch (const ParameterError& e) {
      r.fail(e.what());
    }
  }
  {
    auto ss = r.expect("noise");
    const std::string kind = r.word(ss);
    const double param = r.number(ss);
    try {
      h.noise = NoiseModel(parse_noise_kind(kind), param);
    } catch (const std::exception& e) {
      r.fail(e.what());
    }
  }
  {
    auto ss = r.expect("dim");
    h.dim = r.count(ss);
  }
  {
    auto ss = r.expect("offset");
    h.b = r.number(ss);
  }
  return h;
}

BinaryModel read_binary(Reader& r, const std::string& type) {
  const Header h = read_header(r, type);
  if (type == "linear") {
    LinearModel m;
    m.loss = h.loss;
    m.noise = h.noise;
    m.b = h.b;
    m.w = r.vector("weights", h.dim);
    return m;
  }
  if (type != "latent") r.fail("unknown model type '" + type + "'");
  LatentModel m;
  m.loss = h.loss;
  m.noise = h.noise;
  m.b = h.b;
  std::size_t k = 0;
  {
    auto ss = r.expect("hidden");
    k = r.count(ss);
  }
  m.alpha.resize(static_cast<Eigen::Index>(h.dim), static_cast<Eigen::Index>(k));
  for (std::size_t d = 0; d < h.dim; ++d) {
    m.alpha.row(static_cast<Eigen::Index>(d)) = r.vector("alpha", k).transpose();
  }
  m.w = r.vector("weights", k);
  return m;
}

}  // namespace

void write_model(std::ostream& out, const AnyModel& model) {
  out << "dropsvm-model " << kFormatVersion << '\n';
  if (const auto* ova = std::get_if<OneVsAllModel>(&model)) {
    out << "type one-vs-all\n";
    out << "classes " << ova->models.size() << '\n';
    for (std::size_t k = 0; k < ova->models.size(); ++k) {
      out << "class " << ova->classes[k] << '\n';
      write_binary(out, ova->models[k]);
    }
    return;
  }
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (!std::is_same_v<T, OneVsAllModel>) write_binary(out, BinaryModel(m));
      },
      model);
}

AnyModel read_model(std::istream& in, const std::string& source_name) {
  Reader r(in, source_name);
  {
    auto ss = r.expect("dropsvm-model");
    if (r.count(ss) != kFormatVersion) r.fail("unsupported model format version");
  }
  std::string type;
  {
    auto ss = r.expect("type");
    type = r.word(ss);
  }
  if (type != "one-vs-all") {
    BinaryModel m = read_binary(r, type);
    if (auto* lin = std::get_if<LinearModel>(&m)) return std::move(*lin);
    return std::get<LatentModel>(std::move(m));
  }
  OneVsAllModel ova;
  std::size_t c = 0;
  {
    auto ss = r.expect("classes");
    c = r.count(ss);
  }
  for (std::size_t k = 0; k < c; ++k) {
    {
      auto ss = r.expect("class");
      ova.classes.push_back(static_cast<int>(r.count(ss)));
    }
    auto ss = r.expect("type");
    ova.models.push_back(read_binary(r, r.word(ss)));
  }
  if (!ova.models.empty()) {
    const std::size_t d = dropsvm::model_dim(ova.models.front());
    for (const auto& m : ova.models) {
      if (dropsvm::model_dim(m) != d) r.fail("one-vs-all members disagree on dim");
    }
  }
  return ova;
}

void save_model(const std::string& path, const AnyModel& model) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  write_model(out, model);
  if (!out) throw DataError("write failed for '" + path + "'");
}

AnyModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return read_model(in, path);
}

double decide(const AnyModel& model, const SparseVector& x) {
  if (const auto* ova = std::get_if<OneVsAllModel>(&model)) {
    return static_cast<double>(one_vs_all_predict(*ova, x));
  }
  if (const auto* lin = std::get_if<LinearModel>(&model)) return predict(*lin, x);
  return predict_latent(std::get<LatentModel>(model), x);
}

double predict_label(const AnyModel& model, const SparseVector& x) {
  const double s = decide(model, x);
  if (std::holds_alternative<OneVsAllModel>(model)) return s;
  if (const auto* lin = std::get_if<LinearModel>(&model)) {
    if (lin->loss == Loss::EpsInsensitive) return s;
  }
  return s >= 0.0 ? 1.0 : -1.0;
}

std::size_t model_dim(const AnyModel& model) {
  if (const auto* ova = std::get_if<OneVsAllModel>(&model)) {
    return ova->models.empty() ? 0 : dropsvm::model_dim(ova->models.front());
  }
  return std::visit(
      [](const auto& m) -> std::size_t {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, OneVsAllModel>) {
          return 0;
        } else {
          return m.dim();
        }
      },
      model);
}

}  // namespace dropsvm
