// Python bindings for the trainers, the data loaders and the experiment
// commands. Dense numpy inputs are converted to sparse rows on the way in.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dropsvm/baseline.hpp"
#include "dropsvm/data.hpp"
#include "dropsvm/errors.hpp"
#include "dropsvm/experiment.hpp"
#include "dropsvm/latent.hpp"
#include "dropsvm/linear.hpp"
#include "dropsvm/model_io.hpp"
#include "dropsvm/reweight.hpp"

namespace py = pybind11;
using namespace dropsvm;

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Dataset from_numpy(const RowMatrix& x, const Eigen::VectorXd& y, std::optional<std::string> task) {
  if (x.rows() != y.size()) throw DomainError("X and y have different numbers of rows");
  Dataset d;
  d.dimension = static_cast<std::size_t>(x.cols());
  std::vector<double> labels(y.data(), y.data() + y.size());
  d.task = task ? parse_task(*task) : infer_task(labels);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    d.examples.push_back({SparseVector::from_dense(x.row(i).transpose()), y[i], 1.0});
  }
  if (d.task == TaskKind::Multiclass) {
    double top = 0;
    for (double v : labels) top = std::max(top, v);
    d.num_classes = static_cast<int>(top) + 1;
  }
  d.validate();
  return d;
}

RowMatrix to_numpy(const Dataset& d) {
  RowMatrix x = RowMatrix::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.dim()));
  for (std::size_t i = 0; i < d.size(); ++i) {
    x.row(static_cast<Eigen::Index>(i)) = d.examples[i].x.to_dense(d.dim()).transpose();
  }
  return x;
}

template <typename Score>
Eigen::VectorXd score_rows(const RowMatrix& x, Score score) {
  Eigen::VectorXd out(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) out[i] = score(SparseVector::from_dense(x.row(i).transpose()));
  return out;
}

std::vector<std::string> run_command(const std::string& name, const std::string& config_json) {
  ExperimentConfig cfg;
  cfg.timing = false;
  apply_json(cfg, nlohmann::json::parse(config_json));
  std::vector<ResultRecord> records;
  if (name == "train") records = cmd_train(cfg);
  else if (name == "predict") records = cmd_predict(cfg);
  else if (name == "cv") records = cmd_cv(cfg);
  else if (name == "nightmare") records = cmd_nightmare(cfg);
  else if (name == "compare-explicit") records = cmd_compare_explicit(cfg);
  else throw ParameterError("unknown command '" + name + "'");
  std::vector<std::string> out;
  for (const auto& r : records) out.push_back(to_json(r, cfg.timing).dump());
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Marginalized-corruption SVM, logistic regression and SVR";

  py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  py::enum_<Loss>(m, "Loss")
      .value("hinge", Loss::Hinge)
      .value("logistic", Loss::Logistic)
      .value("svr", Loss::EpsInsensitive);
  py::enum_<NoiseKind>(m, "NoiseKind")
      .value("none", NoiseKind::None)
      .value("dropout", NoiseKind::Dropout)
      .value("gaussian", NoiseKind::Gaussian)
      .value("laplace", NoiseKind::Laplace)
      .value("poisson", NoiseKind::Poisson);
  py::enum_<ReweightMode>(m, "ReweightMode")
      .value("adaptive", ReweightMode::Adaptive)
      .value("fixed", ReweightMode::FixedQuadratic);

  py::class_<NoiseModel>(m, "NoiseModel")
      .def(py::init<>())
      .def(py::init<NoiseKind, double>(), py::arg("kind"), py::arg("param") = 0.0)
      .def_static("dropout", &NoiseModel::dropout, py::arg("q"))
      .def_static("gaussian", &NoiseModel::gaussian, py::arg("variance"))
      .def_static("laplace", &NoiseModel::laplace, py::arg("scale"))
      .def_static("poisson", &NoiseModel::poisson)
      .def_property_readonly("kind", &NoiseModel::kind)
      .def_property_readonly("param", &NoiseModel::param)
      .def("variance", [](const NoiseModel& noise, const Eigen::VectorXd& x) {
        return moments(SparseVector::from_dense(x), noise, static_cast<std::size_t>(x.size())).dense_var();
      })
      .def("sample", [](const NoiseModel& noise, const Eigen::VectorXd& x, std::uint64_t seed) {
        return sample(SparseVector::from_dense(x), noise, seed, static_cast<std::size_t>(x.size()))
            .to_dense(static_cast<std::size_t>(x.size()));
      });

  py::class_<Dataset>(m, "Dataset")
      .def_static("from_numpy", &from_numpy, py::arg("X"), py::arg("y"), py::arg("task") = py::none())
      .def("to_numpy", &to_numpy)
      .def_property_readonly("labels", [](const Dataset& d) {
        std::vector<double> y;
        for (const auto& ex : d.examples) y.push_back(ex.y);
        return y;
      })
      .def_property_readonly("task", [](const Dataset& d) { return to_string(d.task); })
      .def_property_readonly("dim", &Dataset::dim)
      .def("__len__", &Dataset::size);
  m.def("load_dataset", [](const std::string& path, std::optional<std::string> task) {
    return load_dataset(path, task ? std::optional<TaskKind>(parse_task(*task)) : std::nullopt);
  }, py::arg("path"), py::arg("task") = py::none());
  m.def("save_dataset", &save_sparse, py::arg("path"), py::arg("data"), py::arg("base") = 1);

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("c", &TrainConfig::c)
      .def_readwrite("ell", &TrainConfig::ell)
      .def_readwrite("epsilon", &TrainConfig::epsilon)
      .def_readwrite("noise", &TrainConfig::noise)
      .def_readwrite("max_iters", &TrainConfig::max_irls_iters)
      .def_readwrite("tol", &TrainConfig::irls_tol)
      .def_readwrite("reweight_mode", &TrainConfig::reweight_mode);

  py::class_<LinearModel>(m, "LinearModel")
      .def(py::init<>())
      .def_readwrite("w", &LinearModel::w)
      .def_readwrite("b", &LinearModel::b)
      .def_readwrite("loss", &LinearModel::loss)
      .def_readwrite("noise", &LinearModel::noise)
      .def("decision_function", [](const LinearModel& model, const RowMatrix& x) {
        return score_rows(x, [&](const SparseVector& v) { return predict(model, v); });
      });

  py::class_<LatentOptions>(m, "LatentOptions")
      .def(py::init<>())
      .def_readwrite("hidden", &LatentOptions::hidden)
      .def_readwrite("alpha_reg", &LatentOptions::alpha_reg)
      .def_readwrite("seed", &LatentOptions::seed)
      .def_readwrite("alpha_steps", &LatentOptions::alpha_steps)
      .def_readwrite("init_scale", &LatentOptions::init_scale);

  py::class_<LatentModel>(m, "LatentModel")
      .def_readwrite("alpha", &LatentModel::alpha)
      .def_readwrite("w", &LatentModel::w)
      .def_readwrite("b", &LatentModel::b)
      .def_readonly("loss", &LatentModel::loss)
      .def("decision_function", [](const LatentModel& model, const RowMatrix& x) {
        return score_rows(x, [&](const SparseVector& v) { return predict_latent(model, v); });
      });

  py::class_<OneVsAllModel>(m, "OneVsAllModel")
      .def_readonly("classes", &OneVsAllModel::classes)
      .def("predict", [](const OneVsAllModel& model, const RowMatrix& x) {
        return score_rows(x, [&](const SparseVector& v) { return double(one_vs_all_predict(model, v)); });
      });

  m.def("train_linear",
        [](Loss loss, const Dataset& data, const TrainConfig& cfg) { return train_linear(loss, data, cfg); },
        py::arg("loss"), py::arg("data"), py::arg("config") = TrainConfig(),
        py::call_guard<py::gil_scoped_release>());
  m.def("train_latent",
        [](const Dataset& data, Loss loss, const TrainConfig& cfg, const LatentOptions& options) {
          return train_latent(data, loss, cfg, options);
        },
        py::arg("data"), py::arg("loss"), py::arg("config") = TrainConfig(),
        py::arg("options") = LatentOptions(), py::call_guard<py::gil_scoped_release>());
  m.def("train_explicit",
        [](const Dataset& data, const TrainConfig& cfg, std::size_t copies, std::uint64_t seed, Loss loss) {
          return train_explicit(data, cfg, copies, seed, loss);
        },
        py::arg("data"), py::arg("config"), py::arg("copies"), py::arg("seed"), py::arg("loss"),
        py::call_guard<py::gil_scoped_release>());

  m.def("save_model", [](const std::string& path, const AnyModel& model) { save_model(path, model); });
  m.def("load_model", &load_model);
  m.def("predict", [](const AnyModel& model, const RowMatrix& x) {
    return score_rows(x, [&](const SparseVector& v) { return predict_label(model, v); });
  });

  m.def("gamma_hinge", &gamma_hinge, py::arg("c"), py::arg("second_moment"));
  m.def("gamma_logistic", &gamma_logistic, py::arg("c"), py::arg("second_moment"));
  m.def("gamma_delta_svr", &gamma_delta_svr, py::arg("c"), py::arg("m_minus"), py::arg("m_plus"));

  m.def("_run", &run_command, py::arg("command"), py::arg("config_json"),
        py::call_guard<py::gil_scoped_release>());
}
