// Command-line front end: train, predict, cv, nightmare, compare-explicit.
//
// Records go to stdout (or --output) as JSON lines. Exit status: 0 success,
// 2 configuration error, 3 data error, 4 numerical failure.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <mutex>

#include "dropsvm/errors.hpp"
#include "dropsvm/experiment.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

struct FlagValues {
  std::string task;
  std::string loss = "hinge";
  std::string noise = "dropout";
  std::string config_path;
  std::string output_path;
  bool no_timing = false;
};

void add_flags(CLI::App* cmd, dropsvm::ExperimentConfig& cfg, FlagValues& flags) {
  cmd->add_option("--config", flags.config_path, "JSON config file; its keys override flags");
  cmd->add_option("--train", cfg.train_path, "training data (sparse text or .csv)");
  cmd->add_option("--test", cfg.test_path, "evaluation data");
  cmd->add_option("--model", cfg.model_path, "model file to write or read");
  cmd->add_option("--predictions", cfg.predictions_path, "where predict writes one label per line");
  cmd->add_option("--output", flags.output_path, "result records file (default stdout)");
  cmd->add_option("--task", flags.task, "binary, multiclass or regression (default: inferred)");
  cmd->add_option("--loss", flags.loss, "hinge, logistic or svr");
  cmd->add_option("--family", cfg.family, "linear or latent");
  cmd->add_option("--noise", flags.noise, "none, dropout, gaussian, laplace or poisson");
  cmd->add_option("--q,--noise-levels", cfg.noise_levels, "noise level grid")->delimiter(',');
  cmd->add_option("--c", cfg.c_grid, "loss trade-off grid")->delimiter(',');
  cmd->add_option("--ell", cfg.ell, "hinge margin (>= 1)");
  cmd->add_option("--epsilon", cfg.epsilon, "SVR tube half-width");
  cmd->add_option("--reweight", cfg.reweight, "adaptive or fixed");
  cmd->add_option("--max-iters", cfg.max_iters, "maximum outer iterations");
  cmd->add_option("--tol", cfg.tol, "relative objective tolerance");
  cmd->add_option("--hidden", cfg.hidden_grid, "hidden units grid (latent)")->delimiter(',');
  cmd->add_option("--alpha-reg", cfg.alpha_reg_grid, "alpha penalty grid (latent)")
      ->delimiter(',');
  cmd->add_option("--alpha-steps", cfg.alpha_steps, "alpha gradient steps per iteration");
  cmd->add_option("--folds", cfg.folds, "cross-validation folds");
  cmd->add_option("--seeds", cfg.seeds, "run seeds")->delimiter(',');
  cmd->add_option("--deletion", cfg.deletion_grid, "test-time deletion fractions")
      ->delimiter(',');
  cmd->add_option("--validation-fraction", cfg.validation_fraction,
                  "held-out share for nightmare model selection");
  cmd->add_option("--copies", cfg.copies_grid, "corrupted copies per example (M grid)")
      ->delimiter(',');
  cmd->add_flag("--no-timing", flags.no_timing, "omit wall-clock seconds from records");
}

int run(int argc, char** argv) {
  CLI::App app{"Marginalized-corruption SVM, logistic and SVR trainers"};
  app.require_subcommand(1);
  dropsvm::ExperimentConfig cfg;
  FlagValues flags;
  struct Command {
    const char* name;
    const char* help;
    std::vector<dropsvm::ResultRecord> (*fn)(const dropsvm::ExperimentConfig&,
                                             const dropsvm::RecordSink&);
  };
  const Command commands[] = {
      {"train", "train one model at the first grid point", dropsvm::cmd_train},
      {"predict", "score a data file with a saved model", dropsvm::cmd_predict},
      {"cv", "grid search by k-fold cross-validation, then retrain", dropsvm::cmd_cv},
      {"nightmare", "error curve under test-time feature deletion", dropsvm::cmd_nightmare},
      {"compare-explicit", "explicit corruption over an M grid vs the marginalized trainer",
       dropsvm::cmd_compare_explicit},
  };
  std::vector<CLI::App*> subs;
  for (const Command& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    add_flags(sub, cfg, flags);
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (!flags.task.empty()) cfg.task = dropsvm::parse_task(flags.task);
    cfg.loss = dropsvm::parse_loss(flags.loss);
    cfg.noise = dropsvm::parse_noise_kind(flags.noise);
    if (!flags.config_path.empty()) {
      std::ifstream in(flags.config_path);
      if (!in) throw dropsvm::ParameterError("cannot open config '" + flags.config_path + "'");
      nlohmann::json j;
      try {
        in >> j;
      } catch (const nlohmann::json::exception& e) {
        throw dropsvm::ParameterError("config '" + flags.config_path + "': " + e.what());
      }
      dropsvm::apply_json(cfg, j);
    }
    if (flags.no_timing) cfg.timing = false;

    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!flags.output_path.empty()) {
      file.open(flags.output_path);
      if (!file) throw dropsvm::DataError("cannot write '" + flags.output_path + "'");
      out = &file;
    }
    std::mutex sink_mutex;
    const dropsvm::RecordSink sink = [&](const dropsvm::ResultRecord& r) {
      std::lock_guard lock(sink_mutex);
      *out << dropsvm::to_json(r, cfg.timing).dump() << '\n';
      out->flush();
    };
    for (std::size_t i = 0; i < subs.size(); ++i) {
      if (subs[i]->parsed()) commands[i].fn(cfg, sink);
    }
    return 0;
  } catch (const dropsvm::ParameterError& e) {
    std::cerr << "parameter error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const dropsvm::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const dropsvm::DomainError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const dropsvm::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  }
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
