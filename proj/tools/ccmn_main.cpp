// ccmn: noise injection, training, evaluation and verification for
// multi-label learning under class-conditional label noise.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "ccmn/correction.hpp"
#include "ccmn/dataio.hpp"
#include "ccmn/metrics.hpp"
#include "ccmn/model.hpp"
#include "ccmn/noise.hpp"
#include "ccmn/rng.hpp"
#include "ccmn/trainer.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace ccmn;

double round6(double v) { return std::round(v * 1e6) / 1e6; }

std::string fixed6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << text;
  if (!out) throw IoError("write to " + path + " failed");
}

// Distinct substreams for the stochastic stages of a run.
constexpr uint64_t kRateStream = 0x7261746573;   // noise-rate sampling
constexpr uint64_t kTrainStream = 0x747261696e;  // train-set corruption
constexpr uint64_t kValStream = 0x76616c;        // validation-set corruption

// ---------------------------------------------------------------------------
// inject-noise

struct InjectArgs {
  std::string input, output, mode = "ccmn", rho_file;
  uint64_t seed = 0;
};

int run_inject(const InjectArgs& args) {
  auto data = parse_multilabel_svm(args.input);
  NoiseSpec spec;
  if (args.mode == "explicit") {
    if (args.rho_file.empty()) throw Error("--mode explicit requires --rho-file");
    spec = read_noise_spec(args.rho_file);
    if (spec.num_labels() != data.num_labels)
      throw ShapeError("rho file label count differs from dataset");
  } else {
    const NoiseMode mode = args.mode == "pml" ? NoiseMode::Pml : NoiseMode::Ccmn;
    spec = sample_noise_rates(mode, data.num_labels, derive_stream(args.seed, kRateStream));
  }
  auto noisy = inject_noise(data, spec, args.seed);
  write_multilabel_svm(noisy, args.output);
  write_noise_spec(spec, args.output + ".noise");
  std::cout << "wrote " << args.output << " and " << args.output << ".noise (n="
            << noisy.size() << ", q=" << noisy.num_labels << ")\n";
  return 0;
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
  std::string train_path, val_path, noise_path, out_path;
  std::string objective = "hamming-corrected";
  std::string loss = "square";
  std::string model = "linear";
  std::string selection = "loss";
  bool rho_zero = false;
  bool dummy_threshold = false;
  int epochs = 200;
  std::vector<double> lr_grid{5e-2, 5e-3, 5e-4};
  double l2 = 1e-4;
  std::size_t batch = 100;
  std::size_t hidden = 128;
  double clamp = 10.0;
  uint64_t seed = 0;
};

int run_train(const TrainArgs& args) {
  if (args.noise_path.empty() && !args.rho_zero)
    throw Error("either --noise or --rho-zero is required");
  const ObjectiveKind kind = objective_from_name(args.objective);
  if (args.dummy_threshold && !objective_is_ranking(kind))
    throw Error("--dummy-threshold requires a ranking objective");

  auto train_data = parse_multilabel_svm(args.train_path);
  auto val_data = parse_multilabel_svm(args.val_path);
  if (val_data.num_labels != train_data.num_labels ||
      val_data.num_features != train_data.num_features)
    throw ShapeError("train and validation dimensions differ");

  NoiseSpec spec = args.rho_zero ? NoiseSpec::zero(train_data.num_labels)
                                 : read_noise_spec(args.noise_path);
  if (spec.num_labels() != train_data.num_labels)
    throw ShapeError("noise spec label count differs from dataset");

  TrainingObjective objective;
  objective.kind = kind;
  objective.loss = SurrogateLoss::from_name(args.loss, args.clamp);
  objective.spec = spec;
  objective.dummy_threshold = args.dummy_threshold;
  objective.validate(train_data.num_labels);

  ModelConfig cfg;
  cfg.arch = architecture_from_name(args.model);
  cfg.input_dim = train_data.num_features;
  cfg.num_labels = train_data.num_labels;
  cfg.dummy_output = args.dummy_threshold;
  cfg.hidden_units = args.hidden;

  TrainConfig config;
  config.epochs = args.epochs;
  config.l2 = args.l2;
  config.batch_size = args.batch;
  config.selection = selection_from_name(args.selection);
  config.seed = args.seed;

  const DecisionModel initial = DecisionModel::init(cfg, args.seed);
  auto grid = grid_select(train_data, val_data, initial, objective, config, args.lr_grid);
  const TrainResult& best = grid.best();

  save_checkpoint({best.model, spec}, args.out_path);
  write_history(best.history, args.out_path + ".log");

  json manifest;
  manifest["command"] = "train";
  manifest["train"] = args.train_path;
  manifest["val"] = args.val_path;
  manifest["noise"] = args.noise_path;
  manifest["rho_zero"] = args.rho_zero;
  manifest["objective"] = args.objective;
  manifest["loss"] = args.loss;
  manifest["model"] = args.model;
  manifest["dummy_threshold"] = args.dummy_threshold;
  manifest["epochs"] = args.epochs;
  manifest["lr_grid"] = args.lr_grid;
  manifest["l2"] = args.l2;
  manifest["batch"] = args.batch;
  manifest["hidden"] = args.hidden;
  manifest["clamp"] = args.clamp;
  manifest["selection"] = args.selection;
  manifest["seed"] = args.seed;
  manifest["out"] = args.out_path;
  json result;
  result["selected_lr"] = grid.best_learning_rate();
  result["best_epoch"] = best.best_epoch;
  result["best_val"] = best.best_val;
  json points = json::array();
  for (const auto& p : grid.points) {
    json entry;
    entry["learning_rate"] = p.learning_rate;
    entry["diverged"] = p.diverged;
    if (p.result) entry["best_val"] = p.result->best_val;
    points.push_back(entry);
  }
  result["grid"] = points;
  manifest["result"] = result;
  write_text_file(args.out_path + ".manifest.json", manifest.dump(2) + "\n");

  std::cout << "selected_lr " << grid.best_learning_rate() << "\n"
            << "best_epoch " << best.best_epoch << "\n"
            << "best_val " << fixed6(best.best_val) << "\n"
            << "wrote " << args.out_path << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// evaluate

struct EvalArgs {
  std::string model_path, test_path, report_path;
  bool raw_ranking = false;
};

struct EvalReport {
  double hamming = 0.0;
  double ranking = 0.0;
  ApResult ap;
};

EvalReport evaluate_model(const DecisionModel& model, const MultiLabelDataset& test,
                          bool dummy) {
  const std::size_t q = test.num_labels;
  auto scores = model.forward_all(test);
  std::vector<LabelVector> preds;
  std::vector<std::vector<double>> label_scores(scores.size());
  preds.reserve(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    label_scores[i].assign(scores[i].begin(), scores[i].begin() + static_cast<long>(q));
    preds.push_back(dummy ? predict_dummy_threshold({scores[i].data(), q}, scores[i][q])
                          : predict_sign({scores[i].data(), q}));
  }
  EvalReport rep;
  rep.hamming = hamming_loss(preds, test.labels);
  rep.ranking = ranking_loss(label_scores, test.labels);
  rep.ap = average_precision(label_scores, test.labels);
  return rep;
}

int run_evaluate(const EvalArgs& args) {
  auto ckpt = load_checkpoint(args.model_path);
  auto test = parse_multilabel_svm(args.test_path);
  if (test.num_features != ckpt.model.config().input_dim ||
      test.num_labels != ckpt.model.config().num_labels)
    throw ShapeError("checkpoint and dataset dimensions differ");

  const bool dummy = ckpt.model.config().dummy_output;
  const EvalReport rep = evaluate_model(ckpt.model, test, dummy);
  const BoundConstants bounds = compute_bound_constants(ckpt.train_noise);

  json report;
  report["dataset"] = {{"n", test.size()}, {"d", test.num_features}, {"q", test.num_labels}};
  report["model"] = {{"architecture", architecture_name(ckpt.model.config().arch)},
                     {"dummy_threshold", dummy}};
  json metrics;
  metrics["hamming_loss"] = round6(rep.hamming);
  metrics["ranking_loss"] = round6(rep.ranking);
  metrics["average_precision"] = round6(rep.ap.value);
  if (args.raw_ranking) {
    auto scores = ckpt.model.forward_all(test);
    std::vector<std::vector<double>> label_scores(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i)
      label_scores[i].assign(scores[i].begin(),
                             scores[i].begin() + static_cast<long>(test.num_labels));
    metrics["ranking_loss_raw"] = round6(ranking_loss(label_scores, test.labels, false));
  }
  report["metrics"] = metrics;
  report["average_precision_skipped"] = rep.ap.skipped;
  report["diagnostics"] = {{"mu_independent", round6(bounds.mu_independent)},
                           {"mu_dependent", round6(bounds.mu_dependent)},
                           {"kappa_max", round6(bounds.kappa_max)}};
  write_text_file(args.report_path, report.dump(2) + "\n");

  std::cout << "hamming_loss " << fixed6(rep.hamming) << "\n"
            << "ranking_loss " << fixed6(rep.ranking) << "\n"
            << "average_precision " << fixed6(rep.ap.value) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyArgs {
  int trials = 500;
  int pair_trials = 1000;
  int max_q = 6;
  uint64_t seed = 0;
  double tolerance = 1e-9;
  bool inject_error = false;  // negative-control hook
};

NoiseSpec random_valid_spec(Rng& rng, std::size_t q) {
  NoiseSpec spec;
  for (std::size_t j = 0; j < q; ++j) {
    const double rp = rng.uniform(0.0, 0.8);
    spec.rho_pos.push_back(rp);
    spec.rho_neg.push_back(rng.uniform(0.0, 0.95 - rp));
  }
  return spec;
}

LabelVector random_labels(Rng& rng, std::size_t q) {
  std::vector<int8_t> v(q);
  for (auto& y : v) y = rng.below(2) == 0 ? -1 : 1;
  return LabelVector(std::move(v));
}

std::vector<double> random_scores(Rng& rng, std::size_t q) {
  std::vector<double> f(q);
  for (auto& x : f) x = rng.uniform(-3.0, 3.0);
  return f;
}

int run_verify(const VerifyArgs& args) {
  const std::vector<SurrogateLoss> losses{SurrogateLoss(SurrogateLoss::Kind::Square),
                                          SurrogateLoss(SurrogateLoss::Kind::Hinge),
                                          SurrogateLoss(SurrogateLoss::Kind::Sigmoid)};
  const double fault = args.inject_error ? 1e-6 : 0.0;
  bool ok = true;
  auto report = [&ok](const std::string& name, double dev, double tol) {
    const bool pass = dev <= tol;
    ok = ok && pass;
    std::printf("%-34s max_deviation %.3e tolerance %.1e %s\n", name.c_str(), dev, tol,
                pass ? "PASS" : "FAIL");
  };

  {
    Rng rng(derive_stream(args.seed, 1));
    double worst = 0.0;
    for (int trial = 0; trial < args.trials; ++trial) {
      const std::size_t q = 1 + rng.below(static_cast<uint64_t>(args.max_q));
      const NoiseSpec spec = random_valid_spec(rng, q);
      const auto f = random_scores(rng, q);
      const auto y = random_labels(rng, q);
      const auto dist = enumerate_flip_distribution(y, spec);
      for (const auto& loss : losses) {
        double expectation = fault;
        for (const auto& [noisy, prob] : dist)
          expectation += prob * corrected_loss_hamming(loss, f, noisy, spec);
        worst = std::max(worst, std::fabs(expectation - plain_loss_hamming(loss, f, y)));
      }
    }
    report("unbiasedness-independent", worst, args.tolerance);
  }

  {
    Rng rng(derive_stream(args.seed, 2));
    double worst = 0.0;
    for (int trial = 0; trial < args.trials; ++trial) {
      const std::size_t q = 2 + rng.below(static_cast<uint64_t>(std::max(1, args.max_q - 1)));
      const NoiseSpec spec = random_valid_spec(rng, q);
      const auto f = random_scores(rng, q);
      const auto y = random_labels(rng, q);
      const auto dist = enumerate_flip_distribution(y, spec);
      for (const auto& loss : losses) {
        double expectation = fault;
        for (const auto& [noisy, prob] : dist)
          expectation += prob * corrected_loss_ranking(loss, f, noisy, spec);
        worst = std::max(worst, std::fabs(expectation - plain_loss_ranking(loss, f, y)));
      }
    }
    report("unbiasedness-dependent", worst, args.tolerance);
  }

  {
    Rng rng(derive_stream(args.seed, 3));
    double worst = 0.0;
    for (int trial = 0; trial < args.pair_trials; ++trial) {
      const NoiseSpec spec = random_valid_spec(rng, 2);
      const double f_jk = rng.uniform(-3.0, 3.0);
      for (const auto& loss : losses) {
        const auto solved = derive_pairwise_by_linsolve(spec, 0, 1, f_jk, loss);
        const auto table = pairwise_correction_table(spec, 0, 1);
        for (int row = 0; row < 4; ++row)
          worst = std::max(worst,
                           std::fabs(solved[row] + fault - table.apply(row, loss, f_jk)));
      }
    }
    report("pairwise-closed-form-vs-linsolve", worst, args.tolerance);
  }

  {
    Rng rng(derive_stream(args.seed, 4));
    double worst = 0.0;
    for (int trial = 0; trial < args.trials; ++trial) {
      const std::size_t q = 2 + rng.below(static_cast<uint64_t>(std::max(1, args.max_q - 1)));
      const NoiseSpec zero = NoiseSpec::zero(q);
      const auto f = random_scores(rng, q);
      const auto y = random_labels(rng, q);
      const double f0 = rng.uniform(-1.0, 1.0);
      for (const auto& loss : losses) {
        worst = std::max(worst, std::fabs(corrected_loss_hamming(loss, f, y, zero) + fault -
                                          plain_loss_hamming(loss, f, y)));
        worst = std::max(worst, std::fabs(corrected_loss_ranking(loss, f, y, zero) -
                                          plain_loss_ranking(loss, f, y)));
        std::vector<double> gaps(q);
        for (std::size_t j = 0; j < q; ++j) gaps[j] = f[j] - f0;
        worst = std::max(worst, std::fabs(dummy_label_loss(loss, f, f0, y, zero) -
                                          plain_loss_hamming(loss, gaps, y)));
      }
    }
    report("zero-noise-identity", worst, 1e-12);
  }

  return ok ? 0 : 1;
}

// ---------------------------------------------------------------------------
// experiment

struct ExperimentArgs {
  std::string data_path, out_path;
  std::string mode = "ccmn";
  std::string objective = "hamming-corrected";
  std::string loss = "square";
  std::string model = "linear";
  std::string selection = "loss";
  bool dummy_threshold = false;
  int repeats = 5;
  uint64_t seed_base = 0;
  int epochs = 200;
  std::vector<double> lr_grid{5e-2, 5e-3, 5e-4};
  double l2 = 1e-4;
  std::size_t batch = 0;  // 0 = per-dataset default
  std::size_t hidden = 128;
  double clamp = 10.0;
  std::vector<double> fractions{0.5, 0.3, 0.2};
};

// Batch sizes the experimental protocol uses per benchmark data set.
std::size_t default_batch_size(const std::string& path) {
  static const std::vector<std::pair<std::string, std::size_t>> table{
      {"music_emotion", 400}, {"music_style", 400}, {"mirflickr", 1000}, {"enron", 100},
      {"scene", 100},         {"yeast", 100},       {"slashdot", 200},   {"tmc", 1000},
  };
  for (const auto& [name, batch] : table)
    if (path.find(name) != std::string::npos) return batch;
  return 100;
}

int run_experiment(const ExperimentArgs& args) {
  if (args.repeats < 1) throw Error("--repeats must be >= 1");
  if (args.fractions.size() != 3) throw Error("--fractions needs train,test,validation");
  const ObjectiveKind kind = objective_from_name(args.objective);
  if (args.dummy_threshold && !objective_is_ranking(kind))
    throw Error("--dummy-threshold requires a ranking objective");

  auto data = parse_multilabel_svm(args.data_path);
  const std::size_t batch = args.batch != 0 ? args.batch : default_batch_size(args.data_path);
  const NoiseMode mode = args.mode == "pml" ? NoiseMode::Pml : NoiseMode::Ccmn;

  json repeats = json::array();
  std::vector<double> hamming, ranking, ap;
  for (int r = 0; r < args.repeats; ++r) {
    const uint64_t seed = args.seed_base + static_cast<uint64_t>(r);
    auto split = split_dataset(
        data, {args.fractions[0], args.fractions[1], args.fractions[2], seed});
    const NoiseSpec spec =
        sample_noise_rates(mode, data.num_labels, derive_stream(seed, kRateStream));
    auto noisy_train = inject_noise(split.train, spec, derive_stream(seed, kTrainStream));
    auto noisy_val = inject_noise(split.validation, spec, derive_stream(seed, kValStream));

    TrainingObjective objective;
    objective.kind = kind;
    objective.loss = SurrogateLoss::from_name(args.loss, args.clamp);
    objective.spec = spec;
    objective.dummy_threshold = args.dummy_threshold;
    objective.validate(data.num_labels);

    ModelConfig cfg;
    cfg.arch = architecture_from_name(args.model);
    cfg.input_dim = data.num_features;
    cfg.num_labels = data.num_labels;
    cfg.dummy_output = args.dummy_threshold;
    cfg.hidden_units = args.hidden;

    TrainConfig config;
    config.epochs = args.epochs;
    config.l2 = args.l2;
    config.batch_size = batch;
    config.selection = selection_from_name(args.selection);
    config.seed = seed;

    const DecisionModel initial = DecisionModel::init(cfg, seed);
    auto grid = grid_select(noisy_train, noisy_val, initial, objective, config, args.lr_grid);
    const EvalReport rep = evaluate_model(grid.best().model, split.test, args.dummy_threshold);

    hamming.push_back(rep.hamming);
    ranking.push_back(rep.ranking);
    ap.push_back(rep.ap.value);
    json entry;
    entry["seed"] = seed;
    entry["selected_lr"] = grid.best_learning_rate();
    entry["hamming_loss"] = round6(rep.hamming);
    entry["ranking_loss"] = round6(rep.ranking);
    entry["average_precision"] = round6(rep.ap.value);
    repeats.push_back(entry);
    std::cout << "repeat " << r << " seed " << seed << " hamming_loss " << fixed6(rep.hamming)
              << " ranking_loss " << fixed6(rep.ranking) << " average_precision "
              << fixed6(rep.ap.value) << "\n";
  }

  auto mean_std = [](const std::vector<double>& xs) {
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    if (xs.size() > 1) var /= static_cast<double>(xs.size() - 1);
    return std::pair<double, double>{mean, std::sqrt(var)};
  };

  json report;
  report["command"] = "experiment";
  report["data"] = args.data_path;
  report["mode"] = args.mode;
  report["objective"] = args.objective;
  report["loss"] = args.loss;
  report["model"] = args.model;
  report["dummy_threshold"] = args.dummy_threshold;
  report["batch"] = batch;
  report["repeats"] = repeats;
  json aggregate;
  const std::pair<const char*, const std::vector<double>*> rows[] = {
      {"hamming_loss", &hamming}, {"ranking_loss", &ranking}, {"average_precision", &ap}};
  for (const auto& [name, values] : rows) {
    const auto [mean, sd] = mean_std(*values);
    aggregate[name] = {{"mean", round6(mean)}, {"std", round6(sd)}};
    std::cout << name << " " << fixed6(mean) << " +/- " << fixed6(sd) << "\n";
  }
  report["aggregate"] = aggregate;
  if (!args.out_path.empty()) write_text_file(args.out_path, report.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"unbiased-risk-estimator learning under class-conditional multi-label noise"};
  app.require_subcommand(1);

  InjectArgs inject;
  auto* cmd_inject = app.add_subcommand("inject-noise", "corrupt a dataset's labels");
  cmd_inject->add_option("--input", inject.input, "clean dataset")->required();
  cmd_inject->add_option("--output", inject.output, "corrupted dataset")->required();
  cmd_inject->add_option("--mode", inject.mode, "ccmn | pml | explicit")
      ->check(CLI::IsMember({"ccmn", "pml", "explicit"}));
  cmd_inject->add_option("--rho-file", inject.rho_file, "noise spec for --mode explicit");
  cmd_inject->add_option("--seed", inject.seed, "rng seed");

  TrainArgs train;
  auto* cmd_train = app.add_subcommand("train", "train a decision model");
  cmd_train->add_option("--train", train.train_path, "training dataset")->required();
  cmd_train->add_option("--val", train.val_path, "validation dataset")->required();
  cmd_train->add_option("--noise", train.noise_path, "noise sidecar of the training data");
  cmd_train->add_flag("--rho-zero", train.rho_zero, "assume zero noise rates");
  cmd_train->add_option("--objective", train.objective,
                        "hamming-corrected | ranking-corrected | hamming-plain | "
                        "ranking-plain | upml-hamming | upml-ranking");
  cmd_train->add_option("--loss", train.loss, "square | hinge | sigmoid");
  cmd_train->add_option("--model", train.model, "linear | mlp");
  cmd_train->add_flag("--dummy-threshold", train.dummy_threshold,
                      "learn a per-instance threshold score (ranking objectives)");
  cmd_train->add_option("--epochs", train.epochs, "training epochs");
  cmd_train->add_option("--lr-grid", train.lr_grid, "learning-rate grid")->delimiter(',');
  cmd_train->add_option("--l2", train.l2, "l2 coefficient on weights");
  cmd_train->add_option("--batch", train.batch, "minibatch size");
  cmd_train->add_option("--hidden", train.hidden, "mlp hidden units");
  cmd_train->add_option("--clamp", train.clamp, "margin clamp bound for square/hinge");
  cmd_train->add_option("--selection", train.selection,
                        "validation selection: loss (corrected objective) | metric (clean)");
  cmd_train->add_option("--seed", train.seed, "rng seed");
  cmd_train->add_option("--out", train.out_path, "checkpoint path")->required();

  EvalArgs eval;
  auto* cmd_eval = app.add_subcommand("evaluate", "evaluate a checkpoint on clean data");
  cmd_eval->add_option("--model", eval.model_path, "checkpoint")->required();
  cmd_eval->add_option("--test", eval.test_path, "clean test dataset")->required();
  cmd_eval->add_option("--report", eval.report_path, "json report path")->required();
  cmd_eval->add_flag("--raw-ranking", eval.raw_ranking,
                     "also report the unnormalized pair sum");

  VerifyArgs verify;
  auto* cmd_verify = app.add_subcommand("verify", "run the exact unbiasedness oracles");
  cmd_verify->add_option("--trials", verify.trials, "configurations per check");
  cmd_verify->add_option("--pair-trials", verify.pair_trials, "pairwise oracle draws");
  cmd_verify->add_option("--max-q", verify.max_q, "largest label count to enumerate");
  cmd_verify->add_option("--seed", verify.seed, "rng seed");
  cmd_verify->add_option("--tolerance", verify.tolerance, "unbiasedness tolerance");
  cmd_verify->add_flag("--inject-error", verify.inject_error)->group("");  // negative control

  ExperimentArgs exp;
  auto* cmd_exp =
      app.add_subcommand("experiment", "repeat split/corrupt/train/evaluate and aggregate");
  cmd_exp->add_option("--data", exp.data_path, "clean dataset")->required();
  cmd_exp->add_option("--mode", exp.mode, "ccmn | pml")
      ->check(CLI::IsMember({"ccmn", "pml"}));
  cmd_exp->add_option("--objective", exp.objective, "training objective");
  cmd_exp->add_option("--loss", exp.loss, "square | hinge | sigmoid");
  cmd_exp->add_option("--model", exp.model, "linear | mlp");
  cmd_exp->add_flag("--dummy-threshold", exp.dummy_threshold, "dummy threshold score");
  cmd_exp->add_option("--repeats", exp.repeats, "number of repeats");
  cmd_exp->add_option("--seed-base", exp.seed_base, "first repeat seed");
  cmd_exp->add_option("--epochs", exp.epochs, "training epochs");
  cmd_exp->add_option("--lr-grid", exp.lr_grid, "learning-rate grid")->delimiter(',');
  cmd_exp->add_option("--l2", exp.l2, "l2 coefficient");
  cmd_exp->add_option("--batch", exp.batch, "minibatch size (0 = dataset default)");
  cmd_exp->add_option("--hidden", exp.hidden, "mlp hidden units");
  cmd_exp->add_option("--clamp", exp.clamp, "margin clamp bound");
  cmd_exp->add_option("--selection", exp.selection, "loss | metric");
  cmd_exp->add_option("--fractions", exp.fractions, "train,test,validation fractions")
      ->delimiter(',');
  cmd_exp->add_option("--out", exp.out_path, "json report path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_inject->parsed()) return run_inject(inject);
    if (cmd_train->parsed()) return run_train(train);
    if (cmd_eval->parsed()) return run_evaluate(eval);
    if (cmd_verify->parsed()) return run_verify(verify);
    if (cmd_exp->parsed()) return run_experiment(exp);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
