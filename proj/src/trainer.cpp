#include "ccmn/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <numeric>

#include "ccmn/metrics.hpp"
#include "ccmn/rng.hpp"

namespace ccmn {

const char* selection_name(SelectionMode mode) {
  return mode == SelectionMode::ObjectiveLoss ? "loss" : "metric";
}

SelectionMode selection_from_name(const std::string& name) {
  if (name == "loss") return SelectionMode::ObjectiveLoss;
  if (name == "metric") return SelectionMode::CleanMetric;
  throw ParseError("unknown selection mode: " + name);
}

void TrainConfig::validate() const {
  if (epochs < 1) throw Error("epochs must be >= 1");
  if (batch_size < 1) throw Error("batch size must be >= 1");
  if (!(learning_rate > 0.0)) throw Error("learning rate must be positive");
  if (l2 < 0.0) throw Error("l2 coefficient must be non-negative");
}

void AdamState::step(Eigen::VectorXd& params, const Eigen::VectorXd& grad,
                     double learning_rate, const AdamParams& hp) {
  ++t;
  m = hp.beta1 * m + (1.0 - hp.beta1) * grad;
  v = hp.beta2 * v + (1.0 - hp.beta2) * grad.cwiseProduct(grad);
  const double bc1 = 1.0 - std::pow(hp.beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(hp.beta2, static_cast<double>(t));
  params.array() -= learning_rate * (m.array() / bc1) / ((v.array() / bc2).sqrt() + hp.epsilon);
}

namespace {

double validation_value(const DecisionModel& model, const MultiLabelDataset& val,
                        const TrainingObjective& objective, SelectionMode mode) {
  if (mode == SelectionMode::ObjectiveLoss) return mean_objective_loss(model, val, objective);

  const std::size_t q = val.num_labels;
  auto scores = model.forward_all(val);
  if (objective_is_ranking(objective.kind)) {
    std::vector<std::vector<double>> label_scores(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i)
      label_scores[i].assign(scores[i].begin(), scores[i].begin() + static_cast<long>(q));
    return ranking_loss(label_scores, val.labels);
  }
  std::vector<LabelVector> preds;
  preds.reserve(scores.size());
  for (const auto& s : scores) preds.push_back(predict_sign({s.data(), q}));
  return hamming_loss(preds, val.labels);
}

}  // namespace

TrainResult train(const MultiLabelDataset& train_data, const MultiLabelDataset& val_data,
                  const DecisionModel& initial, const TrainingObjective& objective,
                  const TrainConfig& config) {
  config.validate();
  objective.validate(train_data.num_labels);
  if (train_data.size() == 0) throw EmptyBatch("training set is empty");
  if (val_data.num_labels != train_data.num_labels)
    throw ShapeError("train and validation label counts differ");

  DecisionModel model = initial;
  const std::size_t n = train_data.size();
  Eigen::VectorXd grad(model.params().size());
  AdamState adam(model.params().size());

  TrainResult result{model, 0, std::numeric_limits<double>::infinity(), {}};
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});

  int global_step = 0;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    Rng rng(derive_stream(config.seed, static_cast<uint64_t>(epoch)));
    for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);

    auto diverged = [&epoch, &global_step](const std::string& what) {
      return DivergedTraining("training diverged at epoch " + std::to_string(epoch) +
                                  " step " + std::to_string(global_step) + ": " + what,
                              epoch, global_step);
    };

    double loss_sum = 0.0;
    for (std::size_t start = 0; start < n; start += config.batch_size) {
      const std::size_t count = std::min(config.batch_size, n - start);
      ++global_step;
      double loss = 0.0;
      try {
        loss = loss_and_gradient(model, train_data, {perm.data() + start, count}, objective,
                                 config.l2, grad);
      } catch (const NonFiniteInput& e) {
        throw diverged(e.what());
      }
      if (!std::isfinite(loss) || !grad.allFinite()) throw diverged("non-finite loss");
      loss_sum += loss * static_cast<double>(count);

      adam.step(model.params(), grad, config.learning_rate, config.adam);
      if (!model.params().allFinite()) throw diverged("non-finite parameters");
    }

    double val = 0.0;
    try {
      val = validation_value(model, val_data, objective, config.selection);
    } catch (const NonFiniteInput& e) {
      throw diverged(e.what());
    }
    if (!std::isfinite(val)) throw diverged("non-finite validation value");
    result.history.push_back({epoch, loss_sum / static_cast<double>(n), val});
    if (val < result.best_val) {
      result.best_val = val;
      result.best_epoch = epoch;
      result.model = model;
    }
  }
  return result;
}

GridSelectResult grid_select(const MultiLabelDataset& train_data,
                             const MultiLabelDataset& val_data, const DecisionModel& initial,
                             const TrainingObjective& objective, const TrainConfig& base,
                             std::span<const double> lr_grid) {
  if (lr_grid.empty()) throw Error("learning-rate grid is empty");

  GridSelectResult out;
  bool have_best = false;
  std::exception_ptr last_divergence;
  for (double lr : lr_grid) {
    TrainConfig config = base;
    config.learning_rate = lr;
    GridPoint point;
    point.learning_rate = lr;
    try {
      point.result = train(train_data, val_data, initial, objective, config);
    } catch (const DivergedTraining& e) {
      std::cerr << "warning: learning rate " << lr << " skipped: " << e.what() << "\n";
      point.diverged = true;
      last_divergence = std::current_exception();
      out.points.push_back(std::move(point));
      continue;
    }
    out.points.push_back(std::move(point));
    const GridPoint& candidate = out.points.back();
    if (!have_best) {
      out.best_index = out.points.size() - 1;
      have_best = true;
      continue;
    }
    const GridPoint& incumbent = out.points[out.best_index];
    const bool better = candidate.result->best_val < incumbent.result->best_val ||
                        (candidate.result->best_val == incumbent.result->best_val &&
                         candidate.learning_rate < incumbent.learning_rate);
    if (better) out.best_index = out.points.size() - 1;
  }
  if (!have_best) std::rethrow_exception(last_divergence);
  return out;
}

void write_history(const std::vector<EpochRecord>& history, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  char buf[96];
  for (const auto& rec : history) {
    std::snprintf(buf, sizeof(buf), "%d\t%.17g\t%.17g\n", rec.epoch, rec.train_loss,
                  rec.val_metric);
    out << buf;
  }
  if (!out) throw IoError("write to " + path + " failed");
}

}  // namespace ccmn
