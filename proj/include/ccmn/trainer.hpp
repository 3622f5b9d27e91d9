#ifndef CCMN_TRAINER_HPP_
#define CCMN_TRAINER_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ccmn/correction.hpp"
#include "ccmn/core.hpp"
#include "ccmn/model.hpp"

namespace ccmn {

/// How the per-epoch validation value used for model selection is computed.
/// ObjectiveLoss evaluates the training objective on the validation set,
/// which stays meaningful when the validation labels are themselves noisy
/// (the corrected loss is the unbiased proxy for the clean loss).
/// CleanMetric treats validation labels as clean and evaluates the
/// evaluation metric of interest: hamming loss for hamming objectives,
/// ranking loss for ranking objectives.
enum class SelectionMode { ObjectiveLoss, CleanMetric };

const char* selection_name(SelectionMode mode);
SelectionMode selection_from_name(const std::string& name);

struct AdamParams {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adam with bias-corrected moment estimates:
///   m_t = b1 m + (1-b1) g,  v_t = b2 v + (1-b2) g^2,
///   theta -= lr * (m_t / (1-b1^t)) / (sqrt(v_t / (1-b2^t)) + eps).
struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  long t = 0;

  explicit AdamState(Eigen::Index size)
      : m(Eigen::VectorXd::Zero(size)), v(Eigen::VectorXd::Zero(size)) {}

  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad, double learning_rate,
            const AdamParams& hp);
};

struct TrainConfig {
  int epochs = 200;
  double learning_rate = 5e-3;
  double l2 = 1e-4;
  std::size_t batch_size = 100;
  SelectionMode selection = SelectionMode::ObjectiveLoss;
  uint64_t seed = 0;
  AdamParams adam;

  void validate() const;
};

struct EpochRecord {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_metric = 0.0;
};

struct TrainResult {
  DecisionModel model;  // parameters of the best validation epoch
  int best_epoch = 0;
  double best_val = 0.0;
  std::vector<EpochRecord> history;
};

/// Shuffled minibatch Adam for config.epochs epochs; after each epoch the
/// selection value is computed on the validation set and the parameters of
/// the best epoch (first epoch on ties) are returned. Deterministic for a
/// fixed seed. Throws DivergedTraining with epoch and step when the loss
/// stops being finite.
TrainResult train(const MultiLabelDataset& train_data, const MultiLabelDataset& val_data,
                  const DecisionModel& initial, const TrainingObjective& objective,
                  const TrainConfig& config);

struct GridPoint {
  double learning_rate = 0.0;
  bool diverged = false;
  std::optional<TrainResult> result;  // absent when the run diverged
};

struct GridSelectResult {
  std::size_t best_index = 0;
  std::vector<GridPoint> points;

  double best_learning_rate() const { return points[best_index].learning_rate; }
  const TrainResult& best() const { return *points[best_index].result; }
};

/// Trains once per learning rate and returns the run with the best
/// validation value; ties break toward the smaller learning rate. A run
/// that diverges is skipped with a warning; if every run diverges the last
/// DivergedTraining is rethrown.
GridSelectResult grid_select(const MultiLabelDataset& train_data,
                             const MultiLabelDataset& val_data, const DecisionModel& initial,
                             const TrainingObjective& objective, const TrainConfig& base,
                             std::span<const double> lr_grid);

/// Epoch log: one `<epoch>\t<train_loss>\t<val_metric>` line per epoch.
void write_history(const std::vector<EpochRecord>& history, const std::string& path);

}  // namespace ccmn

#endif  // CCMN_TRAINER_HPP_
