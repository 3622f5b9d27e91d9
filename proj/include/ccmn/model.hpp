#ifndef CCMN_MODEL_HPP_
#define CCMN_MODEL_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ccmn/core.hpp"
#include "ccmn/correction.hpp"

namespace ccmn {

enum class Architecture { Linear, Mlp };

const char* architecture_name(Architecture arch);
Architecture architecture_from_name(const std::string& name);

struct ModelConfig {
  Architecture arch = Architecture::Linear;
  std::size_t input_dim = 0;   // d
  std::size_t num_labels = 0;  // q
  bool dummy_output = false;   // adds the threshold score as output q
  std::size_t hidden_units = 128;

  std::size_t output_dim() const { return num_labels + (dummy_output ? 1 : 0); }
};

/// Parameterized decision function f: R^d -> R^{q (+1)}. Parameters live in
/// one flat vector; the matrix views below fix the layout, which the
/// checkpoint format and the initializer share.
class DecisionModel {
public:
  explicit DecisionModel(const ModelConfig& cfg);

  /// Weights uniform on [-s, s] with s = 1/sqrt(fan_in); biases zero.
  /// Deterministic per seed.
  static DecisionModel init(const ModelConfig& cfg, uint64_t seed);

  const ModelConfig& config() const { return cfg_; }
  std::size_t num_params() const { return params_.size(); }
  Eigen::VectorXd& params() { return params_; }
  const Eigen::VectorXd& params() const { return params_; }

  void forward(const SparseRow& x, Eigen::VectorXd& out) const;
  std::vector<double> forward(const SparseRow& x) const;

  /// Scores for every row of a dataset, one vector per instance.
  std::vector<std::vector<double>> forward_all(const MultiLabelDataset& data) const;

  /// Squared Frobenius norm of the weight matrices(biases excluded).
  double weight_squared_norm() const;

  /// Parameter layout views. Linear models expose w1/b1 only.
  Eigen::Map<const Eigen::MatrixXd> w1() const;
  Eigen::Map<const Eigen::VectorXd> b1() const;
  Eigen::Map<const Eigen::MatrixXd> w2() const;
  Eigen::Map<const Eigen::VectorXd> b2() const;

  /// Backpropagates d(loss)/d(scores) for one instance into a flat
  /// parameter gradient (accumulated, not overwritten).
  void backward(const SparseRow& x, const Eigen::VectorXd& score_grad,
                Eigen::VectorXd& param_grad) const;

private:
  ModelConfig cfg_;
  Eigen::VectorXd params_;
};

/// Mean objective loss over the batch plus l2/2 times the squared weight
/// norm, with the matching exact parameter gradient. Throws EmptyBatch on an
/// empty index list and DivergedTraining is left to the caller (the value
/// may legitimately be any finite real).
double loss_and_gradient(const DecisionModel& model, const MultiLabelDataset& data,
                         std::span<const std::size_t> indices,
                         const TrainingObjective& objective, double l2,
                         Eigen::VectorXd& grad_out);

/// Batch = the whole dataset.
double loss_and_gradient(const DecisionModel& model, const MultiLabelDataset& data,
                         const TrainingObjective& objective, double l2,
                         Eigen::VectorXd& grad_out);

/// Mean objective loss only (no gradient, no l2 term).
double mean_objective_loss(const DecisionModel& model, const MultiLabelDataset& data,
                           const TrainingObjective& objective);

struct Checkpoint {
  DecisionModel model;
  NoiseSpec train_noise;  // the spec the model was trained against
};

/// Plain-text key/tensor checkpoint, bit-exact across save/load. Layout is
/// documented in the README and covered by round-trip tests.
void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace ccmn

#endif  // CCMN_MODEL_HPP_
