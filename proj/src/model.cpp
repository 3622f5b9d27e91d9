#include "ccmn/model.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "ccmn/rng.hpp"

namespace ccmn {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct Layout {
  std::size_t w1_off, w1_rows, w1_cols;
  std::size_t b1_off, b1_len;
  std::size_t w2_off, w2_rows, w2_cols;  // zero-sized for linear models
  std::size_t b2_off, b2_len;
  std::size_t total;
};

Layout layout_of(const ModelConfig& cfg) {
  Layout l{};
  const std::size_t d = cfg.input_dim;
  const std::size_t out = cfg.output_dim();
  if (cfg.arch == Architecture::Linear) {
    l.w1_off = 0;
    l.w1_rows = out;
    l.w1_cols = d;
    l.b1_off = out * d;
    l.b1_len = out;
    l.w2_off = l.b1_off + l.b1_len;
    l.w2_rows = l.w2_cols = 0;
    l.b2_off = l.w2_off;
    l.b2_len = 0;
    l.total = l.w2_off;
  } else {
    const std::size_t h = cfg.hidden_units;
    l.w1_off = 0;
    l.w1_rows = h;
    l.w1_cols = d;
    l.b1_off = h * d;
    l.b1_len = h;
    l.w2_off = l.b1_off + h;
    l.w2_rows = out;
    l.w2_cols = h;
    l.b2_off = l.w2_off + out * h;
    l.b2_len = out;
    l.total = l.b2_off + out;
  }
  return l;
}

}  // namespace

const char* architecture_name(Architecture arch) {
  return arch == Architecture::Linear ? "linear" : "mlp";
}

Architecture architecture_from_name(const std::string& name) {
  if (name == "linear") return Architecture::Linear;
  if (name == "mlp") return Architecture::Mlp;
  throw ParseError("unknown model architecture: " + name);
}

DecisionModel::DecisionModel(const ModelConfig& cfg) : cfg_(cfg) {
  if (cfg.input_dim < 1 || cfg.num_labels < 1)
    throw ShapeError("model needs input_dim >= 1 and num_labels >= 1");
  if (cfg.arch == Architecture::Mlp && cfg.hidden_units < 1)
    throw ShapeError("mlp needs at least one hidden unit");
  params_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(layout_of(cfg).total));
}

DecisionModel DecisionModel::init(const ModelConfig& cfg, uint64_t seed) {
  DecisionModel model(cfg);
  const Layout l = layout_of(cfg);
  Rng rng(seed);
  auto fill_uniform = [&](std::size_t off, std::size_t count, std::size_t fan_in) {
    const double s = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (std::size_t i = 0; i < count; ++i)
      model.params_[static_cast<Eigen::Index>(off + i)] = rng.uniform(-s, s);
  };
  fill_uniform(l.w1_off, l.w1_rows * l.w1_cols, cfg.input_dim);
  if (cfg.arch == Architecture::Mlp)
    fill_uniform(l.w2_off, l.w2_rows * l.w2_cols, cfg.hidden_units);
  return model;
}

Eigen::Map<const Eigen::MatrixXd> DecisionModel::w1() const {
  const Layout l = layout_of(cfg_);
  return {params_.data() + l.w1_off, static_cast<Eigen::Index>(l.w1_rows),
          static_cast<Eigen::Index>(l.w1_cols)};
}

Eigen::Map<const Eigen::VectorXd> DecisionModel::b1() const {
  const Layout l = layout_of(cfg_);
  return {params_.data() + l.b1_off, static_cast<Eigen::Index>(l.b1_len)};
}

Eigen::Map<const Eigen::MatrixXd> DecisionModel::w2() const {
  const Layout l = layout_of(cfg_);
  return {params_.data() + l.w2_off, static_cast<Eigen::Index>(l.w2_rows),
          static_cast<Eigen::Index>(l.w2_cols)};
}

Eigen::Map<const Eigen::VectorXd> DecisionModel::b2() const {
  const Layout l = layout_of(cfg_);
  return {params_.data() + l.b2_off, static_cast<Eigen::Index>(l.b2_len)};
}

void DecisionModel::forward(const SparseRow& x, Eigen::VectorXd& out) const {
  for (const auto& [idx, val] : x) {
    (void)val;
    if (idx >= cfg_.input_dim) throw ShapeError("feature index exceeds model input width");
  }
  if (cfg_.arch == Architecture::Linear) {
    out = b1();
    const auto w = w1();
    for (const auto& [idx, val] : x) out += val * w.col(static_cast<Eigen::Index>(idx));
    return;
  }
  Eigen::VectorXd z1 = b1();
  const auto w_in = w1();
  for (const auto& [idx, val] : x) z1 += val * w_in.col(static_cast<Eigen::Index>(idx));
  const Eigen::VectorXd hidden = z1.cwiseMax(0.0);
  out = w2() * hidden + b2();
}

std::vector<double> DecisionModel::forward(const SparseRow& x) const {
  Eigen::VectorXd out;
  forward(x, out);
  return {out.data(), out.data() + out.size()};
}

std::vector<std::vector<double>> DecisionModel::forward_all(const MultiLabelDataset& data) const {
  std::vector<std::vector<double>> scores;
  scores.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) scores.push_back(forward(data.rows[i]));
  return scores;
}

double DecisionModel::weight_squared_norm() const {
  double total = w1().squaredNorm();
  if (cfg_.arch == Architecture::Mlp) total += w2().squaredNorm();
  return total;
}

void DecisionModel::backward(const SparseRow& x, const Eigen::VectorXd& score_grad,
                             Eigen::VectorXd& param_grad) const {
  const Layout l = layout_of(cfg_);
  if (param_grad.size() != params_.size())
    throw ShapeError("parameter gradient has the wrong length");

  if (cfg_.arch == Architecture::Linear) {
    Eigen::Map<Eigen::MatrixXd> dw(param_grad.data() + l.w1_off,
                                   static_cast<Eigen::Index>(l.w1_rows),
                                   static_cast<Eigen::Index>(l.w1_cols));
    Eigen::Map<Eigen::VectorXd> db(param_grad.data() + l.b1_off,
                                   static_cast<Eigen::Index>(l.b1_len));
    for (const auto& [idx, val] : x) dw.col(static_cast<Eigen::Index>(idx)) += val * score_grad;
    db += score_grad;
    return;
  }

  // Recompute the forward pass pieces needed for the chain rule.
  Eigen::VectorXd z1 = b1();
  const auto w_in = w1();
  for (const auto& [idx, val] : x) z1 += val * w_in.col(static_cast<Eigen::Index>(idx));
  const Eigen::VectorXd hidden = z1.cwiseMax(0.0);

  Eigen::Map<Eigen::MatrixXd> dw1(param_grad.data() + l.w1_off,
                                  static_cast<Eigen::Index>(l.w1_rows),
                                  static_cast<Eigen::Index>(l.w1_cols));
  Eigen::Map<Eigen::VectorXd> db1(param_grad.data() + l.b1_off,
                                  static_cast<Eigen::Index>(l.b1_len));
  Eigen::Map<Eigen::MatrixXd> dw2(param_grad.data() + l.w2_off,
                                  static_cast<Eigen::Index>(l.w2_rows),
                                  static_cast<Eigen::Index>(l.w2_cols));
  Eigen::Map<Eigen::VectorXd> db2(param_grad.data() + l.b2_off,
                                  static_cast<Eigen::Index>(l.b2_len));

  dw2 += score_grad * hidden.transpose();
  db2 += score_grad;
  Eigen::VectorXd dz = w2().transpose() * score_grad;
  for (Eigen::Index i = 0; i < dz.size(); ++i)
    if (z1[i] <= 0.0) dz[i] = 0.0;  // rectifier subgradient 0 at the kink
  for (const auto& [idx, val] : x) dw1.col(static_cast<Eigen::Index>(idx)) += val * dz;
  db1 += dz;
}

double loss_and_gradient(const DecisionModel& model, const MultiLabelDataset& data,
                         std::span<const std::size_t> indices,
                         const TrainingObjective& objective, double l2,
                         Eigen::VectorXd& grad_out) {
  if (indices.empty()) throw EmptyBatch("loss_and_gradient on an empty batch");
  const std::size_t out_dim = model.config().output_dim();
  if (model.config().dummy_output != objective.dummy_threshold)
    throw ShapeError("model dummy output and objective dummy flag disagree");

  grad_out = Eigen::VectorXd::Zero(model.params().size());
  Eigen::VectorXd scores(out_dim);
  Eigen::VectorXd score_grad(out_dim);
  double total = 0.0;
  for (std::size_t i : indices) {
    model.forward(data.rows.at(i), scores);
    score_grad.setZero();
    total += objective.value_and_grad({scores.data(), out_dim}, data.labels.at(i),
                                      {score_grad.data(), out_dim});
    model.backward(data.rows[i], score_grad, grad_out);
  }
  const double inv_n = 1.0 / static_cast<double>(indices.size());
  total *= inv_n;
  grad_out *= inv_n;

  if (l2 != 0.0) {
    total += 0.5 * l2 * model.weight_squared_norm();
    const Layout l = layout_of(model.config());
    grad_out.segment(static_cast<Eigen::Index>(l.w1_off),
                     static_cast<Eigen::Index>(l.w1_rows * l.w1_cols)) +=
        l2 * model.params().segment(static_cast<Eigen::Index>(l.w1_off),
                                    static_cast<Eigen::Index>(l.w1_rows * l.w1_cols));
    if (model.config().arch == Architecture::Mlp)
      grad_out.segment(static_cast<Eigen::Index>(l.w2_off),
                       static_cast<Eigen::Index>(l.w2_rows * l.w2_cols)) +=
          l2 * model.params().segment(static_cast<Eigen::Index>(l.w2_off),
                                      static_cast<Eigen::Index>(l.w2_rows * l.w2_cols));
  }
  return total;
}

double loss_and_gradient(const DecisionModel& model, const MultiLabelDataset& data,
                         const TrainingObjective& objective, double l2,
                         Eigen::VectorXd& grad_out) {
  std::vector<std::size_t> all(data.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return loss_and_gradient(model, data, all, objective, l2, grad_out);
}

double mean_objective_loss(const DecisionModel& model, const MultiLabelDataset& data,
                           const TrainingObjective& objective) {
  if (data.size() == 0) throw EmptyBatch("mean loss of an empty dataset");
  const std::size_t out_dim = model.config().output_dim();
  Eigen::VectorXd scores(out_dim);
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    model.forward(data.rows[i], scores);
    total += objective.value_and_grad({scores.data(), out_dim}, data.labels[i]);
  }
  return total / static_cast<double>(data.size());
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  const ModelConfig& cfg = ckpt.model.config();
  out << "ccmn-checkpoint 1\n";
  out << "arch " << architecture_name(cfg.arch) << "\n";
  out << "d " << cfg.input_dim << "\n";
  out << "q " << cfg.num_labels << "\n";
  out << "hidden " << cfg.hidden_units << "\n";
  out << "dummy " << (cfg.dummy_output ? 1 : 0) << "\n";
  out << "noise " << ckpt.train_noise.num_labels() << "\n";
  for (std::size_t j = 0; j < ckpt.train_noise.num_labels(); ++j)
    out << fmt17(ckpt.train_noise.rho_pos[j]) << ' ' << fmt17(ckpt.train_noise.rho_neg[j])
        << '\n';
  out << "params " << ckpt.model.num_params() << "\n";
  for (Eigen::Index i = 0; i < ckpt.model.params().size(); ++i)
    out << fmt17(ckpt.model.params()[i]) << '\n';
  if (!out) throw IoError("write to " + path + " failed");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path + " for reading");
  auto expect = [&in, &path](const std::string& key) {
    std::string word;
    if (!(in >> word) || word != key)
      throw ParseError(path + ": expected checkpoint key '" + key + "'");
  };
  expect("ccmn-checkpoint");
  int version = 0;
  in >> version;
  if (version != 1) throw ParseError(path + ": unsupported checkpoint version");

  ModelConfig cfg;
  std::string arch;
  expect("arch");
  in >> arch;
  cfg.arch = architecture_from_name(arch);
  expect("d");
  in >> cfg.input_dim;
  expect("q");
  in >> cfg.num_labels;
  expect("hidden");
  in >> cfg.hidden_units;
  expect("dummy");
  int dummy = 0;
  in >> dummy;
  cfg.dummy_output = dummy != 0;

  expect("noise");
  std::size_t nq = 0;
  in >> nq;
  NoiseSpec spec;
  spec.rho_pos.resize(nq);
  spec.rho_neg.resize(nq);
  for (std::size_t j = 0; j < nq; ++j) in >> spec.rho_pos[j] >> spec.rho_neg[j];

  expect("params");
  std::size_t count = 0;
  in >> count;
  DecisionModel model(cfg);
  if (count != model.num_params())
    throw ParseError(path + ": parameter count does not match the architecture");
  for (std::size_t i = 0; i < count; ++i) in >> model.params()[static_cast<Eigen::Index>(i)];
  if (!in) throw ParseError(path + ": truncated checkpoint");
  return Checkpoint{std::move(model), std::move(spec)};
}

}  // namespace ccmn
