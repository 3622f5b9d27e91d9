#include "ccmn/correction.hpp"

#include <algorithm>
#include <cmath>

namespace ccmn {

namespace {

void check_rates(double rho_pos, double rho_neg) {
  if (!std::isfinite(rho_pos) || !std::isfinite(rho_neg) || rho_pos < 0.0 || rho_pos >= 1.0 ||
      rho_neg < 0.0 || rho_neg >= 1.0 || rho_pos + rho_neg >= 1.0)
    throw InvalidNoiseSpec("noise rates must satisfy 0 <= rho < 1 and rho_pos + rho_neg < 1");
}

void check_label(int y) {
  if (y != -1 && y != 1) throw ShapeError("label must be -1 or +1");
}

void check_shapes(std::span<const double> f, const LabelVector& y, std::span<double> grad) {
  if (f.size() != y.size()) throw ShapeError("score and label lengths differ");
  if (!grad.empty() && grad.size() != f.size())
    throw ShapeError("gradient length differs from score length");
}

}  // namespace

double corrected_phi_independent(const SurrogateLoss& loss, double f, int y, double rho_pos,
                                 double rho_neg) {
  check_rates(rho_pos, rho_neg);
  check_label(y);
  const double kappa = 1.0 / (1.0 - rho_pos - rho_neg);
  const double rho_y = (y == +1) ? rho_pos : rho_neg;
  const double rho_my = (y == +1) ? rho_neg : rho_pos;
  const double m = static_cast<double>(y) * f;
  return kappa * ((1.0 - rho_my) * loss.value(m) - rho_y * loss.value(-m));
}

double corrected_phi_independent_grad(const SurrogateLoss& loss, double f, int y,
                                      double rho_pos, double rho_neg) {
  check_rates(rho_pos, rho_neg);
  check_label(y);
  const double kappa = 1.0 / (1.0 - rho_pos - rho_neg);
  const double rho_y = (y == +1) ? rho_pos : rho_neg;
  const double rho_my = (y == +1) ? rho_neg : rho_pos;
  const double m = static_cast<double>(y) * f;
  return kappa * ((1.0 - rho_my) * loss.derivative(m) + rho_y * loss.derivative(-m)) *
         static_cast<double>(y);
}

double corrected_loss_hamming(const SurrogateLoss& loss, std::span<const double> f,
                              const LabelVector& y_noisy, const NoiseSpec& spec,
                              std::span<double> grad) {
  check_shapes(f, y_noisy, grad);
  if (spec.num_labels() != f.size()) throw ShapeError("noise spec length differs from q");
  double total = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    total += corrected_phi_independent(loss, f[j], y_noisy[j], spec.rho_pos[j], spec.rho_neg[j]);
    if (!grad.empty())
      grad[j] += corrected_phi_independent_grad(loss, f[j], y_noisy[j], spec.rho_pos[j],
                                                spec.rho_neg[j]);
  }
  return total;
}

PairwiseCorrectionTable pairwise_correction_table(const NoiseSpec& spec, std::size_t j,
                                                  std::size_t k) {
  if (j == k) throw InvalidPair("pair indices must differ");
  if (j >= spec.num_labels() || k >= spec.num_labels())
    throw InvalidPair("pair index out of range");
  const double aj = spec.rho_pos[j], bj = spec.rho_neg[j];
  const double ak = spec.rho_pos[k], bk = spec.rho_neg[k];
  check_rates(aj, bj);
  check_rates(ak, bk);

  PairwiseCorrectionTable t;
  t.kappa = 1.0 / ((1.0 - aj - bj) * (1.0 - ak - bk));
  // Observed (+1,-1)
  t.coef[0] = {t.kappa * (1.0 - bj) * (1.0 - ak), t.kappa * aj * bk};
  // Observed (-1,+1)
  t.coef[1] = {t.kappa * bj * ak, t.kappa * (1.0 - aj) * (1.0 - bk)};
  // Observed (+1,+1)
  t.coef[2] = {-t.kappa * ak * (1.0 - bj), -t.kappa * aj * (1.0 - bk)};
  // Observed (-1,-1)
  t.coef[3] = {-t.kappa * bj * (1.0 - ak), -t.kappa * bk * (1.0 - aj)};
  return t;
}

std::array<double, 4> derive_pairwise_by_linsolve(const NoiseSpec& spec, std::size_t j,
                                                  std::size_t k, double f_jk,
                                                  const SurrogateLoss& loss) {
  if (j == k) throw InvalidPair("pair indices must differ");
  if (j >= spec.num_labels() || k >= spec.num_labels())
    throw InvalidPair("pair index out of range");
  const double aj = spec.rho_pos[j], bj = spec.rho_neg[j];
  const double ak = spec.rho_pos[k], bk = spec.rho_neg[k];
  check_rates(aj, bj);
  check_rates(ak, bk);

  // Pair states in row_index() order.
  constexpr int states[4][2] = {{+1, -1}, {-1, +1}, {+1, +1}, {-1, -1}};
  auto flip_prob = [](int observed, int clean, double rho_pos, double rho_neg) {
    if (clean == +1) return observed == +1 ? 1.0 - rho_pos : rho_pos;
    return observed == +1 ? rho_neg : 1.0 - rho_neg;
  };

  // Row r: expectation over observed pairs given clean pair state r equals
  // the clean pair loss (zero when the clean labels are equal).
  double m[4][5];
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      m[r][c] = flip_prob(states[c][0], states[r][0], aj, bj) *
                flip_prob(states[c][1], states[r][1], ak, bk);
    }
  }
  m[0][4] = loss.value(f_jk);
  m[1][4] = loss.value(-f_jk);
  m[2][4] = 0.0;
  m[3][4] = 0.0;

  // Gaussian elimination with partial pivoting.
  int order[4] = {0, 1, 2, 3};
  for (int col = 0; col < 4; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 4; ++r)
      if (std::fabs(m[order[r]][col]) > std::fabs(m[order[pivot]][col])) pivot = r;
    std::swap(order[col], order[pivot]);
    const double p = m[order[col]][col];
    if (std::fabs(p) < 1e-14)
      throw SingularSystem("joint flip-probability matrix is singular");
    for (int r = col + 1; r < 4; ++r) {
      const double factor = m[order[r]][col] / p;
      if (factor == 0.0) continue;
      for (int c = col; c < 5; ++c) m[order[r]][c] -= factor * m[order[col]][c];
    }
  }
  std::array<double, 4> x{};
  for (int row = 3; row >= 0; --row) {
    double acc = m[order[row]][4];
    for (int c = row + 1; c < 4; ++c) acc -= m[order[row]][c] * x[static_cast<std::size_t>(c)];
    x[static_cast<std::size_t>(row)] = acc / m[order[row]][row];
  }
  return x;
}

double corrected_loss_ranking(const SurrogateLoss& loss, std::span<const double> f,
                              const LabelVector& y_noisy, const NoiseSpec& spec,
                              std::span<double> grad) {
  check_shapes(f, y_noisy, grad);
  const std::size_t q = f.size();
  if (q < 2) throw ShapeError("ranking loss needs at least two labels");
  if (spec.num_labels() != q) throw ShapeError("noise spec length differs from q");

  double total = 0.0;
  for (std::size_t j = 0; j + 1 < q; ++j) {
    for (std::size_t k = j + 1; k < q; ++k) {
      const PairwiseCorrectionTable t = pairwise_correction_table(spec, j, k);
      const int row = PairwiseCorrectionTable::row_index(y_noisy[j], y_noisy[k]);
      const double u = f[j] - f[k];
      total += t.coef[row][0] * loss.value(u) + t.coef[row][1] * loss.value(-u);
      if (!grad.empty()) {
        const double du = t.coef[row][0] * loss.derivative(u) -
                          t.coef[row][1] * loss.derivative(-u);
        grad[j] += du;
        grad[k] -= du;
      }
    }
  }
  return total;
}

double dummy_label_loss(const SurrogateLoss& loss, std::span<const double> f, double f0,
                        const LabelVector& y_noisy, const NoiseSpec& spec,
                        std::span<double> grad, double* grad_f0) {
  check_shapes(f, y_noisy, grad);
  if (spec.num_labels() != f.size()) throw ShapeError("noise spec length differs from q");
  double total = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    total += corrected_phi_independent(loss, f[j] - f0, y_noisy[j], spec.rho_pos[j],
                                       spec.rho_neg[j]);
    if (!grad.empty()) {
      const double g = corrected_phi_independent_grad(loss, f[j] - f0, y_noisy[j],
                                                      spec.rho_pos[j], spec.rho_neg[j]);
      grad[j] += g;
      if (grad_f0 != nullptr) *grad_f0 -= g;
    }
  }
  return total;
}

namespace {

void check_upml_rho(std::span<const double> rho) {
  for (double r : rho)
    if (!std::isfinite(r) || r < 0.0 || r >= 1.0)
      throw InvalidNoiseSpec("uPML noise rate must satisfy 0 <= rho < 1");
}

}  // namespace

double upml_loss_hamming(const SurrogateLoss& loss, std::span<const double> f,
                         const LabelVector& y_noisy, std::span<const double> rho,
                         std::span<double> grad) {
  check_shapes(f, y_noisy, grad);
  if (rho.size() != f.size()) throw ShapeError("rho length differs from q");
  check_upml_rho(rho);
  double total = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    if (y_noisy[j] == +1) {
      total += loss.value(f[j]);
      if (!grad.empty()) grad[j] += loss.derivative(f[j]);
    } else {
      total += (loss.value(-f[j]) - rho[j] * loss.value(f[j])) / (1.0 - rho[j]);
      if (!grad.empty())
        grad[j] += (-loss.derivative(-f[j]) - rho[j] * loss.derivative(f[j])) / (1.0 - rho[j]);
    }
  }
  return total;
}

double upml_loss_ranking(const SurrogateLoss& loss, std::span<const double> f,
                         const LabelVector& y_noisy, std::span<const double> rho,
                         std::span<double> grad) {
  check_shapes(f, y_noisy, grad);
  const std::size_t q = f.size();
  if (q < 2) throw ShapeError("ranking loss needs at least two labels");
  if (rho.size() != q) throw ShapeError("rho length differs from q");
  check_upml_rho(rho);

  double total = 0.0;
  for (std::size_t j = 0; j + 1 < q; ++j) {
    for (std::size_t k = j + 1; k < q; ++k) {
      const double u = f[j] - f[k];
      double du = 0.0;
      if (y_noisy[j] == +1 && y_noisy[k] == -1) {
        total += loss.value(u) / (1.0 - rho[k]);
        du = loss.derivative(u) / (1.0 - rho[k]);
      } else if (y_noisy[j] == -1 && y_noisy[k] == +1) {
        total += loss.value(-u) / (1.0 - rho[j]);
        du = -loss.derivative(-u) / (1.0 - rho[j]);
      } else if (y_noisy[j] == -1 && y_noisy[k] == -1) {
        const double denom = (1.0 - rho[j]) * (1.0 - rho[k]);
        total += (-rho[j] * loss.value(u) - rho[k] * loss.value(-u)) / denom;
        du = (-rho[j] * loss.derivative(u) + rho[k] * loss.derivative(-u)) / denom;
      }
      if (!grad.empty() && du != 0.0) {
        grad[j] += du;
        grad[k] -= du;
      }
    }
  }
  return total;
}

double plain_loss_hamming(const SurrogateLoss& loss, std::span<const double> f,
                          const LabelVector& y, std::span<double> grad) {
  check_shapes(f, y, grad);
  double total = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double m = static_cast<double>(y[j]) * f[j];
    total += loss.value(m);
    if (!grad.empty()) grad[j] += loss.derivative(m) * static_cast<double>(y[j]);
  }
  return total;
}

double plain_loss_ranking(const SurrogateLoss& loss, std::span<const double> f,
                          const LabelVector& y, std::span<double> grad) {
  check_shapes(f, y, grad);
  const std::size_t q = f.size();
  if (q < 2) throw ShapeError("ranking loss needs at least two labels");
  double total = 0.0;
  for (std::size_t j = 0; j + 1 < q; ++j) {
    for (std::size_t k = j + 1; k < q; ++k) {
      if (y[j] == y[k]) continue;
      const double yjk = y[j] > y[k] ? 1.0 : -1.0;
      const double m = yjk * (f[j] - f[k]);
      total += loss.value(m);
      if (!grad.empty()) {
        const double du = loss.derivative(m) * yjk;
        grad[j] += du;
        grad[k] -= du;
      }
    }
  }
  return total;
}

BoundConstants compute_bound_constants(const NoiseSpec& spec) {
  spec.validate();
  BoundConstants c;
  for (std::size_t j = 0; j < spec.num_labels(); ++j) {
    const double denom = 1.0 - spec.rho_pos[j] - spec.rho_neg[j];
    const double kappa_j = 1.0 / denom;
    const double mu_dep_j = (1.0 + std::fabs(spec.rho_neg[j] - spec.rho_pos[j])) / (denom * denom);
    c.mu_independent = std::max(c.mu_independent, kappa_j);
    c.mu_dependent = std::max(c.mu_dependent, mu_dep_j);
    c.kappa_max = std::max(c.kappa_max, kappa_j);
  }
  return c;
}

const char* objective_name(ObjectiveKind kind) {
  switch (kind) {
    case ObjectiveKind::HammingCorrected: return "hamming-corrected";
    case ObjectiveKind::RankingCorrected: return "ranking-corrected";
    case ObjectiveKind::HammingPlain: return "hamming-plain";
    case ObjectiveKind::RankingPlain: return "ranking-plain";
    case ObjectiveKind::UpmlHamming: return "upml-hamming";
    case ObjectiveKind::UpmlRanking: return "upml-ranking";
  }
  return "?";
}

ObjectiveKind objective_from_name(const std::string& name) {
  if (name == "hamming-corrected") return ObjectiveKind::HammingCorrected;
  if (name == "ranking-corrected") return ObjectiveKind::RankingCorrected;
  if (name == "hamming-plain") return ObjectiveKind::HammingPlain;
  if (name == "ranking-plain") return ObjectiveKind::RankingPlain;
  if (name == "upml-hamming") return ObjectiveKind::UpmlHamming;
  if (name == "upml-ranking") return ObjectiveKind::UpmlRanking;
  throw ParseError("unknown objective: " + name);
}

bool objective_is_ranking(ObjectiveKind kind) {
  return kind == ObjectiveKind::RankingCorrected || kind == ObjectiveKind::RankingPlain ||
         kind == ObjectiveKind::UpmlRanking;
}

void TrainingObjective::validate(std::size_t q) const {
  if (dummy_threshold && !objective_is_ranking(kind))
    throw Error("dummy threshold calibration requires a ranking objective");
  switch (kind) {
    case ObjectiveKind::HammingPlain:
    case ObjectiveKind::RankingPlain:
      break;  // plain objectives never consult the spec
    case ObjectiveKind::UpmlHamming:
    case ObjectiveKind::UpmlRanking:
      spec.validate();
      if (spec.num_labels() != q) throw ShapeError("noise spec length differs from q");
      for (double r : spec.rho_pos)
        if (r != 0.0)
          throw InvalidNoiseSpec("uPML objectives require rho_pos to be identically zero");
      break;
    default:
      spec.validate();
      if (spec.num_labels() != q) throw ShapeError("noise spec length differs from q");
      break;
  }
}

double TrainingObjective::value_and_grad(std::span<const double> f, const LabelVector& y,
                                         std::span<double> grad) const {
  const std::size_t q = y.size();
  const std::size_t expected = q + (dummy_threshold ? 1 : 0);
  if (f.size() != expected) throw ShapeError("score length does not match objective");
  if (!grad.empty() && grad.size() != f.size())
    throw ShapeError("gradient length differs from score length");

  const auto scores = f.first(q);
  const auto score_grad = grad.empty() ? grad : grad.first(q);

  // Plain objectives run through the corrected path with zero rates, so a
  // zero-noise corrected run and a plain run produce identical bits.
  const bool plain = kind == ObjectiveKind::HammingPlain || kind == ObjectiveKind::RankingPlain;
  const NoiseSpec zero = plain ? NoiseSpec::zero(q) : NoiseSpec{};
  const NoiseSpec& eff = plain ? zero : spec;

  double total = 0.0;
  switch (kind) {
    case ObjectiveKind::HammingCorrected:
    case ObjectiveKind::HammingPlain:
      total = corrected_loss_hamming(loss, scores, y, eff, score_grad);
      break;
    case ObjectiveKind::RankingCorrected:
    case ObjectiveKind::RankingPlain:
      total = corrected_loss_ranking(loss, scores, y, eff, score_grad);
      if (dummy_threshold) {
        double* g0 = grad.empty() ? nullptr : &grad[q];
        total += dummy_label_loss(loss, scores, f[q], y, eff, score_grad, g0);
      }
      break;
    case ObjectiveKind::UpmlHamming:
      total = upml_loss_hamming(loss, scores, y, spec.rho_neg, score_grad);
      break;
    case ObjectiveKind::UpmlRanking:
      total = upml_loss_ranking(loss, scores, y, spec.rho_neg, score_grad);
      if (dummy_threshold) {
        for (std::size_t j = 0; j < q; ++j) {
          total += corrected_phi_independent(loss, scores[j] - f[q], y[j], 0.0,
                                             spec.rho_neg[j]);
          if (!grad.empty()) {
            const double g = corrected_phi_independent_grad(loss, scores[j] - f[q], y[j], 0.0,
                                                            spec.rho_neg[j]);
            grad[j] += g;
            grad[q] -= g;
          }
        }
      }
      break;
  }
  return total;
}

}  // namespace ccmn
