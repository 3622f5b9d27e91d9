#ifndef CCMN_CORRECTION_HPP_
#define CCMN_CORRECTION_HPP_

#include <array>
#include <span>
#include <string>

#include "ccmn/core.hpp"
#include "ccmn/surrogate.hpp"

namespace ccmn {

/// Noise-corrected coefficients for one label pair (j, k). Row r holds the
/// multipliers (coef[r][0] on phi(f_j - f_k), coef[r][1] on phi(f_k - f_j))
/// for the observed noisy pair value indexed by row_index(). The kappa
/// normalizer is already folded into the coefficients.
struct PairwiseCorrectionTable {
  double kappa = 1.0;
  std::array<std::array<double, 2>, 4> coef{};

  /// Row order: (+1,-1) -> 0, (-1,+1) -> 1, (+1,+1) -> 2, (-1,-1) -> 3.
  static int row_index(int y_j, int y_k) {
    if (y_j == +1) return y_k == -1 ? 0 : 2;
    return y_k == +1 ? 1 : 3;
  }

  /// Corrected pair loss for the given observed row at score gap f_jk.
  double apply(int row, const SurrogateLoss& loss, double f_jk) const {
    return coef[row][0] * loss.value(f_jk) + coef[row][1] * loss.value(-f_jk);
  }
};

/// Independent-case corrected margin loss for a single label:
///   kappa * [(1 - rho_{-y}) phi(y f) - rho_{y} phi(-y f)],
/// kappa = 1 / (1 - rho_pos - rho_neg). May be negative; never clipped,
/// since the signed form is what makes the estimator unbiased.
double corrected_phi_independent(const SurrogateLoss& loss, double f, int y,
                                 double rho_pos, double rho_neg);

/// d/df of corrected_phi_independent.
double corrected_phi_independent_grad(const SurrogateLoss& loss, double f, int y,
                                      double rho_pos, double rho_neg);

/// Sum of corrected_phi_independent over all labels. When grad is nonempty
/// it must have q entries and receives += d(loss)/d(f_j).
double corrected_loss_hamming(const SurrogateLoss& loss, std::span<const double> f,
                              const LabelVector& y_noisy, const NoiseSpec& spec,
                              std::span<double> grad = {});

/// Closed-form corrected pair coefficients for labels (j, k).
PairwiseCorrectionTable pairwise_correction_table(const NoiseSpec& spec, std::size_t j,
                                                  std::size_t k);

/// Independent derivation of the corrected pair values: builds the 4x4
/// joint flip-probability system whose unknowns are the corrected values at
/// the four observed pairs, with right-hand side equal to the clean pair
/// losses (phi(f_jk), phi(-f_jk), 0, 0), and solves it by Gaussian
/// elimination with partial pivoting. Returned in row_index() order. Must
/// agree with pairwise_correction_table; kept as a separate code path on
/// purpose so each can check the other.
std::array<double, 4> derive_pairwise_by_linsolve(const NoiseSpec& spec, std::size_t j,
                                                  std::size_t k, double f_jk,
                                                  const SurrogateLoss& loss);

/// Dependent-case corrected ranking loss: sum over pairs j < k of the table
/// row selected by the observed noisy pair, applied to f_j - f_k.
double corrected_loss_ranking(const SurrogateLoss& loss, std::span<const double> f,
                              const LabelVector& y_noisy, const NoiseSpec& spec,
                              std::span<double> grad = {});

/// Dummy-label threshold loss: the independent-case correction applied to
/// the gaps f_j - f0. Added to the ranking objective when threshold
/// calibration is on; grad_f0 (when non-null) receives += d(loss)/d(f0).
double dummy_label_loss(const SurrogateLoss& loss, std::span<const double> f, double f0,
                        const LabelVector& y_noisy, const NoiseSpec& spec,
                        std::span<double> grad = {}, double* grad_f0 = nullptr);

/// Partial multi-label specialization of the independent case
/// (rho_pos = 0, rho_neg = rho):
///   observed +1 -> phi(f_j); observed -1 -> [phi(-f_j) - rho phi(f_j)] / (1 - rho).
double upml_loss_hamming(const SurrogateLoss& loss, std::span<const double> f,
                         const LabelVector& y_noisy, std::span<const double> rho,
                         std::span<double> grad = {});

/// Partial multi-label specialization of the dependent case.
double upml_loss_ranking(const SurrogateLoss& loss, std::span<const double> f,
                         const LabelVector& y_noisy, std::span<const double> rho,
                         std::span<double> grad = {});

/// Uncorrected hamming surrogate: sum_j phi(y_j f_j).
double plain_loss_hamming(const SurrogateLoss& loss, std::span<const double> f,
                          const LabelVector& y, std::span<double> grad = {});

/// Uncorrected ranking surrogate: sum over pairs with y_j != y_k of
/// phi(y_jk (f_j - f_k)); equal-label pairs contribute nothing.
double plain_loss_ranking(const SurrogateLoss& loss, std::span<const double> f,
                          const LabelVector& y, std::span<double> grad = {});

/// Diagnostic constants from the estimation error bounds.
struct BoundConstants {
  double mu_independent = 1.0;  // max_j 1 / (1 - rho_pos - rho_neg)
  double mu_dependent = 1.0;    // max_j (1 + |rho_neg - rho_pos|) / (1 - rho_pos - rho_neg)^2
  double kappa_max = 1.0;       // max_j kappa_j
};

BoundConstants compute_bound_constants(const NoiseSpec& spec);

/// Training objectives selectable on the command line.
enum class ObjectiveKind {
  HammingCorrected,
  RankingCorrected,
  HammingPlain,
  RankingPlain,
  UpmlHamming,
  UpmlRanking,
};

const char* objective_name(ObjectiveKind kind);
ObjectiveKind objective_from_name(const std::string& name);
bool objective_is_ranking(ObjectiveKind kind);

/// A fully resolved per-example training objective. Plain objectives ignore
/// the noise specification (they behave as if all rates were zero); uPML
/// objectives require rho_pos to be identically zero.
struct TrainingObjective {
  ObjectiveKind kind = ObjectiveKind::HammingCorrected;
  SurrogateLoss loss{SurrogateLoss::Kind::Square};
  NoiseSpec spec;
  bool dummy_threshold = false;

  /// Validates internal consistency against a dataset with q labels.
  void validate(std::size_t q) const;

  /// Loss of one score vector against one noisy label vector. f has q
  /// entries plus a trailing dummy score when dummy_threshold is set; grad,
  /// when nonempty, matches f and is accumulated into.
  double value_and_grad(std::span<const double> f, const LabelVector& y,
                        std::span<double> grad = {}) const;
};

}  // namespace ccmn

#endif  // CCMN_CORRECTION_HPP_
