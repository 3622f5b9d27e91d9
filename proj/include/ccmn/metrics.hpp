#ifndef CCMN_METRICS_HPP_
#define CCMN_METRICS_HPP_

#include <optional>
#include <span>
#include <vector>

#include "ccmn/core.hpp"

namespace ccmn {

/// Zero-threshold prediction: label j is +1 iff f_j >= 0.
LabelVector predict_sign(std::span<const double> f);

/// Dummy-score threshold prediction: label j is +1 iff f_j >= f0.
LabelVector predict_dummy_threshold(std::span<const double> f, double f0);

/// Fraction of misclassified instance-label pairs, averaged over instances.
double hamming_loss(const std::vector<LabelVector>& pred,
                    const std::vector<LabelVector>& truth);

/// Ranking loss of one instance: reversed (relevant, irrelevant) score pairs
/// count 1, ties count 1/2. Normalized by the number of such pairs unless
/// normalize is false. Empty when the instance has no (relevant, irrelevant)
/// pair at all.
std::optional<double> ranking_loss_instance(std::span<const double> f,
                                            const LabelVector& truth,
                                            bool normalize = true);

/// Mean ranking loss over instances that have at least one
/// (relevant, irrelevant) pair; instances without one are skipped.
double ranking_loss(const std::vector<std::vector<double>>& scores,
                    const std::vector<LabelVector>& truth, bool normalize = true);

/// Average precision of one instance: labels ranked by descending score
/// (ties broken by ascending label index); mean over relevant labels of the
/// fraction of relevant labels at or above their rank. Empty when the
/// instance has no relevant label.
std::optional<double> average_precision_instance(std::span<const double> f,
                                                 const LabelVector& truth);

struct ApResult {
  double value = 0.0;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;  // instances with no relevant label
};

ApResult average_precision(const std::vector<std::vector<double>>& scores,
                           const std::vector<LabelVector>& truth);

}  // namespace ccmn

#endif  // CCMN_METRICS_HPP_
