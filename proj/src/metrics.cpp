#include "ccmn/metrics.hpp"

#include <algorithm>
#include <numeric>

namespace ccmn {

LabelVector predict_sign(std::span<const double> f) {
  std::vector<int8_t> values(f.size());
  for (std::size_t j = 0; j < f.size(); ++j) values[j] = f[j] >= 0.0 ? 1 : -1;
  return LabelVector(std::move(values));
}

LabelVector predict_dummy_threshold(std::span<const double> f, double f0) {
  std::vector<int8_t> values(f.size());
  for (std::size_t j = 0; j < f.size(); ++j) values[j] = f[j] >= f0 ? 1 : -1;
  return LabelVector(std::move(values));
}

double hamming_loss(const std::vector<LabelVector>& pred,
                    const std::vector<LabelVector>& truth) {
  if (pred.size() != truth.size()) throw ShapeError("prediction and truth counts differ");
  if (pred.empty()) throw ShapeError("hamming loss of an empty set");
  double total = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i].size() != truth[i].size())
      throw ShapeError("label length mismatch at instance " + std::to_string(i));
    std::size_t wrong = 0;
    for (std::size_t j = 0; j < pred[i].size(); ++j)
      if (pred[i][j] != truth[i][j]) ++wrong;
    total += static_cast<double>(wrong) / static_cast<double>(pred[i].size());
  }
  return total / static_cast<double>(pred.size());
}

std::optional<double> ranking_loss_instance(std::span<const double> f,
                                            const LabelVector& truth, bool normalize) {
  if (f.size() != truth.size()) throw ShapeError("score and label lengths differ");
  const std::size_t q = f.size();
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t j = 0; j < q; ++j) {
    if (truth[j] != +1) continue;
    for (std::size_t k = 0; k < q; ++k) {
      if (truth[k] != -1) continue;
      ++pairs;
      if (f[k] > f[j])
        sum += 1.0;
      else if (f[k] == f[j])
        sum += 0.5;
    }
  }
  if (pairs == 0) return std::nullopt;
  return normalize ? sum / static_cast<double>(pairs) : sum;
}

double ranking_loss(const std::vector<std::vector<double>>& scores,
                    const std::vector<LabelVector>& truth, bool normalize) {
  if (scores.size() != truth.size()) throw ShapeError("score and truth counts differ");
  double total = 0.0;
  std::size_t counted = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (auto v = ranking_loss_instance(scores[i], truth[i], normalize)) {
      total += *v;
      ++counted;
    }
  }
  if (counted == 0) throw ShapeError("no instance has a (relevant, irrelevant) pair");
  return total / static_cast<double>(counted);
}

std::optional<double> average_precision_instance(std::span<const double> f,
                                                 const LabelVector& truth) {
  if (f.size() != truth.size()) throw ShapeError("score and label lengths differ");
  const std::size_t q = f.size();
  std::vector<std::size_t> order(q);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&f](std::size_t a, std::size_t b) {
    return f[a] > f[b];  // descending score, ties keep ascending index
  });

  double sum = 0.0;
  std::size_t relevant_seen = 0;
  std::size_t total_relevant = 0;
  for (std::size_t r = 0; r < q; ++r) {
    if (truth[order[r]] == +1) {
      ++relevant_seen;
      ++total_relevant;
      sum += static_cast<double>(relevant_seen) / static_cast<double>(r + 1);
    }
  }
  if (total_relevant == 0) return std::nullopt;
  return sum / static_cast<double>(total_relevant);
}

ApResult average_precision(const std::vector<std::vector<double>>& scores,
                           const std::vector<LabelVector>& truth) {
  if (scores.size() != truth.size()) throw ShapeError("score and truth counts differ");
  ApResult result;
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (auto v = average_precision_instance(scores[i], truth[i])) {
      total += *v;
      ++result.evaluated;
    } else {
      ++result.skipped;
    }
  }
  if (result.evaluated == 0) throw ShapeError("no instance has a relevant label");
  result.value = total / static_cast<double>(result.evaluated);
  return result;
}

}  // namespace ccmn
