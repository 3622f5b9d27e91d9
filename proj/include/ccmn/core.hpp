#ifndef CCMN_CORE_HPP_
#define CCMN_CORE_HPP_

#include <cstdint>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "ccmn/errors.hpp"

namespace ccmn {

/// Per-instance label assignment in {-1, +1}. Entry j is +1 when label j is
/// relevant for the instance. All loss formulas operate on this signed form;
/// parsers convert 0/1 inputs on ingest.
class LabelVector {
public:
  LabelVector() = default;
  explicit LabelVector(std::vector<int8_t> values);

  /// All-(-1) vector of length q.
  static LabelVector all_negative(std::size_t q);

  std::size_t size() const { return values_.size(); }
  int operator[](std::size_t j) const { return values_[j]; }
  void set(std::size_t j, int v);

  bool operator==(const LabelVector& other) const { return values_ == other.values_; }

  const std::vector<int8_t>& raw() const { return values_; }

private:
  std::vector<int8_t> values_;
};

/// Class-conditional flip probabilities, one pair per label:
/// rho_pos[j] = Pr(observed -1 | true +1), rho_neg[j] = Pr(observed +1 | true -1).
/// Valid iff both are in [0, 1) and rho_pos[j] + rho_neg[j] < 1 strictly.
struct NoiseSpec {
  std::vector<double> rho_pos;
  std::vector<double> rho_neg;

  static NoiseSpec zero(std::size_t q) {
    return NoiseSpec{std::vector<double>(q, 0.0), std::vector<double>(q, 0.0)};
  }

  std::size_t num_labels() const { return rho_pos.size(); }
  bool is_zero() const;

  /// Throws InvalidNoiseSpec on any violated constraint.
  void validate() const;
};

/// One sparse feature row: (index, value) pairs sorted by strictly increasing
/// index, indices in [0, d).
using SparseRow = std::vector<std::pair<uint32_t, double>>;

/// Feature rows paired with signed label vectors. Immutable after
/// construction in practice; all operations return new datasets.
struct MultiLabelDataset {
  std::size_t num_features = 0;  // d
  std::size_t num_labels = 0;    // q
  std::vector<SparseRow> rows;
  std::vector<LabelVector> labels;
  std::vector<std::string> label_names;  // optional, empty or size q

  std::size_t size() const { return rows.size(); }

  /// Throws ShapeError / RangeError if rows, labels and dimensions disagree.
  void validate() const;

  /// Dataset restricted to the given instance indices, in order.
  MultiLabelDataset subset(const std::vector<std::size_t>& indices) const;

  /// Row expanded to a dense vector of length num_features.
  std::vector<double> dense_row(std::size_t i) const;
};

/// Train/test/validation fractions plus the seed that fixes the permutation.
struct SplitSpec {
  double train_fraction = 0.5;
  double test_fraction = 0.3;
  double validation_fraction = 0.2;
  uint64_t seed = 0;

  void validate() const;
};

struct SplitResult {
  MultiLabelDataset train;
  MultiLabelDataset test;
  MultiLabelDataset validation;
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
  std::vector<std::size_t> validation_indices;
};

/// Disjoint random partition with sizes floor(fraction * n); the remainder
/// goes to the training partition. The permutation depends only on the seed.
SplitResult split_dataset(const MultiLabelDataset& data, const SplitSpec& spec);

}  // namespace ccmn

#endif  // CCMN_CORE_HPP_
