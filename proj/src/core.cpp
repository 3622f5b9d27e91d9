#include "ccmn/core.hpp"

#include <cmath>
#include <numeric>

#include "ccmn/rng.hpp"

namespace ccmn {

LabelVector::LabelVector(std::vector<int8_t> values) : values_(std::move(values)) {
  for (int8_t v : values_) {
    if (v != -1 && v != 1) throw ShapeError("label entries must be -1 or +1");
  }
}

LabelVector LabelVector::all_negative(std::size_t q) {
  return LabelVector(std::vector<int8_t>(q, -1));
}

void LabelVector::set(std::size_t j, int v) {
  if (v != -1 && v != 1) throw ShapeError("label entries must be -1 or +1");
  values_[j] = static_cast<int8_t>(v);
}

bool NoiseSpec::is_zero() const {
  for (double r : rho_pos)
    if (r != 0.0) return false;
  for (double r : rho_neg)
    if (r != 0.0) return false;
  return true;
}

void NoiseSpec::validate() const {
  if (rho_pos.size() != rho_neg.size())
    throw InvalidNoiseSpec("rho_pos and rho_neg lengths differ");
  for (std::size_t j = 0; j < rho_pos.size(); ++j) {
    const double rp = rho_pos[j];
    const double rn = rho_neg[j];
    if (!std::isfinite(rp) || !std::isfinite(rn))
      throw InvalidNoiseSpec("noise rate is not finite at label " + std::to_string(j));
    if (rp < 0.0 || rp >= 1.0 || rn < 0.0 || rn >= 1.0)
      throw InvalidNoiseSpec("noise rate outside [0,1) at label " + std::to_string(j));
    if (rp + rn >= 1.0)
      throw InvalidNoiseSpec("rho_pos + rho_neg >= 1 at label " + std::to_string(j));
  }
}

void MultiLabelDataset::validate() const {
  if (rows.size() != labels.size())
    throw ShapeError("feature row count differs from label row count");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (labels[i].size() != num_labels)
      throw ShapeError("label vector length mismatch at instance " + std::to_string(i));
    uint32_t prev = 0;
    bool first = true;
    for (const auto& [idx, val] : rows[i]) {
      (void)val;
      if (idx >= num_features)
        throw RangeError("feature index out of range at instance " + std::to_string(i));
      if (!first && idx <= prev)
        throw ShapeError("feature indices not strictly increasing at instance " +
                         std::to_string(i));
      prev = idx;
      first = false;
    }
  }
  if (!label_names.empty() && label_names.size() != num_labels)
    throw ShapeError("label name count differs from label count");
}

MultiLabelDataset MultiLabelDataset::subset(const std::vector<std::size_t>& indices) const {
  MultiLabelDataset out;
  out.num_features = num_features;
  out.num_labels = num_labels;
  out.label_names = label_names;
  out.rows.reserve(indices.size());
  out.labels.reserve(indices.size());
  for (std::size_t i : indices) {
    out.rows.push_back(rows.at(i));
    out.labels.push_back(labels.at(i));
  }
  return out;
}

std::vector<double> MultiLabelDataset::dense_row(std::size_t i) const {
  std::vector<double> x(num_features, 0.0);
  for (const auto& [idx, val] : rows.at(i)) x[idx] = val;
  return x;
}

void SplitSpec::validate() const {
  if (train_fraction <= 0.0 || test_fraction <= 0.0 || validation_fraction <= 0.0)
    throw InvalidSplit("split fractions must be positive");
  const double sum = train_fraction + test_fraction + validation_fraction;
  if (std::fabs(sum - 1.0) > 1e-12) throw InvalidSplit("split fractions must sum to 1");
}

SplitResult split_dataset(const MultiLabelDataset& data, const SplitSpec& spec) {
  spec.validate();
  const std::size_t n = data.size();
  if (n < 3) throw InvalidSplit("need at least 3 instances to split");

  const auto n_train = static_cast<std::size_t>(std::floor(spec.train_fraction * static_cast<double>(n)));
  const auto n_test = static_cast<std::size_t>(std::floor(spec.test_fraction * static_cast<double>(n)));
  const auto n_val = static_cast<std::size_t>(std::floor(spec.validation_fraction * static_cast<double>(n)));
  if (n_train == 0 || n_test == 0 || n_val == 0)
    throw InvalidSplit("a requested partition would be empty");
  const std::size_t remainder = n - (n_train + n_test + n_val);

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(spec.seed);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = rng.below(i);
    std::swap(perm[i - 1], perm[j]);
  }

  SplitResult out;
  auto take = [&perm](std::size_t from, std::size_t count) {
    return std::vector<std::size_t>(perm.begin() + static_cast<std::ptrdiff_t>(from),
                                    perm.begin() + static_cast<std::ptrdiff_t>(from + count));
  };
  out.train_indices = take(0, n_train + remainder);
  out.test_indices = take(n_train + remainder, n_test);
  out.validation_indices = take(n_train + remainder + n_test, n_val);
  out.train = data.subset(out.train_indices);
  out.test = data.subset(out.test_indices);
  out.validation = data.subset(out.validation_indices);
  return out;
}

}  // namespace ccmn
