#include "ccmn/noise.hpp"

#include "ccmn/rng.hpp"

namespace ccmn {

MultiLabelDataset inject_noise(const MultiLabelDataset& data, const NoiseSpec& spec,
                               uint64_t seed) {
  spec.validate();
  if (spec.num_labels() != data.num_labels)
    throw ShapeError("noise spec length differs from dataset label count");

  MultiLabelDataset out = data;
  for (std::size_t i = 0; i < out.size(); ++i) {
    Rng rng(derive_stream(seed, i));
    for (std::size_t j = 0; j < out.num_labels; ++j) {
      const int y = out.labels[i][j];
      const double flip_prob = (y == +1) ? spec.rho_pos[j] : spec.rho_neg[j];
      const double u = rng.next_double();
      if (u < flip_prob) out.labels[i].set(j, -y);
    }
  }
  return out;
}

std::vector<std::pair<LabelVector, double>> enumerate_flip_distribution(
    const LabelVector& y_clean, const NoiseSpec& spec) {
  spec.validate();
  const std::size_t q = y_clean.size();
  if (spec.num_labels() != q) throw ShapeError("noise spec length differs from q");
  if (q > 20) throw EnumerationTooLarge("enumeration limited to q <= 20");

  std::vector<std::pair<LabelVector, double>> out;
  out.reserve(std::size_t{1} << q);
  for (std::size_t m = 0; m < (std::size_t{1} << q); ++m) {
    std::vector<int8_t> values(q);
    double prob = 1.0;
    for (std::size_t j = 0; j < q; ++j) {
      const int observed = (m >> j) & 1 ? +1 : -1;
      values[j] = static_cast<int8_t>(observed);
      if (y_clean[j] == +1)
        prob *= observed == +1 ? 1.0 - spec.rho_pos[j] : spec.rho_pos[j];
      else
        prob *= observed == +1 ? spec.rho_neg[j] : 1.0 - spec.rho_neg[j];
    }
    out.emplace_back(LabelVector(std::move(values)), prob);
  }
  return out;
}

NoiseSpec sample_noise_rates(NoiseMode mode, std::size_t q, uint64_t seed) {
  static constexpr double kCcmnGrid[] = {0.1, 0.2, 0.3, 0.4, 0.5};
  static constexpr double kPmlGrid[] = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6};

  NoiseSpec spec;
  spec.rho_pos.resize(q);
  spec.rho_neg.resize(q);
  Rng rng(seed);
  for (std::size_t j = 0; j < q; ++j) {
    if (mode == NoiseMode::Pml) {
      spec.rho_pos[j] = 0.0;
      spec.rho_neg[j] = kPmlGrid[rng.below(6)];
    } else {
      double rp, rn;
      do {
        rp = kCcmnGrid[rng.below(5)];
        rn = kCcmnGrid[rng.below(5)];
      } while (rp + rn >= 1.0);
      spec.rho_pos[j] = rp;
      spec.rho_neg[j] = rn;
    }
  }
  spec.validate();
  return spec;
}

}  // namespace ccmn
