#ifndef CCMN_NOISE_HPP_
#define CCMN_NOISE_HPP_

#include <cstdint>
#include <utility>
#include <vector>

#include "ccmn/core.hpp"

namespace ccmn {

/// Flips every label of every instance independently with its
/// class-conditional probability. Features are shared with the input.
/// Deterministic: instance i draws from substream derive_stream(seed, i),
/// one uniform per label in index order.
MultiLabelDataset inject_noise(const MultiLabelDataset& data, const NoiseSpec& spec,
                               uint64_t seed);

/// All 2^q noisy outcomes of one clean label vector with their exact
/// probabilities Pr(observed | clean) under independent flips. Entry order
/// is fixed: outcome m has label j equal to +1 iff bit j of m is set.
/// Throws EnumerationTooLarge for q > 20.
std::vector<std::pair<LabelVector, double>> enumerate_flip_distribution(
    const LabelVector& y_clean, const NoiseSpec& spec);

enum class NoiseMode { Ccmn, Pml };

/// Experiment-protocol noise rates. Ccmn draws both rates per label
/// uniformly from {0.1, ..., 0.5}, redrawing any pair with sum >= 1; Pml
/// sets rho_pos to zero and draws rho_neg from {0.1, ..., 0.6}.
NoiseSpec sample_noise_rates(NoiseMode mode, std::size_t q, uint64_t seed);

}  // namespace ccmn

#endif  // CCMN_NOISE_HPP_
