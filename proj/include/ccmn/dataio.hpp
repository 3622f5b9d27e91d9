#ifndef CCMN_DATAIO_HPP_
#define CCMN_DATAIO_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ccmn/core.hpp"

namespace ccmn {

/// Parses the sparse multi-label format:
///
///   #n <instances> #d <features> #q <labels>
///   l1,l2,...,lk idx:val idx:val ...
///
/// The header is mandatory and fixes all dimensions. Label and feature
/// indices are 1-based; the label field lists the relevant labels and may be
/// empty (the line then starts with a space); feature indices must be
/// strictly increasing; absent features are zero. Lines starting with '#'
/// other than the header are comments. Malformed content raises ParseError,
/// indices outside the declared ranges raise RangeError, both with the line
/// number.
MultiLabelDataset parse_multilabel_svm(const std::string& path);
MultiLabelDataset parse_multilabel_svm(std::istream& in, const std::string& origin);

/// Writes the exact format above. Feature values are printed with 17
/// significant digits, so write-then-parse reproduces the dataset bit for
/// bit, and the output bytes are deterministic.
void write_multilabel_svm(const MultiLabelDataset& data, const std::string& path);
void write_multilabel_svm(const MultiLabelDataset& data, std::ostream& out);

/// Noise sidecar file: one `<label> <rho_pos> <rho_neg>` line per label,
/// 1-based, '#' comments ignored.
NoiseSpec read_noise_spec(const std::string& path);
void write_noise_spec(const NoiseSpec& spec, const std::string& path);

struct SyntheticData {
  MultiLabelDataset data;
  /// The q generating unit-norm hyperplanes (row j labels class j); the
  /// exact predictor sign(w_j . x) reproduces the labels by construction.
  std::vector<std::vector<double>> hyperplanes;
};

/// Margin-separated synthetic data: q random unit-norm hyperplanes, points
/// uniform in the unit ball, labels by sign(w_j . x). Points closer than
/// `margin` to any hyperplane, and points with no relevant label, are
/// resampled; exhausting the resample budget raises GenerationFailed.
SyntheticData generate_synthetic(std::size_t n, std::size_t d, std::size_t q, double margin,
                                 uint64_t seed);

}  // namespace ccmn

#endif  // CCMN_DATAIO_HPP_
