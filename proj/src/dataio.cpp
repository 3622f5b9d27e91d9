#include "ccmn/dataio.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ccmn/rng.hpp"

namespace ccmn {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

[[noreturn]] void parse_fail(const std::string& origin, std::size_t line_no,
                             const std::string& what) {
  throw ParseError(origin + ":" + std::to_string(line_no) + ": " + what);
}

[[noreturn]] void range_fail(const std::string& origin, std::size_t line_no,
                             const std::string& what) {
  throw RangeError(origin + ":" + std::to_string(line_no) + ": " + what);
}

bool parse_u64(std::string_view s, uint64_t& out) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

bool parse_f64(std::string_view s, double& out) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

// "#n <n> #d <d> #q <q>"
bool try_parse_header(const std::string& line, uint64_t& n, uint64_t& d, uint64_t& q) {
  std::istringstream ss(line);
  std::string tn, vn, td, vd, tq, vq, rest;
  if (!(ss >> tn >> vn >> td >> vd >> tq >> vq)) return false;
  if (ss >> rest) return false;
  if (tn != "#n" || td != "#d" || tq != "#q") return false;
  return parse_u64(vn, n) && parse_u64(vd, d) && parse_u64(vq, q);
}

}  // namespace

MultiLabelDataset parse_multilabel_svm(std::istream& in, const std::string& origin) {
  MultiLabelDataset data;
  bool have_header = false;
  uint64_t want_n = 0;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line[0] == '#') {
      uint64_t n = 0, d = 0, q = 0;
      if (try_parse_header(line, n, d, q)) {
        if (have_header) parse_fail(origin, line_no, "duplicate header line");
        if (!data.rows.empty())
          parse_fail(origin, line_no, "header must precede all data lines");
        have_header = true;
        want_n = n;
        data.num_features = d;
        data.num_labels = q;
        continue;
      }
      continue;  // plain comment
    }
    if (!have_header) {
      if (line.empty()) continue;  // leading blank lines
      parse_fail(origin, line_no, "missing '#n <n> #d <d> #q <q>' header");
    }
    if (data.rows.size() == want_n) {
      if (line.empty()) continue;  // trailing blank lines
      parse_fail(origin, line_no, "more data lines than the declared instance count");
    }

    // Label field is everything up to the first space; it may be empty.
    const std::size_t sep = line.find(' ');
    const std::string label_field = line.substr(0, sep);
    std::vector<int8_t> labels(data.num_labels, -1);
    if (!label_field.empty()) {
      std::size_t pos = 0;
      while (pos <= label_field.size()) {
        const std::size_t comma = label_field.find(',', pos);
        const std::string_view tok(label_field.data() + pos,
                                   (comma == std::string::npos ? label_field.size() : comma) -
                                       pos);
        uint64_t idx = 0;
        if (tok.empty() || !parse_u64(tok, idx))
          parse_fail(origin, line_no, "malformed label list");
        if (idx < 1 || idx > data.num_labels)
          range_fail(origin, line_no, "label index out of declared range");
        if (labels[idx - 1] == 1) parse_fail(origin, line_no, "duplicate label index");
        labels[idx - 1] = 1;
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
    }

    SparseRow row;
    if (sep != std::string::npos) {
      std::size_t pos = sep + 1;
      uint64_t prev_idx = 0;
      while (pos < line.size()) {
        const std::size_t end = std::min(line.find(' ', pos), line.size());
        const std::string_view tok(line.data() + pos, end - pos);
        if (tok.empty()) parse_fail(origin, line_no, "empty feature token");
        const std::size_t colon = tok.find(':');
        if (colon == std::string_view::npos)
          parse_fail(origin, line_no, "feature token is not idx:val");
        uint64_t idx = 0;
        double val = 0.0;
        if (!parse_u64(tok.substr(0, colon), idx) || !parse_f64(tok.substr(colon + 1), val))
          parse_fail(origin, line_no, "malformed feature token");
        if (idx < 1 || idx > data.num_features)
          range_fail(origin, line_no, "feature index out of declared range");
        if (idx <= prev_idx)
          parse_fail(origin, line_no, "feature indices must be strictly increasing");
        if (!std::isfinite(val)) parse_fail(origin, line_no, "feature value is not finite");
        row.emplace_back(static_cast<uint32_t>(idx - 1), val);
        prev_idx = idx;
        pos = end + 1;
      }
    }
    data.rows.push_back(std::move(row));
    data.labels.emplace_back(std::move(labels));
  }

  if (!have_header) throw ParseError(origin + ": missing header line");
  if (data.rows.size() != want_n)
    throw ParseError(origin + ": expected " + std::to_string(want_n) + " data lines, found " +
                     std::to_string(data.rows.size()));
  data.validate();
  return data;
}

MultiLabelDataset parse_multilabel_svm(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path + " for reading");
  return parse_multilabel_svm(in, path);
}

void write_multilabel_svm(const MultiLabelDataset& data, std::ostream& out) {
  data.validate();
  out << "#n " << data.size() << " #d " << data.num_features << " #q " << data.num_labels
      << "\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    bool first = true;
    for (std::size_t j = 0; j < data.num_labels; ++j) {
      if (data.labels[i][j] != 1) continue;
      if (!first) out << ',';
      out << (j + 1);
      first = false;
    }
    for (const auto& [idx, val] : data.rows[i]) {
      if (!std::isfinite(val)) throw IoError("refusing to write non-finite feature value");
      out << ' ' << (idx + 1) << ':' << fmt17(val);
    }
    out << '\n';
  }
}

void write_multilabel_svm(const MultiLabelDataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  write_multilabel_svm(data, out);
  if (!out) throw IoError("write to " + path + " failed");
}

NoiseSpec read_noise_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path + " for reading");
  std::vector<std::pair<double, double>> rates;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string js, ps, ns, rest;
    if (!(ss >> js >> ps >> ns) || (ss >> rest))
      parse_fail(path, line_no, "expected '<label> <rho_pos> <rho_neg>'");
    uint64_t j = 0;
    double rp = 0.0, rn = 0.0;
    if (!parse_u64(js, j) || !parse_f64(ps, rp) || !parse_f64(ns, rn))
      parse_fail(path, line_no, "malformed noise line");
    if (j != rates.size() + 1)
      parse_fail(path, line_no, "labels must appear in order 1..q");
    rates.emplace_back(rp, rn);
  }
  NoiseSpec spec;
  for (const auto& [rp, rn] : rates) {
    spec.rho_pos.push_back(rp);
    spec.rho_neg.push_back(rn);
  }
  spec.validate();
  return spec;
}

void write_noise_spec(const NoiseSpec& spec, const std::string& path) {
  spec.validate();
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "# label rho_pos rho_neg\n";
  for (std::size_t j = 0; j < spec.num_labels(); ++j)
    out << (j + 1) << ' ' << fmt17(spec.rho_pos[j]) << ' ' << fmt17(spec.rho_neg[j]) << '\n';
  if (!out) throw IoError("write to " + path + " failed");
}

SyntheticData generate_synthetic(std::size_t n, std::size_t d, std::size_t q, double margin,
                                 uint64_t seed) {
  if (n < 1 || d < 1 || q < 1) throw GenerationFailed("n, d, q must all be at least 1");
  if (!(margin >= 0.0)) throw GenerationFailed("margin must be non-negative");

  Rng rng(seed);
  auto random_unit = [&rng, d]() {
    std::vector<double> v(d);
    double norm2 = 0.0;
    do {
      norm2 = 0.0;
      for (auto& x : v) {
        x = rng.normal();
        norm2 += x * x;
      }
    } while (norm2 == 0.0);
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& x : v) x *= inv;
    return v;
  };

  SyntheticData out;
  out.hyperplanes.reserve(q);
  for (std::size_t j = 0; j < q; ++j) out.hyperplanes.push_back(random_unit());

  out.data.num_features = d;
  out.data.num_labels = q;
  out.data.rows.reserve(n);
  out.data.labels.reserve(n);

  constexpr std::size_t kAttemptsPerInstance = 10000;
  for (std::size_t i = 0; i < n; ++i) {
    bool placed = false;
    for (std::size_t attempt = 0; attempt < kAttemptsPerInstance; ++attempt) {
      std::vector<double> x = random_unit();
      const double radius = std::pow(rng.next_double(), 1.0 / static_cast<double>(d));
      for (auto& v : x) v *= radius;

      std::vector<int8_t> labels(q);
      bool ok = true;
      bool any_positive = false;
      for (std::size_t j = 0; j < q && ok; ++j) {
        double dot = 0.0;
        for (std::size_t t = 0; t < d; ++t) dot += out.hyperplanes[j][t] * x[t];
        if (std::fabs(dot) < margin) ok = false;
        labels[j] = dot >= 0.0 ? 1 : -1;
        any_positive = any_positive || labels[j] == 1;
      }
      if (!ok || !any_positive) continue;

      SparseRow row;
      row.reserve(d);
      for (std::size_t t = 0; t < d; ++t)
        if (x[t] != 0.0) row.emplace_back(static_cast<uint32_t>(t), x[t]);
      out.data.rows.push_back(std::move(row));
      out.data.labels.emplace_back(std::move(labels));
      placed = true;
      break;
    }
    if (!placed)
      throw GenerationFailed("resample budget exhausted; margin too large for this geometry");
  }
  return out;
}

}  // namespace ccmn
