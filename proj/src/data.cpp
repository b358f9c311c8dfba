#include "rs2acf/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "rs2acf/rng.hpp"

namespace rs2acf::data {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

int labeled_count(double fraction, int class_size) {
  const int m = static_cast<int>(std::lround(fraction * class_size));
  return std::clamp(m, 1, class_size);
}

// Column layout shared by make_blobs and blob_truth: labeled samples of each
// class first (the first labeled_count draws of the class), then the rest.
struct BlobLayout {
  std::vector<int> class_of_column;
  std::vector<std::pair<int, int>> source;  // (class, index within class) per column
  int num_labeled = 0;
};

BlobLayout blob_layout(const BlobSpec& spec) {
  BlobLayout lay;
  for (int k = 0; k < spec.num_classes; ++k) {
    const int m = labeled_count(spec.labeled_fraction, spec.samples_per_class[k]);
    for (int s = 0; s < m; ++s) {
      lay.class_of_column.push_back(k);
      lay.source.emplace_back(k, s);
    }
    lay.num_labeled += m;
  }
  for (int k = 0; k < spec.num_classes; ++k) {
    const int m = labeled_count(spec.labeled_fraction, spec.samples_per_class[k]);
    for (int s = m; s < spec.samples_per_class[k]; ++s) {
      lay.class_of_column.push_back(k);
      lay.source.emplace_back(k, s);
    }
  }
  return lay;
}

}  // namespace

int BlobSpec::total_samples() const {
  int n = 0;
  for (int c : samples_per_class) n += c;
  return n;
}

void BlobSpec::validate() const {
  require(num_classes >= 2, "blobs: need at least 2 classes");
  require(static_cast<int>(samples_per_class.size()) == num_classes,
          "blobs: one sample count per class required");
  for (int c : samples_per_class) require(c >= 1, "blobs: counts must be >= 1");
  require(dim >= 1, "blobs: dim must be >= 1");
  require(dim >= num_classes, "blobs: dim must be >= num_classes for center placement");
  require(separation > 0, "blobs: separation must be > 0");
  require(stddev >= 0, "blobs: stddev must be >= 0");
  require(labeled_fraction > 0 && labeled_fraction <= 1, "blobs: labeled fraction in (0, 1]");
}

Dataset make_blobs(const BlobSpec& spec) {
  spec.validate();
  const int d = spec.dim, c = spec.num_classes;

  // Centers on scaled axes: pairwise center distance is exactly `separation`.
  const double a = spec.separation / std::sqrt(2.0);

  // Draw every sample in a fixed class-major order so the layout choice does
  // not disturb the stream.
  Rng rng(spec.seed);
  std::vector<std::vector<Vector>> samples(c);
  for (int k = 0; k < c; ++k) {
    samples[k].reserve(spec.samples_per_class[k]);
    for (int s = 0; s < spec.samples_per_class[k]; ++s) {
      Vector v(d);
      for (int i = 0; i < d; ++i) v(i) = spec.stddev * rng.next_normal();
      v(k) += a;
      samples[k].push_back(std::move(v));
    }
  }

  const BlobLayout lay = blob_layout(spec);
  Dataset ds;
  ds.x.resize(d, spec.total_samples());
  for (size_t j = 0; j < lay.source.size(); ++j) {
    const auto [k, s] = lay.source[j];
    ds.x.col(static_cast<Eigen::Index>(j)) = samples[k][s];
  }
  ds.num_labeled = lay.num_labeled;
  ds.labels.assign(lay.class_of_column.begin(), lay.class_of_column.begin() + lay.num_labeled);
  ds.num_classes = c;

  const double lo = ds.x.minCoeff();
  if (lo < 0) ds.x.array() -= lo;

  ds.validate();
  return ds;
}

std::vector<int> blob_truth(const BlobSpec& spec) {
  spec.validate();
  return blob_layout(spec).class_of_column;
}

Dataset add_noise(const Dataset& ds, double noise_scale, std::uint64_t seed) {
  require(noise_scale >= 0, "add_noise: scale must be >= 0");
  if (noise_scale == 0) return ds;
  Dataset out = ds;
  Rng rng(seed);
  for (Eigen::Index j = 0; j < out.x.cols(); ++j)
    for (Eigen::Index i = 0; i < out.x.rows(); ++i)
      out.x(i, j) += noise_scale * rng.next_normal();
  return out;
}

MaskedDataset mask_labels(const Dataset& ds, double labeled_fraction, std::uint64_t seed) {
  ds.validate();
  require(ds.num_labeled == ds.size(), "mask_labels: input must be fully labeled");
  require(labeled_fraction > 0 && labeled_fraction <= 1,
          "mask_labels: fraction must be in (0, 1]");

  const int c = ds.num_classes;
  std::vector<std::vector<int>> members(c);
  for (int i = 0; i < ds.size(); ++i) members[ds.labels[i]].push_back(i);

  Rng rng(seed);
  std::vector<bool> keep(ds.size(), false);
  for (int k = 0; k < c; ++k) {
    auto& m = members[k];
    const int take = labeled_count(labeled_fraction, static_cast<int>(m.size()));
    for (int i = 0; i < take; ++i) {
      const int j = i + static_cast<int>(rng.next_below(m.size() - i));
      std::swap(m[i], m[j]);
    }
    std::sort(m.begin(), m.begin() + take);
    for (int i = 0; i < take; ++i) keep[m[i]] = true;
  }

  MaskedDataset out;
  for (int i = 0; i < ds.size(); ++i)
    if (keep[i]) out.column_order.push_back(i);
  const int l = static_cast<int>(out.column_order.size());
  for (int i = 0; i < ds.size(); ++i)
    if (!keep[i]) out.column_order.push_back(i);

  out.ds.x.resize(ds.dim(), ds.size());
  for (int i = 0; i < ds.size(); ++i) out.ds.x.col(i) = ds.x.col(out.column_order[i]);
  out.ds.num_labeled = l;
  out.ds.labels.resize(l);
  for (int i = 0; i < l; ++i) out.ds.labels[i] = ds.labels[out.column_order[i]];
  out.ds.num_classes = c;
  out.ds.validate();
  return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  fields.push_back(cur);
  return fields;
}

[[noreturn]] void parse_fail(int line_no, const std::string& what) {
  throw std::runtime_error("csv: line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

LoadedCsv load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("csv: cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("csv: empty file " + path);
  auto header = split_csv_line(line);
  if (header.empty() || header[0] != "label")
    parse_fail(1, "header must start with 'label'");
  const int d = static_cast<int>(header.size()) - 1;
  if (d < 1) parse_fail(1, "no feature columns");

  std::vector<Vector> rows;
  std::vector<int> row_labels;  // -1 for unlabeled
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (static_cast<int>(fields.size()) != d + 1)
      parse_fail(line_no, "expected " + std::to_string(d + 1) + " fields, got " +
                              std::to_string(fields.size()));

    int label = -1;
    if (fields[0] != "?") {
      size_t pos = 0;
      long v = 0;
      try {
        v = std::stol(fields[0], &pos);
      } catch (const std::exception&) {
        parse_fail(line_no, "invalid class id '" + fields[0] + "'");
      }
      if (pos != fields[0].size() || v < 0)
        parse_fail(line_no, "invalid class id '" + fields[0] + "'");
      label = static_cast<int>(v);
    }

    Vector row(d);
    for (int j = 0; j < d; ++j) {
      size_t pos = 0;
      double v = 0;
      try {
        v = std::stod(fields[j + 1], &pos);
      } catch (const std::exception&) {
        parse_fail(line_no, "invalid number '" + fields[j + 1] + "'");
      }
      if (pos != fields[j + 1].size())
        parse_fail(line_no, "invalid number '" + fields[j + 1] + "'");
      if (!std::isfinite(v)) parse_fail(line_no, "non-finite value");
      row(j) = v;
    }
    rows.push_back(std::move(row));
    row_labels.push_back(label);
  }
  if (rows.empty()) throw std::runtime_error("csv: no samples in " + path);

  int max_class = -1;
  for (int v : row_labels) max_class = std::max(max_class, v);
  if (max_class < 0) throw std::runtime_error("csv: no labeled samples in " + path);
  const int c = max_class + 1;
  std::vector<bool> seen(c, false);
  for (int v : row_labels)
    if (v >= 0) seen[v] = true;
  for (int k = 0; k < c; ++k)
    if (!seen[k])
      throw std::runtime_error("csv: class " + std::to_string(k) + " has no labeled sample");

  LoadedCsv out;
  const int n = static_cast<int>(rows.size());
  for (int i = 0; i < n; ++i)
    if (row_labels[i] >= 0) out.column_order.push_back(i);
  for (int i = 0; i < n; ++i)
    if (row_labels[i] < 0) out.column_order.push_back(i);

  out.ds.x.resize(d, n);
  for (int i = 0; i < n; ++i) out.ds.x.col(i) = rows[out.column_order[i]];
  out.ds.num_labeled =
      static_cast<int>(std::count_if(row_labels.begin(), row_labels.end(),
                                     [](int v) { return v >= 0; }));
  out.ds.labels.resize(out.ds.num_labeled);
  for (int i = 0; i < out.ds.num_labeled; ++i) out.ds.labels[i] = row_labels[out.column_order[i]];
  out.ds.num_classes = c;
  out.ds.validate();
  return out;
}

void save_csv(const std::string& path, const Dataset& ds) {
  ds.validate();
  std::ofstream outf(path, std::ios::binary);
  if (!outf) throw std::runtime_error("csv: cannot write " + path);

  outf << "label";
  for (int j = 0; j < ds.dim(); ++j) outf << ",f" << j;
  outf << "\n";

  char buf[64];
  for (int i = 0; i < ds.size(); ++i) {
    if (i < ds.num_labeled)
      outf << ds.labels[i];
    else
      outf << "?";
    for (int j = 0; j < ds.dim(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", ds.x(j, i));
      outf << "," << buf;
    }
    outf << "\n";
  }
  if (!outf) throw std::runtime_error("csv: write failed for " + path);
}

void save_results(const std::string& path, const nlohmann::ordered_json& results) {
  std::ofstream outf(path, std::ios::binary);
  if (!outf) throw std::runtime_error("results: cannot write " + path);
  outf << results.dump(2) << "\n";
  if (!outf) throw std::runtime_error("results: write failed for " + path);
}

}  // namespace rs2acf::data
