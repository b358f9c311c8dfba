#ifndef RS2ACF_DATA_HPP
#define RS2ACF_DATA_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "rs2acf/types.hpp"

namespace rs2acf::data {

/// Synthetic Gaussian-blob scenario; per-class sample counts may differ so
/// class-imbalanced neighborhoods can be reproduced.
struct BlobSpec {
  int num_classes = 2;
  std::vector<int> samples_per_class;  // one count per class
  int dim = 2;
  double separation = 4.0;       // pairwise distance between class centers
  double stddev = 1.0;           // within-class standard deviation
  double labeled_fraction = 0.3; // in (0, 1]; at least one labeled per class
  std::uint64_t seed = 0;

  int total_samples() const;
  void validate() const;
};

/// Gaussian blobs around well-separated centers, shifted so the minimum entry
/// is nonnegative. Labeled columns come first, stratified per class.
Dataset make_blobs(const BlobSpec& spec);

/// Ground-truth class of every column of make_blobs(spec), labeled and
/// unlabeled alike, in the same column order.
std::vector<int> blob_truth(const BlobSpec& spec);

/// Entrywise additive Gaussian noise with standard deviation noise_scale.
Dataset add_noise(const Dataset& ds, double noise_scale, std::uint64_t seed);

/// Keep a stratified fraction of an entirely labeled dataset's labels and
/// reorder columns labeled-first. column_order[i] is the source column of
/// output column i, so ground truth can be carried across the reordering.
struct MaskedDataset {
  Dataset ds;
  std::vector<int> column_order;
};
MaskedDataset mask_labels(const Dataset& ds, double labeled_fraction, std::uint64_t seed);

struct LoadedCsv {
  Dataset ds;
  std::vector<int> column_order;  // source row (0-based, excluding header) per column
};

/// CSV with header "label,f0,...,f{D-1}"; one sample per row, class id or '?'
/// in the label column. Columns are reordered labeled-first.
LoadedCsv load_csv(const std::string& path);

/// Inverse of load_csv for a Dataset, 17 significant digit values.
void save_csv(const std::string& path, const Dataset& ds);

/// Write a results document; key order is preserved and output is
/// byte-stable for identical content.
void save_results(const std::string& path, const nlohmann::ordered_json& results);

}  // namespace rs2acf::data

#endif
