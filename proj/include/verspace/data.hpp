#pragma once

#include "verspace/core.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace verspace {

/// Per-feature affine transform x -> (x - mean) / scale.
struct Standardization {
    Vector mean;
    Vector scale;
};

/// Points as rows with labels in {-1, +1}.
struct LabeledDataset {
    RowMatrix points;
    Eigen::VectorXi labels;
    std::optional<Standardization> standardization;

    Eigen::Index size() const noexcept { return points.rows(); }
    Eigen::Index dim() const noexcept { return points.cols(); }

    /// Throws DataError if labels are not all +-1 or sizes disagree.
    void validate() const;
};

/// An IDX tensor of unsigned bytes (the MNIST distribution format).
struct IdxTensor {
    std::vector<std::uint32_t> dims;
    std::vector<std::uint8_t> data;

    std::size_t count() const { return dims.empty() ? 0 : dims.front(); }
    /// Number of bytes per leading-index slice.
    std::size_t slice_size() const;
};

/// Parses an IDX byte stream: big-endian magic 0x000008NN (NN = rank), NN big-endian
/// uint32 dimension sizes, then the payload. Throws DataError on bad magic,
/// truncated payload or a shape whose size overflows.
IdxTensor parse_idx(std::span<const std::uint8_t> bytes);

/// Inverse of parse_idx.
std::vector<std::uint8_t> write_idx(const IdxTensor& tensor);

/// Reads a file, gunzipping transparently when the name ends in ".gz".
std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);

IdxTensor load_idx(const std::filesystem::path& path);

/// Keeps the two requested classes, flattens each image, maps class_pos -> +1 and
/// class_neg -> -1. Pixel values are kept as raw 0..255 doubles.
LabeledDataset make_binary_task(const IdxTensor& images, const IdxTensor& labels, int class_pos,
                                int class_neg);

/// n rows drawn uniformly without replacement. `remainder`, if given, receives the
/// rows that were not drawn (in original order).
LabeledDataset subsample(const LabeledDataset& data, Eigen::Index n, Rng& rng,
                         LabeledDataset* remainder = nullptr);

/// Fits per-feature mean and (population) standard deviation, and returns the
/// transformed data with the record attached. Zero-variance features are only centered.
LabeledDataset standardize(const LabeledDataset& data);

/// Applies a previously fitted transform (e.g. training statistics to test data).
LabeledDataset apply_standardization(const LabeledDataset& data, const Standardization& record);

/// Mean vector (snr/sqrt(d), ..., snr/sqrt(d)), so that |mu| = snr.
Vector isotropic_mixture_mean(Eigen::Index dim, double snr);

/// Draws n points from 1/2 N(mu, I) x {+1} + 1/2 N(-mu, I) x {-1}.
LabeledDataset sample_gaussian_mixture(Eigen::Index dim, double snr, Eigen::Index n, Rng& rng);

/// Concatenates rows of two datasets of equal dimension (standardization dropped).
LabeledDataset concatenate(const LabeledDataset& a, const LabeledDataset& b);

}  // namespace verspace
