#pragma once

#include "verspace/core.hpp"
#include "verspace/data.hpp"
#include "verspace/sampler.hpp"

#include <optional>

namespace verspace {

/// phi(x) = x, or phi(x) = max(U x, 0) with unit-norm rows of U.
class FeatureMap {
public:
    enum class Kind { linear, random_relu };

    static FeatureMap linear(Eigen::Index input_dim);

    /// Throws std::invalid_argument unless every row of `projection` has unit norm
    /// (to 1e-9).
    static FeatureMap random_relu(RowMatrix projection);

    /// Draws U with `n_features` rows uniform on the sphere S^{input_dim - 1}.
    static FeatureMap random_relu(Eigen::Index input_dim, Eigen::Index n_features, Rng& rng);

    Kind kind() const noexcept { return kind_; }
    Eigen::Index input_dim() const noexcept { return input_dim_; }
    Eigen::Index output_dim() const noexcept { return output_dim_; }
    const std::optional<RowMatrix>& projection() const noexcept { return projection_; }

    Vector apply(const Vector& x) const;

    /// Maps every row of `points`.
    RowMatrix apply_rows(const RowMatrix& points) const;

    /// Maps the points of a dataset, keeping labels (standardization record dropped).
    LabeledDataset apply(const LabeledDataset& data) const;

private:
    FeatureMap(Kind kind, Eigen::Index in, Eigen::Index out, std::optional<RowMatrix> proj)
        : kind_(kind), input_dim_(in), output_dim_(out), projection_(std::move(proj)) {}

    Kind kind_;
    Eigen::Index input_dim_;
    Eigen::Index output_dim_;
    std::optional<RowMatrix> projection_;
};

Vector linear_map(const Vector& x);

/// Rows are normalized Gaussian draws, i.e. uniform on the unit sphere.
RowMatrix sample_sphere_rows(Eigen::Index n_rows, Eigen::Index dim, Rng& rng);

/// max(U x, 0). Throws std::invalid_argument for a linear map or a dimension mismatch.
Vector random_relu_map(const Vector& x, const FeatureMap& map);

/// Row i = y_i phi(x_i). Throws DataError on bad labels or when some phi(x_i) is all zero.
ConstraintSet build_constraints(const LabeledDataset& data, const FeatureMap& map);

}  // namespace verspace
