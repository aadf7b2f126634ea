#include "verspace/features.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace verspace {

FeatureMap FeatureMap::linear(Eigen::Index input_dim) {
    return FeatureMap(Kind::linear, input_dim, input_dim, std::nullopt);
}

FeatureMap FeatureMap::random_relu(RowMatrix projection) {
    for (Eigen::Index i = 0; i < projection.rows(); ++i) {
        if (std::abs(projection.row(i).norm() - 1.0) > 1e-9)
            throw std::invalid_argument("random_relu: projection row " + std::to_string(i) +
                                        " is not unit norm");
    }
    const auto in = projection.cols();
    const auto out = projection.rows();
    return FeatureMap(Kind::random_relu, in, out, std::move(projection));
}

FeatureMap FeatureMap::random_relu(Eigen::Index input_dim, Eigen::Index n_features, Rng& rng) {
    return random_relu(sample_sphere_rows(n_features, input_dim, rng));
}

Vector FeatureMap::apply(const Vector& x) const {
    if (x.size() != input_dim_)
        throw std::invalid_argument("feature map: input has dimension " + std::to_string(x.size()) +
                                    ", expected " + std::to_string(input_dim_));
    if (kind_ == Kind::linear) return x;
    return (*projection_ * x).cwiseMax(0.0);
}

RowMatrix FeatureMap::apply_rows(const RowMatrix& points) const {
    if (points.cols() != input_dim_)
        throw std::invalid_argument("feature map: points have dimension " +
                                    std::to_string(points.cols()) + ", expected " +
                                    std::to_string(input_dim_));
    if (kind_ == Kind::linear) return points;
    RowMatrix out = points * projection_->transpose();
    return out.cwiseMax(0.0);
}

LabeledDataset FeatureMap::apply(const LabeledDataset& data) const {
    LabeledDataset out;
    out.points = apply_rows(data.points);
    out.labels = data.labels;
    return out;
}

Vector linear_map(const Vector& x) { return x; }

RowMatrix sample_sphere_rows(Eigen::Index n_rows, Eigen::Index dim, Rng& rng) {
    if (dim < 1) throw std::invalid_argument("sample_sphere_rows: dim must be >= 1");
    std::normal_distribution<double> normal;
    RowMatrix u(n_rows, dim);
    for (Eigen::Index i = 0; i < n_rows; ++i) {
        double norm = 0.0;
        // A zero draw has probability zero but would not normalize.
        while (norm == 0.0) {
            for (Eigen::Index j = 0; j < dim; ++j) u(i, j) = normal(rng);
            norm = u.row(i).norm();
        }
        u.row(i) /= norm;
    }
    return u;
}

Vector random_relu_map(const Vector& x, const FeatureMap& map) {
    if (map.kind() != FeatureMap::Kind::random_relu)
        throw std::invalid_argument("random_relu_map: map is not a random ReLU map");
    return map.apply(x);
}

ConstraintSet build_constraints(const LabeledDataset& data, const FeatureMap& map) {
    data.validate();
    RowMatrix rows = map.apply_rows(data.points);
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        if (rows.row(i).isZero(0.0))
            throw DataError("build_constraints: feature vector of point " + std::to_string(i) +
                            " is all zero");
        rows.row(i) *= static_cast<double>(data.labels[i]);
    }
    return ConstraintSet(std::move(rows));
}

}  // namespace verspace
