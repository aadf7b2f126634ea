#include "verspace/data.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <string>

namespace verspace {

namespace {

std::uint32_t read_be32(std::span<const std::uint8_t> b, std::size_t at) {
    return (std::uint32_t{b[at]} << 24) | (std::uint32_t{b[at + 1]} << 16) |
           (std::uint32_t{b[at + 2]} << 8) | std::uint32_t{b[at + 3]};
}

void append_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

std::string hex32(std::uint32_t v) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "0x%08X", v);
    return buf;
}

}  // namespace

void LabeledDataset::validate() const {
    if (labels.size() != points.rows())
        throw DataError("dataset: " + std::to_string(points.rows()) + " points but " +
                        std::to_string(labels.size()) + " labels");
    for (Eigen::Index i = 0; i < labels.size(); ++i)
        if (labels[i] != 1 && labels[i] != -1)
            throw DataError("dataset: label " + std::to_string(labels[i]) + " at row " +
                            std::to_string(i) + " is not +-1");
}

std::size_t IdxTensor::slice_size() const {
    std::size_t s = 1;
    for (std::size_t i = 1; i < dims.size(); ++i) s *= dims[i];
    return s;
}

IdxTensor parse_idx(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 4) throw DataError("IDX: truncated header (" + std::to_string(bytes.size()) + " bytes)");
    const std::uint32_t magic = read_be32(bytes, 0);
    const std::uint32_t rank = magic & 0xFFu;
    if ((magic & 0xFFFFFF00u) != 0x00000800u || rank == 0 || rank > 4)
        throw DataError("IDX: bad magic, expected 0x00000801..0x00000804 (unsigned byte, rank 1-4), found " +
                        hex32(magic));

    const std::size_t header = 4 + 4 * std::size_t{rank};
    if (bytes.size() < header) throw DataError("IDX: truncated dimension header");

    IdxTensor t;
    std::size_t total = 1;
    for (std::uint32_t i = 0; i < rank; ++i) {
        const std::uint32_t d = read_be32(bytes, 4 + 4 * i);
        if (d != 0 && total > std::numeric_limits<std::size_t>::max() / d)
            throw DataError("IDX: shape overflows addressable size");
        total *= d;
        t.dims.push_back(d);
    }
    if (bytes.size() - header < total)
        throw DataError("IDX: truncated payload, expected " + std::to_string(total) + " bytes, found " +
                        std::to_string(bytes.size() - header));
    t.data.assign(bytes.begin() + static_cast<std::ptrdiff_t>(header),
                  bytes.begin() + static_cast<std::ptrdiff_t>(header + total));
    return t;
}

std::vector<std::uint8_t> write_idx(const IdxTensor& tensor) {
    std::vector<std::uint8_t> out;
    out.reserve(4 + 4 * tensor.dims.size() + tensor.data.size());
    append_be32(out, 0x00000800u | static_cast<std::uint32_t>(tensor.dims.size()));
    for (auto d : tensor.dims) append_be32(out, d);
    out.insert(out.end(), tensor.data.begin(), tensor.data.end());
    return out;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw DataError("missing data file: " + path.string());

    if (path.extension() == ".gz") {
        gzFile gz = gzopen(path.c_str(), "rb");
        if (!gz) throw DataError("cannot open " + path.string());
        std::vector<std::uint8_t> out;
        std::uint8_t buf[1 << 16];
        int got;
        while ((got = gzread(gz, buf, sizeof buf)) > 0) out.insert(out.end(), buf, buf + got);
        const bool failed = got < 0;
        gzclose(gz);
        if (failed) throw DataError("gzip decode failed for " + path.string());
        return out;
    }

    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

IdxTensor load_idx(const std::filesystem::path& path) {
    const auto bytes = read_file_bytes(path);
    try {
        return parse_idx(bytes);
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

LabeledDataset make_binary_task(const IdxTensor& images, const IdxTensor& labels, int class_pos,
                                int class_neg) {
    if (class_pos == class_neg) throw DataError("binary task: classes must differ");
    if (labels.dims.size() != 1) throw DataError("binary task: labels must be a rank-1 IDX tensor");
    if (images.dims.empty() || images.count() != labels.count())
        throw DataError("binary task: image/label counts differ");

    const std::size_t d = images.slice_size();
    std::vector<std::size_t> keep;
    std::size_t n_pos = 0, n_neg = 0;
    for (std::size_t i = 0; i < labels.count(); ++i) {
        const int c = labels.data[i];
        if (c == class_pos) ++n_pos;
        if (c == class_neg) ++n_neg;
        if (c == class_pos || c == class_neg) keep.push_back(i);
    }
    if (n_pos == 0) throw DataError("binary task: class " + std::to_string(class_pos) + " absent");
    if (n_neg == 0) throw DataError("binary task: class " + std::to_string(class_neg) + " absent");

    LabeledDataset out;
    out.points.resize(static_cast<Eigen::Index>(keep.size()), static_cast<Eigen::Index>(d));
    out.labels.resize(static_cast<Eigen::Index>(keep.size()));
    for (std::size_t r = 0; r < keep.size(); ++r) {
        const auto* px = images.data.data() + keep[r] * d;
        for (std::size_t j = 0; j < d; ++j)
            out.points(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = px[j];
        out.labels[static_cast<Eigen::Index>(r)] = labels.data[keep[r]] == class_pos ? 1 : -1;
    }
    return out;
}

LabeledDataset subsample(const LabeledDataset& data, Eigen::Index n, Rng& rng,
                         LabeledDataset* remainder) {
    if (n < 0 || n > data.size())
        throw DataError("subsample: requested " + std::to_string(n) + " of " +
                        std::to_string(data.size()) + " points");
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(data.size()));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    // Partial Fisher-Yates: the first n entries are the sample.
    for (Eigen::Index i = 0; i < n; ++i) {
        std::uniform_int_distribution<Eigen::Index> pick(i, data.size() - 1);
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick(rng))]);
    }

    auto gather = [&](auto first, auto last) {
        LabeledDataset out;
        const auto m = static_cast<Eigen::Index>(last - first);
        out.points.resize(m, data.dim());
        out.labels.resize(m);
        Eigen::Index r = 0;
        for (auto it = first; it != last; ++it, ++r) {
            out.points.row(r) = data.points.row(*it);
            out.labels[r] = data.labels[*it];
        }
        out.standardization = data.standardization;
        return out;
    };

    if (remainder) {
        std::vector<Eigen::Index> rest(idx.begin() + n, idx.end());
        std::sort(rest.begin(), rest.end());
        *remainder = gather(rest.begin(), rest.end());
    }
    return gather(idx.begin(), idx.begin() + n);
}

LabeledDataset standardize(const LabeledDataset& data) {
    if (data.size() < 2) throw DataError("standardize: need at least 2 points");
    Standardization rec;
    const double n = static_cast<double>(data.size());
    rec.mean = data.points.colwise().mean().transpose();
    rec.scale.resize(data.dim());
    for (Eigen::Index j = 0; j < data.dim(); ++j) {
        const double var = (data.points.col(j).array() - rec.mean[j]).square().sum() / n;
        const double sd = std::sqrt(var);
        rec.scale[j] = sd > 1e-12 * std::max(1.0, std::abs(rec.mean[j])) ? sd : 1.0;
    }
    return apply_standardization(data, rec);
}

LabeledDataset apply_standardization(const LabeledDataset& data, const Standardization& record) {
    if (record.mean.size() != data.dim() || record.scale.size() != data.dim())
        throw DataError("standardization record does not match data dimension");
    LabeledDataset out;
    out.points = (data.points.rowwise() - record.mean.transpose()).array().rowwise() /
                 record.scale.transpose().array();
    out.labels = data.labels;
    out.standardization = record;
    return out;
}

Vector isotropic_mixture_mean(Eigen::Index dim, double snr) {
    if (dim < 1) throw std::invalid_argument("gaussian mixture: dim must be >= 1");
    if (!(snr > 0.0)) throw std::invalid_argument("gaussian mixture: snr must be > 0");
    return Vector::Constant(dim, snr / std::sqrt(static_cast<double>(dim)));
}

LabeledDataset sample_gaussian_mixture(Eigen::Index dim, double snr, Eigen::Index n, Rng& rng) {
    const Vector mu = isotropic_mixture_mean(dim, snr);
    std::normal_distribution<double> normal;
    std::bernoulli_distribution coin(0.5);
    LabeledDataset out;
    out.points.resize(n, dim);
    out.labels.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const int y = coin(rng) ? 1 : -1;
        out.labels[i] = y;
        for (Eigen::Index j = 0; j < dim; ++j) out.points(i, j) = y * mu[j] + normal(rng);
    }
    return out;
}

LabeledDataset concatenate(const LabeledDataset& a, const LabeledDataset& b) {
    if (a.dim() != b.dim()) throw DataError("concatenate: dimension mismatch");
    LabeledDataset out;
    out.points.resize(a.size() + b.size(), a.dim());
    out.points << a.points, b.points;
    out.labels.resize(a.size() + b.size());
    out.labels << a.labels, b.labels;
    return out;
}

}  // namespace verspace
