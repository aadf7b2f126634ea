#include "verspace/data.hpp"

#include <doctest.h>
#include <zlib.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

using namespace verspace;

namespace {

IdxTensor tiny_images() {
    // 5 images of 2x3 pixels; pixel value encodes (image, position).
    IdxTensor t{{5, 2, 3}, {}};
    for (std::uint8_t i = 0; i < 5; ++i)
        for (std::uint8_t p = 0; p < 6; ++p) t.data.push_back(static_cast<std::uint8_t>(10 * i + p));
    return t;
}

IdxTensor tiny_labels() { return {{5}, {3, 7, 3, 1, 7}}; }

std::filesystem::path temp_path(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("verspace_test_" + name);
}

std::string message_of(std::span<const std::uint8_t> bytes) {
    try {
        parse_idx(bytes);
    } catch (const DataError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("IDX round trip") {
    const auto t = tiny_images();
    const auto bytes = write_idx(t);
    CHECK(bytes.size() == 4 + 12 + 30);
    CHECK(bytes[2] == 0x08);
    CHECK(bytes[3] == 0x03);
    const auto back = parse_idx(bytes);
    CHECK(back.dims == t.dims);
    CHECK(back.data == t.data);
    CHECK(back.slice_size() == 6);
}

TEST_CASE("IDX errors name the problem") {
    auto bytes = write_idx(tiny_images());
    auto bad = bytes;
    bad[2] = 0x0D;  // float payload
    CHECK(message_of(bad).find("bad magic") != std::string::npos);
    CHECK(message_of(bad).find("0x00000D03") != std::string::npos);
    bad = bytes;
    bad[3] = 0x05;
    CHECK(message_of(bad).find("bad magic") != std::string::npos);
    CHECK(message_of(std::span(bytes).first(3)).find("truncated header") != std::string::npos);
    CHECK(message_of(std::span(bytes).first(9)).find("truncated dimension") != std::string::npos);
    CHECK(message_of(std::span(bytes).first(bytes.size() - 1)).find("truncated payload") != std::string::npos);
    const std::vector<std::uint8_t> huge{0, 0, 8, 4, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff,
                                         0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff};
    CHECK(message_of(huge).find("overflow") != std::string::npos);
}

TEST_CASE("IDX files load raw and gzipped") {
    const auto bytes = write_idx(tiny_labels());
    const auto raw = temp_path("labels.idx");
    {
        std::ofstream out(raw, std::ios::binary);
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    }
    const auto gz = temp_path("labels.idx.gz");
    gzFile f = gzopen(gz.c_str(), "wb");
    REQUIRE(f);
    gzwrite(f, bytes.data(), static_cast<unsigned>(bytes.size()));
    gzclose(f);
    CHECK(load_idx(raw).data == tiny_labels().data);
    CHECK(load_idx(gz).data == tiny_labels().data);
    CHECK_THROWS_AS(load_idx(temp_path("does_not_exist")), DataError);
    std::filesystem::remove(raw);
    std::filesystem::remove(gz);
}

TEST_CASE("binary task keeps two classes in order") {
    const auto d = make_binary_task(tiny_images(), tiny_labels(), 7, 3);
    REQUIRE(d.size() == 4);
    CHECK(d.dim() == 6);
    CHECK(d.labels == Eigen::Vector4i(-1, 1, -1, 1));
    CHECK(d.points(1, 5) == 15.0);
    CHECK(d.points(3, 0) == 40.0);
    CHECK_THROWS_AS(make_binary_task(tiny_images(), tiny_labels(), 7, 9), DataError);
    CHECK_THROWS_AS(make_binary_task(tiny_images(), tiny_labels(), 7, 7), DataError);
    IdxTensor short_labels{{4}, {3, 7, 3, 1}};
    CHECK_THROWS_AS(make_binary_task(tiny_images(), short_labels, 7, 3), DataError);
}

TEST_CASE("subsample draws without replacement and returns the rest in order") {
    LabeledDataset d;
    d.points = RowMatrix(20, 1);
    d.labels = Eigen::VectorXi::Ones(20);
    for (int i = 0; i < 20; ++i) d.points(i, 0) = i;
    Rng rng(4);
    LabeledDataset rest;
    const auto s = subsample(d, 7, rng, &rest);
    CHECK(s.size() == 7);
    CHECK(rest.size() == 13);
    std::vector<double> all;
    for (int i = 0; i < 7; ++i) all.push_back(s.points(i, 0));
    for (int i = 0; i < 13; ++i) all.push_back(rest.points(i, 0));
    for (int i = 1; i < 13; ++i) CHECK(rest.points(i, 0) > rest.points(i - 1, 0));
    std::sort(all.begin(), all.end());
    for (int i = 0; i < 20; ++i) CHECK(all[static_cast<std::size_t>(i)] == i);
    CHECK_THROWS_AS(subsample(d, 21, rng), DataError);

    // Property: each index is selected with probability n/N.
    std::vector<int> hits(20, 0);
    Rng r2(5);
    for (int t = 0; t < 20000; ++t) {
        const auto x = subsample(d, 5, r2);
        for (int i = 0; i < 5; ++i) ++hits[static_cast<std::size_t>(x.points(i, 0))];
    }
    for (int h : hits) CHECK(h == doctest::Approx(5000).epsilon(0.06));
}

TEST_CASE("standardization: population sd, zero-variance columns centered only") {
    LabeledDataset d;
    d.points = RowMatrix(4, 2);
    d.points << 1, 5, 2, 5, 3, 5, 4, 5;
    d.labels = Eigen::VectorXi::Ones(4);
    const auto s = standardize(d);
    REQUIRE(s.standardization);
    CHECK(s.standardization->mean[0] == doctest::Approx(2.5));
    CHECK(s.standardization->scale[0] == doctest::Approx(std::sqrt(1.25)));
    CHECK(s.standardization->scale[1] == 1.0);
    CHECK(s.points.col(1).isZero());
    CHECK(s.points.col(0).mean() == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(s.points.col(0).squaredNorm() / 4.0 == doctest::Approx(1.0));
    const auto again = apply_standardization(d, *s.standardization);
    CHECK(again.points.isApprox(s.points));
}

TEST_CASE("gaussian mixture has the requested mean and balanced labels") {
    Rng rng(8);
    const auto mu = isotropic_mixture_mean(50, 2.0);
    CHECK(mu.norm() == doctest::Approx(2.0));
    const auto d = sample_gaussian_mixture(50, 2.0, 40000, rng);
    Vector signed_mean = Vector::Zero(50);
    for (Eigen::Index i = 0; i < d.size(); ++i) signed_mean += d.points.row(i).transpose() * d.labels[i];
    signed_mean /= static_cast<double>(d.size());
    // y x ~ N(mu, I): each coordinate of the mean has sd 1/200.
    CHECK((signed_mean - mu).cwiseAbs().maxCoeff() < 5.0 / 200.0);
    CHECK(std::abs(d.labels.sum()) < 4 * 200);
    // Residual squared norms follow chi^2_50: mean 50, sd 10.
    double mean_sq = 0.0;
    for (Eigen::Index i = 0; i < d.size(); ++i)
        mean_sq += (d.points.row(i).transpose() * d.labels[i] - mu).squaredNorm();
    mean_sq /= static_cast<double>(d.size());
    CHECK(mean_sq == doctest::Approx(50.0).epsilon(0.01));
}

TEST_CASE("dataset validation") {
    LabeledDataset d;
    d.points = RowMatrix::Zero(2, 2);
    d.labels = Eigen::Vector2i(1, 0);
    CHECK_THROWS_AS(d.validate(), DataError);
    d.labels = Eigen::Vector2i(1, -1);
    CHECK_NOTHROW(d.validate());
}
