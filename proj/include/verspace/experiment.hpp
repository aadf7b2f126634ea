#pragma once

#include "verspace/core.hpp"
#include "verspace/sampler.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace verspace {

enum class Task { image_linear, image_rrf, gaussian_linear, equicorr_theory, worst_case };

std::string to_string(Task task);
/// Throws ConfigError for an unknown name.
Task task_from_string(const std::string& name);

struct DatasetConfig {
    /// "idx" (MNIST-format files) or "gaussian" (synthetic mixture; worst_case only).
    std::string source = "idx";
    /// "mnist", "fashion_mnist" or anything else with explicit class ids.
    std::string name = "mnist";
    /// Directory holding the IDX files; defaults to $VERSPACE_DATA_DIR/<name>.
    std::string dir;
    std::string train_images = "train-images-idx3-ubyte";
    std::string train_labels = "train-labels-idx1-ubyte";
    std::string test_images = "t10k-images-idx3-ubyte";
    std::string test_labels = "t10k-labels-idx1-ubyte";
    int class_pos = 0;
    int class_neg = 1;
    std::int64_t n = 350;
    std::int64_t m = 5000;
    /// "per_feature" or "none".
    std::string standardize = "per_feature";
};

struct FeatureConfig {
    std::int64_t n_features = 1000;
    /// When set, the training size becomes round(alpha * n_features).
    std::optional<double> alpha;
    /// Standardize the random ReLU features (fitted on S_n) before sampling.
    bool standardize = false;
};

struct GaussianConfig {
    std::int64_t d = 100;
    double snr = 2.0;
    std::int64_t n = 50;
};

struct EquicorrConfig {
    std::vector<std::int64_t> n{100, 1000, 10000, 100000};
    std::vector<double> rho{0.3, 0.5, 0.8};
    std::size_t draws = 100000;
};

struct WorstCaseConfig {
    std::vector<std::int64_t> n{100, 350, 700};
    std::size_t typical_samples = 1000;
    std::size_t max_iterations = 100000;
    double step_scale = 0.1;
};

struct ExperimentConfig {
    Task task = Task::gaussian_linear;
    std::uint64_t seed = 0;
    std::size_t threads = 1;
    std::size_t chains = 4;
    ChainConfig chain;
    std::size_t grid_points = 512;
    DatasetConfig dataset;
    FeatureConfig features;
    GaussianConfig gaussian;
    EquicorrConfig equicorr;
    WorstCaseConfig worst_case;

    /// Parses a JSON config, rejecting unknown keys and ill-typed values with
    /// ConfigError. A "task" key, if present, must agree with `task`.
    static ExperimentConfig from_json(const nlohmann::json& j, Task task);

    /// Effective configuration, defaults included.
    nlohmann::json to_json() const;

    /// Throws ConfigError on inconsistent values.
    void validate() const;
};

struct OutputFile {
    std::string name;
    std::string sha256;
    std::size_t bytes = 0;
};

struct RunRecord {
    nlohmann::json config;
    std::string started_at;
    std::string finished_at;
    std::vector<OutputFile> outputs;
    nlohmann::json diagnostics = nlohmann::json::object();
    nlohmann::json knobs = nlohmann::json::object();

    nlohmann::json to_json() const;
};

/// Runs the configured pipeline and writes its CSV outputs plus run.json into
/// `out_dir` (created if needed). All files are written after computation finishes.
RunRecord run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir);

}  // namespace verspace
