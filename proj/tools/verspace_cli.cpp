#include "verspace/experiment.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>

namespace {

constexpr const char* kDataHelp =
    "Datasets are read from --config dataset.dir or $VERSPACE_DATA_DIR/<name> (IDX files, optionally .gz).\n"
    "MNIST:         https://ossci-datasets.s3.amazonaws.com/mnist/\n"
    "Fashion-MNIST: http://fashion-mnist.s3-website.eu-central-1.amazonaws.com/\n"
    "Exit codes: 0 ok, 2 config, 3 data, 4 infeasible version space, 5 numerical abort.";

nlohmann::json read_config(const std::string& path) {
    if (path.empty()) return nlohmann::json::object();
    std::ifstream in(path);
    if (!in) throw verspace::ConfigError("cannot open config file " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw verspace::ConfigError("config " + path + ": " + e.what());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sample interpolating classifiers and estimate their test-error distribution"};
    app.footer(kDataHelp);
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> threads;

    for (verspace::Task task : {verspace::Task::image_linear, verspace::Task::image_rrf,
                                verspace::Task::gaussian_linear, verspace::Task::equicorr_theory,
                                verspace::Task::worst_case}) {
        auto* sub = app.add_subcommand(verspace::to_string(task));
        sub->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory")->capture_default_str();
        sub->add_option("--seed", seed, "override config seed");
        sub->add_option("--threads", threads, "maximum parallel chains")->check(CLI::PositiveNumber);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        const auto task = verspace::task_from_string(app.get_subcommands().front()->get_name());
        auto config = verspace::ExperimentConfig::from_json(read_config(config_path), task);
        if (seed) config.seed = *seed;
        if (threads) config.threads = *threads;
        const auto record = verspace::run_experiment(config, out_dir);
        for (const auto& f : record.outputs) std::cout << f.name << "  " << f.sha256 << "\n";
        return 0;
    } catch (const verspace::Error& e) {
        std::cerr << "verspace: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "verspace: internal error: " << e.what() << "\n";
        return 1;
    }
}
