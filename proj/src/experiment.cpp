#include "verspace/experiment.hpp"

#include "verspace/data.hpp"
#include "verspace/equicorr.hpp"
#include "verspace/estimator.hpp"
#include "verspace/features.hpp"
#include "verspace/io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <set>

namespace verspace {

using nlohmann::json;

namespace {

// Seed streams; every random component of a run draws from its own stream.
enum Stream : std::uint64_t {
    kTrainSubsample = 1,
    kTestSubsample = 2,
    kFeatureProjection = 3,
    kChains = 4,
    kGaussianTrain = 5,
    kGaussianTest = 6,
    kWorstCase = 7,
    kEquicorrSim = 8,
};

// Strict reader over one JSON object: every key must be consumed.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_ + ": expected a JSON object");
    }

    bool has(const char* key) const { return j_.contains(key); }

    template <class T>
    void read(const char* key, T& out) {
        if (!j_.contains(key)) return;
        used_.insert(key);
        out = convert<T>(j_.at(key), path_ + "." + key);
    }

    template <class T>
    void read(const char* key, std::optional<T>& out) {
        if (!j_.contains(key)) return;
        used_.insert(key);
        out = convert<T>(j_.at(key), path_ + "." + key);
    }

    template <class T>
    void read(const char* key, std::vector<T>& out) {
        if (!j_.contains(key)) return;
        used_.insert(key);
        const auto& v = j_.at(key);
        const std::string where = path_ + "." + key;
        if (!v.is_array()) throw ConfigError(where + ": expected an array");
        out.clear();
        for (std::size_t i = 0; i < v.size(); ++i)
            out.push_back(convert<T>(v[i], where + "[" + std::to_string(i) + "]"));
    }

    const json* child(const char* key) {
        if (!j_.contains(key)) return nullptr;
        used_.insert(key);
        return &j_.at(key);
    }

    void skip(const char* key) { used_.insert(key); }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!used_.count(it.key())) throw ConfigError("unknown config key '" + path_ + "." + it.key() + "'");
    }

private:
    template <class T>
    static T convert(const json& v, const std::string& where) {
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) throw ConfigError(where + ": expected a boolean");
            return v.get<bool>();
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) throw ConfigError(where + ": expected a string");
            return v.get<std::string>();
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number()) throw ConfigError(where + ": expected a number");
            return v.get<T>();
        } else if constexpr (std::is_unsigned_v<T>) {
            if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0))
                throw ConfigError(where + ": expected a non-negative integer");
            return v.get<T>();
        } else {
            if (!v.is_number_integer()) throw ConfigError(where + ": expected an integer");
            return v.get<T>();
        }
    }

    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// ---------------------------------------------------------------------------
// Data preparation

std::filesystem::path dataset_dir(const DatasetConfig& cfg) {
    if (!cfg.dir.empty()) return cfg.dir;
    const char* root = std::getenv("VERSPACE_DATA_DIR");
    if (!root || !*root)
        throw DataError("dataset directory unknown: set dataset.dir or VERSPACE_DATA_DIR");
    return std::filesystem::path(root) / cfg.name;
}

std::filesystem::path resolve_file(const std::filesystem::path& dir, const std::string& name) {
    const auto plain = dir / name;
    if (std::filesystem::exists(plain)) return plain;
    const auto gz = dir / (name + ".gz");
    if (std::filesystem::exists(gz)) return gz;
    throw DataError("missing data file: " + plain.string() + "[.gz]");
}

struct Split {
    LabeledDataset train_pool;
    LabeledDataset test_pool;
};

Split load_image_split(const DatasetConfig& cfg, json& diag) {
    const auto dir = dataset_dir(cfg);
    Split s;
    s.train_pool = make_binary_task(load_idx(resolve_file(dir, cfg.train_images)),
                                    load_idx(resolve_file(dir, cfg.train_labels)), cfg.class_pos,
                                    cfg.class_neg);
    s.test_pool = make_binary_task(load_idx(resolve_file(dir, cfg.test_images)),
                                   load_idx(resolve_file(dir, cfg.test_labels)), cfg.class_pos,
                                   cfg.class_neg);
    if (cfg.standardize == "per_feature") {
        // Statistics come from the whole two-class training file, never from test data.
        s.train_pool = standardize(s.train_pool);
        s.test_pool = apply_standardization(s.test_pool, *s.train_pool.standardization);
    }
    diag["train_pool_size"] = s.train_pool.size();
    diag["test_pool_size"] = s.test_pool.size();
    return s;
}

struct TrainTest {
    LabeledDataset train;
    LabeledDataset test;
};

// S_n uniformly from the training pool; m test points from the official test file,
// topped up from the unused training pool when the test file is too small.
TrainTest draw_train_test(const Split& split, std::int64_t n, std::int64_t m, std::uint64_t seed,
                          json& diag) {
    Rng train_rng(derive_seed(seed, kTrainSubsample));
    Rng test_rng(derive_seed(seed, kTestSubsample));
    LabeledDataset remainder;
    TrainTest tt;
    tt.train = subsample(split.train_pool, n, train_rng, &remainder);
    if (m <= split.test_pool.size()) {
        tt.test = subsample(split.test_pool, m, test_rng);
        diag["test_points_from_train_pool"] = 0;
    } else {
        const auto extra = m - split.test_pool.size();
        if (extra > remainder.size())
            throw DataError("not enough points for m = " + std::to_string(m) + " test points");
        tt.test = concatenate(split.test_pool, subsample(remainder, extra, test_rng));
        diag["test_points_from_train_pool"] = extra;
    }
    return tt;
}

// ---------------------------------------------------------------------------
// Shared pieces

json summarize(const std::vector<double>& errors, const std::vector<std::size_t>& offsets,
               const std::vector<double>& grid) {
    json s;
    s["median_error"] = error_quantile(errors, 0.5);
    s["interdecile_width"] = interdecile_width(errors);
    s["min_error"] = *std::min_element(errors.begin(), errors.end());
    s["max_error"] = *std::max_element(errors.begin(), errors.end());
    for (double eps : {0.05, 0.08}) {
        const auto c = std::count_if(errors.begin(), errors.end(), [eps](double e) { return e <= eps; });
        s[fmt::format("cdf_at_{}", eps)] = static_cast<double>(c) / static_cast<double>(errors.size());
    }
    // Between-chain agreement: largest sup-norm gap between per-chain CDFs.
    std::vector<ErrorCdf> per_chain;
    for (std::size_t c = 0; c < offsets.size(); ++c) {
        const std::size_t end = c + 1 < offsets.size() ? offsets[c + 1] : errors.size();
        if (end > offsets[c])
            per_chain.push_back(error_cdf(std::span(errors).subspan(offsets[c], end - offsets[c]), grid));
    }
    double gap = 0.0;
    for (std::size_t a = 0; a < per_chain.size(); ++a)
        for (std::size_t b = a + 1; b < per_chain.size(); ++b)
            gap = std::max(gap, sup_distance(per_chain[a], per_chain[b]));
    s["chain_agreement_sup_gap"] = gap;
    s["n_chains"] = offsets.size();
    return s;
}

ChainConfig chain_for(const ExperimentConfig& cfg, std::size_t n_samples) {
    ChainConfig c = cfg.chain;
    c.n_samples = n_samples;
    c.seed = derive_seed(cfg.seed, kChains);
    return c;
}

void record_file(RunRecord& rec, const std::filesystem::path& dir, const std::string& name,
                 const std::string& text) {
    io::write_text_file(dir / name, text);
    rec.outputs.push_back({name, io::sha256_hex(text), text.size()});
}

json common_knobs(const ExperimentConfig& cfg) {
    json k;
    k["standardization"] = cfg.dataset.standardize == "per_feature"
                               ? "per_feature_population_sd_fit_on_two_class_training_file"
                               : "none";
    k["zero_variance_features"] = "centered_only";
    k["tie_rule"] = "zero_score_counts_as_correct";
    k["chain_init"] = "perceptron_rescaled_to_sqrt_dim";
    k["arc_degenerate_tol"] = 1e-12;
    k["rounding_guard_tol"] = 1e-10;
    k["train_subsample"] = "uniform_without_replacement";
    k["rng"] = "mt19937_64 + splitmix64 stream derivation";
    k["rrf_feature_standardization"] = cfg.features.standardize;
    return k;
}

// ---------------------------------------------------------------------------
// Tasks

void run_image(const ExperimentConfig& cfg, const std::filesystem::path& out, RunRecord& rec) {
    const bool rrf = cfg.task == Task::image_rrf;
    auto split = load_image_split(cfg.dataset, rec.diagnostics);
    std::int64_t n = cfg.dataset.n;
    if (rrf && cfg.features.alpha)
        n = static_cast<std::int64_t>(std::llround(*cfg.features.alpha * static_cast<double>(cfg.features.n_features)));

    const auto input_dim = split.train_pool.dim();
    Rng feature_rng(derive_seed(cfg.seed, kFeatureProjection));
    const FeatureMap map = rrf ? FeatureMap::random_relu(input_dim, cfg.features.n_features, feature_rng)
                               : FeatureMap::linear(input_dim);
    if (n >= map.output_dim())
        throw ConfigError(fmt::format("n = {} must be below the feature dimension {}", n, map.output_dim()));

    auto tt = draw_train_test(split, n, cfg.dataset.m, cfg.seed, rec.diagnostics);
    LabeledDataset train_f = map.apply(tt.train);
    LabeledDataset test_f = map.apply(tt.test);
    if (rrf && cfg.features.standardize) {
        train_f = standardize(train_f);
        test_f = apply_standardization(test_f, *train_f.standardization);
    }

    const auto constraints = build_constraints(train_f, FeatureMap::linear(train_f.dim()));
    std::vector<std::size_t> offsets;
    const auto chain = sample_version_space_chains(constraints, chain_for(cfg, cfg.chain.n_samples),
                                                   cfg.chains, cfg.threads, &offsets);
    const auto errors = empirical_errors(chain.samples, test_f.points, test_f.labels);
    const auto grid = uniform_grid(cfg.grid_points);
    const auto cdf = error_cdf(errors, grid, static_cast<std::size_t>(test_f.size()));

    rec.diagnostics["n"] = n;
    rec.diagnostics["m"] = test_f.size();
    rec.diagnostics["feature_dim"] = map.output_dim();
    rec.diagnostics["alpha"] = static_cast<double>(n) / static_cast<double>(map.output_dim());
    rec.diagnostics["steps"] = chain.steps;
    rec.diagnostics["guard_corrections"] = chain.guard_corrections;
    rec.diagnostics["errors"] = summarize(errors, offsets, grid);

    record_file(rec, out, "cdf.csv", io::format_cdf_csv(cdf));
    record_file(rec, out, "errors.csv", io::format_errors_csv(errors));
}

void run_gaussian(const ExperimentConfig& cfg, const std::filesystem::path& out, RunRecord& rec) {
    const auto& g = cfg.gaussian;
    Rng data_rng(derive_seed(cfg.seed, kGaussianTrain));
    const auto train = sample_gaussian_mixture(g.d, g.snr, g.n, data_rng);
    const auto spec = GaussianMixtureSpec::isotropic(g.d, g.snr);

    const auto constraints = build_constraints(train, FeatureMap::linear(g.d));
    std::vector<std::size_t> offsets;
    const auto chain = sample_version_space_chains(constraints, chain_for(cfg, cfg.chain.n_samples),
                                                   cfg.chains, cfg.threads, &offsets);
    const auto errors = population_errors_gaussian(chain.samples, spec);
    const auto grid = uniform_grid(cfg.grid_points);
    const auto cdf = error_cdf(errors, grid, 0);

    rec.diagnostics["alpha"] = static_cast<double>(g.n) / static_cast<double>(g.d);
    rec.diagnostics["bayes_lower_bound"] = bayes_lower_bound(spec);
    rec.diagnostics["steps"] = chain.steps;
    rec.diagnostics["guard_corrections"] = chain.guard_corrections;
    rec.diagnostics["errors"] = summarize(errors, offsets, grid);

    record_file(rec, out, "cdf.csv", io::format_cdf_csv(cdf));
    record_file(rec, out, "errors.csv", io::format_errors_csv(errors));
}

void run_equicorr(const ExperimentConfig& cfg, const std::filesystem::path& out, RunRecord& rec) {
    const auto& e = cfg.equicorr;
    const auto rows = theory_table(e.n, e.rho);
    const auto grid = uniform_grid(cfg.grid_points);

    std::string cdf_csv = "n,rho,epsilon,limit_cdf,exact_cdf,simulated_cdf\n";
    json ess = json::array();
    std::uint64_t stream = 0;
    for (double rho : e.rho) {
        for (auto n : e.n) {
            const EquicorrModel model(n, rho);
            Rng rng(derive_seed(derive_seed(cfg.seed, kEquicorrSim), stream++));
            double eff = 0.0;
            const auto sim = simulate_equicorr_rn(model, e.draws, grid, rng, &eff);
            ess.push_back({{"n", n}, {"rho", rho}, {"effective_draws", eff},
                           {"critical_value", critical_value(model)}});
            for (std::size_t k = 0; k < grid.size(); ++k)
                cdf_csv += fmt::format("{},{},{:.12f},{},{},{}\n", n, rho, grid[k],
                                       limit_cdf(model, grid[k]), exact_rn(model, grid[k]), sim.cdf[k]);
        }
    }
    rec.diagnostics["simulation"] = ess;
    record_file(rec, out, "theory.csv", io::format_theory_csv(rows));
    record_file(rec, out, "theory_cdf.csv", cdf_csv);
}

void run_worst_case(const ExperimentConfig& cfg, const std::filesystem::path& out, RunRecord& rec) {
    const auto& wc = cfg.worst_case;
    const auto max_n = *std::max_element(wc.n.begin(), wc.n.end());

    Split split;
    if (cfg.dataset.source == "gaussian") {
        Rng train_rng(derive_seed(cfg.seed, kGaussianTrain));
        Rng test_rng(derive_seed(cfg.seed, kGaussianTest));
        split.train_pool = sample_gaussian_mixture(cfg.gaussian.d, cfg.gaussian.snr, max_n, train_rng);
        split.test_pool = sample_gaussian_mixture(cfg.gaussian.d, cfg.gaussian.snr, cfg.dataset.m, test_rng);
    } else {
        split = load_image_split(cfg.dataset, rec.diagnostics);
    }

    std::string csv =
        "n,n_bad,worst_case_error,typical_median_error,train_accuracy,bad_accuracy,iterations,converged\n";
    json per_n = json::array();
    for (auto n : wc.n) {
        json d;
        const std::uint64_t seed_n = derive_seed(cfg.seed, 1000 + static_cast<std::uint64_t>(n));
        auto tt = draw_train_test(split, n, cfg.dataset.m, seed_n, d);
        if (n >= tt.train.dim())
            throw ConfigError(fmt::format("worst_case: n = {} must be below dimension {}", n, tt.train.dim()));

        WorstCaseOptions opts;
        opts.logistic.max_iterations = wc.max_iterations;
        opts.logistic.step_scale = wc.step_scale;
        Rng rng(derive_seed(seed_n, kWorstCase));
        const auto worst = worst_case_classifier(tt.train, rng, opts);
        const auto linear = FeatureMap::linear(tt.train.dim());
        const double worst_err = empirical_error(worst.w, tt.test, linear);

        double typical_median = std::nan("");
        if (wc.typical_samples > 0) {
            ExperimentConfig sub = cfg;
            sub.seed = seed_n;
            const auto chain = sample_version_space_chains(build_constraints(tt.train, linear),
                                                           chain_for(sub, wc.typical_samples), cfg.chains,
                                                           cfg.threads);
            const auto errs = empirical_errors(chain.samples, tt.test.points, tt.test.labels);
            typical_median = error_quantile(errs, 0.5);
        }

        const auto& wd = worst.diagnostics;
        csv += fmt::format("{},{},{:.12f},{:.12f},{:.12f},{:.12f},{},{}\n", n, wd.n_bad, worst_err,
                           typical_median, wd.train_accuracy, wd.bad_accuracy, wd.iterations,
                           wd.converged ? 1 : 0);
        d["n"] = n;
        d["warning_train_accuracy_below_99pct"] = wd.warning;
        d["step_size"] = wd.step_size;
        per_n.push_back(d);
    }
    rec.diagnostics["worst_case"] = per_n;
    rec.knobs["bad_points"] = "n_b=(d-1)-n; b_j=-sum_i c_ji y_i x_i, c_ji~U(0,1), norm=mean train norm, label +1";
    rec.knobs["logistic_gd"] = {{"loss", "mean logistic"},
                                {"step", "step_scale / (sigma_max(Z)^2 / rows)"},
                                {"step_scale", wc.step_scale},
                                {"max_iterations", wc.max_iterations},
                                {"init", "N(0, (1e-2)^2 / d)"},
                                {"stop", "all margins > 0"}};
    record_file(rec, out, "worst_case.csv", csv);
}

}  // namespace

// ---------------------------------------------------------------------------

std::string to_string(Task task) {
    switch (task) {
        case Task::image_linear: return "image_linear";
        case Task::image_rrf: return "image_rrf";
        case Task::gaussian_linear: return "gaussian_linear";
        case Task::equicorr_theory: return "equicorr_theory";
        case Task::worst_case: return "worst_case";
    }
    return "unknown";
}

Task task_from_string(const std::string& name) {
    for (Task t : {Task::image_linear, Task::image_rrf, Task::gaussian_linear, Task::equicorr_theory,
                   Task::worst_case})
        if (to_string(t) == name) return t;
    throw ConfigError("unknown task '" + name + "'");
}

ExperimentConfig ExperimentConfig::from_json(const json& j, Task task) {
    ExperimentConfig c;
    c.task = task;
    Section top(j, "config");
    if (top.has("task")) {
        std::string name;
        top.read("task", name);
        if (task_from_string(name) != task)
            throw ConfigError("config task '" + name + "' does not match subcommand '" + to_string(task) + "'");
    }
    top.read("seed", c.seed);
    top.read("threads", c.threads);
    top.skip("comment");

    if (const json* s = top.child("chain")) {
        Section sec(*s, "config.chain");
        sec.read("n_samples", c.chain.n_samples);
        sec.read("warmup", c.chain.warmup);
        sec.read("thinning", c.chain.thinning);
        sec.read("chains", c.chains);
        sec.finish();
    }
    if (const json* s = top.child("grid")) {
        Section sec(*s, "config.grid");
        sec.read("points", c.grid_points);
        sec.finish();
    }
    if (const json* s = top.child("dataset")) {
        Section sec(*s, "config.dataset");
        sec.read("source", c.dataset.source);
        sec.read("name", c.dataset.name);
        if (c.dataset.name == "fashion_mnist") {
            // shirt (6) vs trouser (1)
            c.dataset.class_pos = 6;
            c.dataset.class_neg = 1;
        }
        sec.read("dir", c.dataset.dir);
        sec.read("train_images", c.dataset.train_images);
        sec.read("train_labels", c.dataset.train_labels);
        sec.read("test_images", c.dataset.test_images);
        sec.read("test_labels", c.dataset.test_labels);
        sec.read("class_pos", c.dataset.class_pos);
        sec.read("class_neg", c.dataset.class_neg);
        sec.read("n", c.dataset.n);
        sec.read("m", c.dataset.m);
        sec.read("standardize", c.dataset.standardize);
        sec.finish();
    }
    if (const json* s = top.child("features")) {
        Section sec(*s, "config.features");
        sec.read("N", c.features.n_features);
        sec.read("alpha", c.features.alpha);
        sec.read("standardize", c.features.standardize);
        sec.finish();
    }
    if (const json* s = top.child("gaussian")) {
        Section sec(*s, "config.gaussian");
        sec.read("d", c.gaussian.d);
        sec.read("snr", c.gaussian.snr);
        sec.read("n", c.gaussian.n);
        sec.finish();
    }
    if (const json* s = top.child("equicorr")) {
        Section sec(*s, "config.equicorr");
        sec.read("n", c.equicorr.n);
        sec.read("rho", c.equicorr.rho);
        sec.read("draws", c.equicorr.draws);
        sec.finish();
    }
    if (const json* s = top.child("worst_case")) {
        Section sec(*s, "config.worst_case");
        sec.read("n", c.worst_case.n);
        sec.read("typical_samples", c.worst_case.typical_samples);
        sec.read("max_iterations", c.worst_case.max_iterations);
        sec.read("step_scale", c.worst_case.step_scale);
        sec.finish();
    }
    top.finish();
    c.validate();
    return c;
}

json ExperimentConfig::to_json() const {
    json j;
    j["task"] = to_string(task);
    j["seed"] = seed;
    j["threads"] = threads;
    j["chain"] = {{"n_samples", chain.n_samples}, {"warmup", chain.warmup},
                  {"thinning", chain.thinning}, {"chains", chains}};
    j["grid"] = {{"points", grid_points}};
    j["dataset"] = {{"source", dataset.source},       {"name", dataset.name},
                    {"dir", dataset.dir},             {"train_images", dataset.train_images},
                    {"train_labels", dataset.train_labels}, {"test_images", dataset.test_images},
                    {"test_labels", dataset.test_labels},   {"class_pos", dataset.class_pos},
                    {"class_neg", dataset.class_neg}, {"n", dataset.n},
                    {"m", dataset.m},                 {"standardize", dataset.standardize}};
    j["features"] = {{"N", features.n_features}, {"standardize", features.standardize}};
    if (features.alpha) j["features"]["alpha"] = *features.alpha;
    j["gaussian"] = {{"d", gaussian.d}, {"snr", gaussian.snr}, {"n", gaussian.n}};
    j["equicorr"] = {{"n", equicorr.n}, {"rho", equicorr.rho}, {"draws", equicorr.draws}};
    j["worst_case"] = {{"n", worst_case.n},
                       {"typical_samples", worst_case.typical_samples},
                       {"max_iterations", worst_case.max_iterations},
                       {"step_scale", worst_case.step_scale}};
    return j;
}

void ExperimentConfig::validate() const {
    chain.validate();
    if (chains == 0) throw ConfigError("chain.chains must be >= 1");
    if (threads == 0) throw ConfigError("threads must be >= 1");
    if (grid_points < 2) throw ConfigError("grid.points must be >= 2");
    if (dataset.source != "idx" && dataset.source != "gaussian")
        throw ConfigError("dataset.source must be 'idx' or 'gaussian'");
    if (dataset.standardize != "per_feature" && dataset.standardize != "none")
        throw ConfigError("dataset.standardize must be 'per_feature' or 'none'");
    if (dataset.class_pos == dataset.class_neg) throw ConfigError("dataset classes must differ");
    if (dataset.n < 1 || dataset.m < 1) throw ConfigError("dataset.n and dataset.m must be >= 1");
    if (features.n_features < 1) throw ConfigError("features.N must be >= 1");
    if (features.alpha && !(*features.alpha > 0.0 && *features.alpha < 1.0))
        throw ConfigError("features.alpha must lie in (0, 1)");
    if (gaussian.d < 1 || gaussian.n < 1 || !(gaussian.snr > 0.0))
        throw ConfigError("gaussian: need d >= 1, n >= 1, snr > 0");
    if (task == Task::gaussian_linear && gaussian.n >= gaussian.d)
        throw ConfigError("gaussian: n must be below d for interpolation");
    if (task == Task::image_rrf && !features.alpha && dataset.n >= features.n_features)
        throw ConfigError("image_rrf: n must be below N");
    if (equicorr.n.empty() || equicorr.rho.empty()) throw ConfigError("equicorr: n and rho lists must be non-empty");
    for (auto n : equicorr.n)
        if (n < 2) throw ConfigError("equicorr.n entries must be >= 2");
    for (double r : equicorr.rho)
        if (!(r > 0.0 && r < 1.0)) throw ConfigError("equicorr.rho entries must lie in (0, 1)");
    if (equicorr.draws == 0) throw ConfigError("equicorr.draws must be >= 1");
    if (worst_case.n.empty()) throw ConfigError("worst_case.n must be non-empty");
    for (auto n : worst_case.n)
        if (n < 1) throw ConfigError("worst_case.n entries must be >= 1");
    if (!(worst_case.step_scale > 0.0)) throw ConfigError("worst_case.step_scale must be > 0");
    if ((task == Task::image_linear || task == Task::image_rrf) && dataset.source == "gaussian")
        throw ConfigError("dataset.source 'gaussian' only applies to worst_case");
}

json RunRecord::to_json() const {
    json j;
    j["config"] = config;
    j["started_at"] = started_at;
    j["finished_at"] = finished_at;
    j["outputs"] = json::array();
    for (const auto& o : outputs) j["outputs"].push_back({{"file", o.name}, {"sha256", o.sha256}, {"bytes", o.bytes}});
    j["diagnostics"] = diagnostics;
    j["knobs"] = knobs;
    return j;
}

RunRecord run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
    config.validate();
    RunRecord rec;
    rec.config = config.to_json();
    rec.started_at = utc_now();
    rec.knobs = common_knobs(config);

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw DataError("cannot create output directory " + out_dir.string() + ": " + ec.message());

    switch (config.task) {
        case Task::image_linear:
        case Task::image_rrf: run_image(config, out_dir, rec); break;
        case Task::gaussian_linear: run_gaussian(config, out_dir, rec); break;
        case Task::equicorr_theory: run_equicorr(config, out_dir, rec); break;
        case Task::worst_case: run_worst_case(config, out_dir, rec); break;
    }

    rec.finished_at = utc_now();
    io::write_text_file(out_dir / "run.json", rec.to_json().dump(2) + "\n");
    return rec;
}

}  // namespace verspace
