#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace verspace {

using Vector = Eigen::VectorXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Random source used throughout. Every stochastic routine takes one by reference,
/// so a run is reproducible from its seed.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer over (seed, stream): independent child seeds for chains,
/// feature draws, data subsampling, etc.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Base of all library errors. The kind maps one-to-one onto CLI exit codes.
class Error : public std::runtime_error {
public:
    enum class Kind { config = 2, data = 3, infeasible = 4, numerical = 5 };

    Error(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }
    int exit_code() const noexcept { return static_cast<int>(kind_); }

private:
    Kind kind_;
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error(Kind::config, what) {}
};

struct DataError : Error {
    explicit DataError(const std::string& what) : Error(Kind::data, what) {}
};

struct InfeasibleError : Error {
    explicit InfeasibleError(const std::string& what) : Error(Kind::infeasible, what) {}
};

struct NumericalError : Error {
    explicit NumericalError(const std::string& what) : Error(Kind::numerical, what) {}
};

}  // namespace verspace
