#pragma once

#include "verspace/equicorr.hpp"
#include "verspace/estimator.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace verspace::io {

/// `epsilon,cdf` header, one row per grid point, fixed-point decimals, LF endings.
std::string format_cdf_csv(const ErrorCdf& cdf);

/// `sample_index,error`.
std::string format_errors_csv(std::span<const double> errors);

/// `n,rho,quadrature,asymptotic,ratio`, shortest round-trip decimals.
std::string format_theory_csv(std::span<const TheoryRow> rows);

/// Parses a file written by format_cdf_csv. Throws DataError naming the offending
/// line or column.
ErrorCdf parse_cdf_csv(const std::string& text);

void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

/// Lower-case hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

}  // namespace verspace::io
