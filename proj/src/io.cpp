#include "verspace/io.hpp"

#include <fmt/format.h>
#include <openssl/evp.h>

#include <fstream>
#include <sstream>

namespace verspace::io {

std::string format_cdf_csv(const ErrorCdf& cdf) {
    std::string out = "epsilon,cdf\n";
    for (std::size_t k = 0; k < cdf.grid.size(); ++k)
        out += fmt::format("{:.12f},{:.12f}\n", cdf.grid[k], cdf.cdf[k]);
    return out;
}

std::string format_errors_csv(std::span<const double> errors) {
    std::string out = "sample_index,error\n";
    for (std::size_t i = 0; i < errors.size(); ++i) out += fmt::format("{},{:.12f}\n", i, errors[i]);
    return out;
}

std::string format_theory_csv(std::span<const TheoryRow> rows) {
    std::string out = "n,rho,quadrature,asymptotic,ratio\n";
    for (const auto& r : rows)
        out += fmt::format("{},{},{},{},{}\n", r.n, r.rho, r.quadrature, r.asymptotic, r.ratio);
    return out;
}

ErrorCdf parse_cdf_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "epsilon,cdf")
        throw DataError("cdf csv: expected header 'epsilon,cdf', found '" + line + "'");
    ErrorCdf out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
            throw DataError("cdf csv: line " + std::to_string(lineno) + " must have 2 columns");
        try {
            out.grid.push_back(std::stod(line.substr(0, comma)));
        } catch (const std::exception&) {
            throw DataError("cdf csv: bad 'epsilon' value on line " + std::to_string(lineno));
        }
        try {
            out.cdf.push_back(std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw DataError("cdf csv: bad 'cdf' value on line " + std::to_string(lineno));
        }
    }
    return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw DataError("write failed for " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    std::string hex;
    for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
    return hex;
}

}  // namespace verspace::io
