#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace detflow::io {

// 17 significant digits, enough to round-trip any double.
std::string format_real(double v);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    std::string to_csv() const;
};

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& p);

// Write through a temporary file in the same directory, then rename.
void write_atomic(const std::filesystem::path& p, const std::string& contents);

std::string read_file(const std::filesystem::path& p);

} // namespace detflow::io
