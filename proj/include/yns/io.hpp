#pragma once

// On-disk formats: CSV series, JSON documents, and field snapshots (a JSON
// header next to a raw little-endian float64 payload).

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "yns/fields.hpp"

namespace yns {

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);  // FormatError if unreadable

// Shortest decimal that round-trips, '.' separator regardless of locale.
std::string format_double(double x);

class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);
    void row(const std::vector<std::string>& cells);  // FormatError on column mismatch
    void row(const std::vector<double>& values);
    std::string str() const { return text_; }
    std::size_t rows() const { return rows_; }

private:
    std::size_t columns_;
    std::size_t rows_ = 0;
    std::string text_;
};

void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);  // FormatError
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

struct Snapshot {
    FieldState state;
    double t = 0;
};

// Writes <stem>.json and <stem>.bin; returns the header path.
std::filesystem::path write_snapshot(const std::filesystem::path& dir, const std::string& stem,
                                     const FieldState& state, double t);
Snapshot read_snapshot(const std::filesystem::path& header);  // FormatError

}  // namespace yns
