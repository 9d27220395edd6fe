#include "yns/io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "yns/error.hpp"

namespace yns {

namespace fs = std::filesystem;

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw FormatError("SHA-256 digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xF]);
    }
    return out;
}

std::string sha256_file(const fs::path& path) { return sha256_hex(read_text(path)); }

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
    for (std::size_t i = 0; i < header.size(); ++i) text_ += (i ? "," : "") + header[i];
    text_ += '\n';
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_)
        throw FormatError("CSV row has " + std::to_string(cells.size()) + " cells, header has " +
                          std::to_string(columns_));
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) text_ += ',';
        text_ += cells[i];
    }
    text_ += '\n';
    ++rows_;
}

void CsvWriter::row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(format_double(v));
    row(cells);
}

void write_text(const fs::path& path, std::string_view text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw FormatError("cannot write " + path.string());
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_json(const fs::path& path, const nlohmann::json& doc) {
    write_text(path, doc.dump(2) + "\n");
}

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

void append_le(std::string& buf, double v) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    char raw[8];
    std::memcpy(raw, &bits, 8);
    buf.append(raw, 8);
}

double read_le(const char* p) {
    std::uint64_t bits;
    std::memcpy(&bits, p, 8);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    return std::bit_cast<double>(bits);
}

}  // namespace

fs::path write_snapshot(const fs::path& dir, const std::string& stem, const FieldState& state,
                        double t) {
    std::string payload;
    payload.reserve((1 + state.u.size()) * state.rho.size() * 8);
    for (double v : state.rho) append_le(payload, v);
    for (const auto& c : state.u)
        for (double v : c) append_le(payload, v);

    nlohmann::json fields = nlohmann::json::array({"rho"});
    for (std::size_t a = 0; a < state.u.size(); ++a) fields.push_back("u" + std::to_string(a));
    const nlohmann::json header = {
        {"format", "yns-snapshot-1"},
        {"dim", state.grid.dim},
        {"n", state.grid.n},
        {"length", state.grid.length},
        {"t", t},
        {"fields", fields},
        {"dtype", "float64"},
        {"endianness", "little"},
        {"layout", "row-major, last axis fastest"},
        {"payload", stem + ".bin"},
        {"payload_sha256", sha256_hex(payload)},
    };
    write_text(dir / (stem + ".bin"), payload);
    const fs::path header_path = dir / (stem + ".json");
    write_json(header_path, header);
    return header_path;
}

Snapshot read_snapshot(const fs::path& header_path) {
    nlohmann::json h;
    try {
        h = nlohmann::json::parse(read_text(header_path));
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("snapshot header " + header_path.string() + ": " + e.what());
    }
    if (h.value("format", "") != "yns-snapshot-1" || h.value("dtype", "") != "float64" ||
        h.value("endianness", "") != "little")
        throw FormatError("unsupported snapshot header " + header_path.string());
    Snapshot s;
    s.state.grid = GridSpec{h.at("dim").get<int>(), h.at("n").get<int>(), h.at("length").get<double>()};
    s.state.grid.validate();
    s.t = h.at("t").get<double>();
    const std::string payload = read_text(header_path.parent_path() / h.at("payload").get<std::string>());
    if (sha256_hex(payload) != h.value("payload_sha256", ""))
        throw FormatError("snapshot payload hash mismatch for " + header_path.string());
    const std::size_t n = s.state.grid.total();
    const std::size_t nfields = h.at("fields").size();
    if (nfields != 1 + static_cast<std::size_t>(s.state.grid.dim) || payload.size() != nfields * n * 8)
        throw FormatError("snapshot payload size does not match its header");
    auto field = [&](std::size_t f) {
        RealField out(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = read_le(payload.data() + 8 * (f * n + i));
        return out;
    };
    s.state.rho = field(0);
    for (std::size_t a = 1; a < nfields; ++a) s.state.u.push_back(field(a));
    return s;
}

}  // namespace yns
