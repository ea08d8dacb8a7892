#pragma once

// File formats: the RISD binary container for D, CSV tables, and atomic
// (temp + rename) writes.
//
// RISD layout, all little-endian:
//   char[4] "RISD" | u16 version | u64 rows | u64 cols | f64 fs | f64 B | f64 T
//   rows * cols * (f64 re, f64 im), row-major (fast time outer).

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <thread>
#include <vector>

#include "risradar/echo_sim.hpp"

namespace risradar {

inline constexpr std::uint16_t kRisdVersion = 1;

namespace detail {
template <typename T>
void put_le(std::string& out, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    std::array<char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    out.append(bytes.data(), bytes.size());
}

template <typename T>
T get_le(std::string_view& in) {
    if (in.size() < sizeof(T)) throw std::runtime_error("RISD file truncated");
    std::array<char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), in.data(), sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    in.remove_prefix(sizeof(T));
    T value;
    std::memcpy(&value, bytes.data(), sizeof(T));
    return value;
}
}  // namespace detail

/// Shortest decimal that round-trips to the same double.
inline std::string format_double(double x) {
    std::array<char, 32> buf;
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), res.ptr);
}

/// Writes `content` to `path` via a sibling temp file and rename, so readers
/// never observe a partial file.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    static std::atomic<unsigned long> counter{0};
    fs::path tmp = path;
    tmp += ".tmp." + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id())) + "." + std::to_string(counter++);
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            out.close();
            std::error_code ec;
            fs::remove(tmp, ec);
            throw std::runtime_error("write failed for " + path.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw std::runtime_error("cannot move output into place: " + path.string());
    }
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string encode_risd(const DataMatrix& dm) {
    std::string out;
    const auto rows = static_cast<std::uint64_t>(dm.rows()), cols = static_cast<std::uint64_t>(dm.cols());
    out.reserve(4 + 2 + 16 + 24 + rows * cols * 16);
    out.append("RISD", 4);
    detail::put_le<std::uint16_t>(out, kRisdVersion);
    detail::put_le<std::uint64_t>(out, rows);
    detail::put_le<std::uint64_t>(out, cols);
    detail::put_le<double>(out, dm.fs);
    detail::put_le<double>(out, dm.bandwidth);
    detail::put_le<double>(out, dm.pri);
    for (Eigen::Index h = 0; h < dm.rows(); ++h) {
        for (Eigen::Index l = 0; l < dm.cols(); ++l) {
            detail::put_le<double>(out, dm.d(h, l).real());
            detail::put_le<double>(out, dm.d(h, l).imag());
        }
    }
    return out;
}

/// Decoded RISD payload; range metadata (r1, r2^b) is not part of the format.
struct RisdFile {
    std::uint16_t version = 0;
    double fs = 0.0;
    double bandwidth = 0.0;
    double pri = 0.0;
    Eigen::MatrixXcd d;
};

inline RisdFile decode_risd(std::string_view in) {
    if (in.size() < 4 || in.substr(0, 4) != "RISD") throw std::runtime_error("not a RISD file");
    in.remove_prefix(4);
    RisdFile f;
    f.version = detail::get_le<std::uint16_t>(in);
    if (f.version != kRisdVersion) throw std::runtime_error("unsupported RISD version " + std::to_string(f.version));
    const auto rows = detail::get_le<std::uint64_t>(in);
    const auto cols = detail::get_le<std::uint64_t>(in);
    f.fs = detail::get_le<double>(in);
    f.bandwidth = detail::get_le<double>(in);
    f.pri = detail::get_le<double>(in);
    if (in.size() != rows * cols * 16) throw std::runtime_error("RISD payload size mismatch");
    f.d.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index h = 0; h < f.d.rows(); ++h) {
        for (Eigen::Index l = 0; l < f.d.cols(); ++l) {
            const double re = detail::get_le<double>(in);
            const double im = detail::get_le<double>(in);
            f.d(h, l) = {re, im};
        }
    }
    return f;
}

inline void write_risd(const std::filesystem::path& path, const DataMatrix& dm) {
    write_file_atomic(path, encode_risd(dm));
}

inline RisdFile read_risd(const std::filesystem::path& path) { return decode_risd(read_file(path)); }

/// 64-bit FNV-1a; stable across platforms, used for provenance hashes.
inline std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    std::array<char, 17> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + 16, v, 16);
    std::string s(buf.data(), res.ptr);
    return std::string(16 - s.size(), '0') + s;
}

/// CSV table: `#`-prefixed provenance lines, a header row of "name [unit]"
/// columns, then rows in shortest round-trip decimal.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    void add_comment(std::string line) { comments_.push_back(std::move(line)); }
    void add_comment_front(std::string line) { comments_.insert(comments_.begin(), std::move(line)); }

    void add_row(const std::vector<double>& values) {
        if (values.size() != columns_.size()) throw std::invalid_argument("CSV row width mismatch");
        rows_.push_back(values);
    }

    std::size_t size() const { return rows_.size(); }
    const std::vector<std::vector<double>>& rows() const { return rows_; }

    std::string str() const {
        std::string out;
        for (const auto& c : comments_) out += "# " + c + "\n";
        for (std::size_t i = 0; i < columns_.size(); ++i) out += (i ? "," : "") + columns_[i];
        out += "\n";
        for (const auto& r : rows_) {
            for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + format_double(r[i]);
            out += "\n";
        }
        return out;
    }

    void write(const std::filesystem::path& path) const { write_file_atomic(path, str()); }

private:
    std::vector<std::string> columns_;
    std::vector<std::string> comments_;
    std::vector<std::vector<double>> rows_;
};

}  // namespace risradar
