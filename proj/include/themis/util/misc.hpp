#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace themis {

// Hex-encoded SHA-256 of the given bytes (OpenSSL-backed).
std::string sha256_hex(std::string_view data);

// Current UTC instant as RFC 3339 ("2026-08-10T12:34:56Z").
std::string now_rfc3339();

// Canonical rendering of a real number: 9 significant digits, no trailing
// noise. Used wherever floats enter persisted documents.
std::string canon_real(double v);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

// Minimal CSV writer; quotes fields containing separators or quotes.
class CsvWriter {
public:
    explicit CsvWriter(const std::filesystem::path& path);
    ~CsvWriter();
    void row(const std::vector<std::string>& fields);
    void flush_and_close();

private:
    std::string buf_;
    std::filesystem::path path_;
    bool closed_ = false;
};

} // namespace themis
