#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fockforge {

/// One CSV cell dialect everywhere: '.' decimal, scientific with 12 digits
/// after the point, LF line endings, header row.
std::string csv_number(double v);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> cells) { rows.push_back(std::move(cells)); }
    std::string to_string() const;
};

/// Write-to-temp, rename-on-success; no partial files are left behind.
void write_text_atomic(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

std::uint64_t fnv1a64(const std::string& data);
std::string hex64(std::uint64_t v);
std::string iso8601_utc_now();

/// Provenance attached to every CLI artifact as <path>.manifest.json.
struct RunManifest {
    std::string command;
    std::string config_hash;
    std::string version;
    std::string timestamp;
    int cutoff = 0;
    bool doubling_checked = false;
    double doubling_shift = 0.0;
    double wall_ms = 0.0;

    std::string to_json() const;
};

void write_manifest(const std::string& artifact_path, const RunManifest& manifest);

}  // namespace fockforge
