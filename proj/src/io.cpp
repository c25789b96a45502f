#include "fockforge/io.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fockforge/errors.hpp"

namespace fockforge {

std::string csv_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12e", v);
    return buf;
}

std::string CsvTable::to_string() const {
    std::ostringstream out;
    for (size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << "\n";
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << "\n";
    }
    return out.str();
}

void write_text_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open " + tmp.string() + " for writing");
        out << content;
        if (!out) throw Error("short write to " + tmp.string());
    }
    fs::rename(tmp, target);
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string iso8601_utc_now() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string RunManifest::to_json() const {
    nlohmann::json j;
    j["command"] = command;
    j["config_hash"] = config_hash;
    j["version"] = version;
    j["timestamp"] = timestamp;
    j["cutoff"] = cutoff;
    j["doubling"] = {{"checked", doubling_checked}, {"shift", doubling_shift}};
    j["wall_ms"] = wall_ms;
    return j.dump(2);
}

void write_manifest(const std::string& artifact_path, const RunManifest& manifest) {
    write_text_atomic(artifact_path + ".manifest.json", manifest.to_json());
}

}  // namespace fockforge
