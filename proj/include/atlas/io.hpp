// File output helpers shared by the CLI: full-precision CSV writing, SHA-256
// content hashes, and the run manifest. Data goes to files (or stdout);
// progress lines belong on stderr.

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace atlas::io {

/// Shortest decimal that round-trips a double (17 significant digits).
std::string format_double(double v);

/// One CSV row from mixed cell types already rendered as strings.
std::string csv_row(const std::vector<std::string>& cells);

/// SHA-256 of a byte string, lowercase hex.
std::string sha256_hex(const std::string& bytes);

/// Writes `content` to `path` (creating parent directories) and returns the
/// content hash.
std::string write_file(const std::filesystem::path& path, const std::string& content);

/// Accumulates artifact entries and emits the run manifest.
class ManifestWriter {
  public:
    explicit ManifestWriter(nlohmann::json config_snapshot);

    /// Writes the file and records (relative path, hash) in the manifest.
    void add_artifact(const std::filesystem::path& dir, const std::string& name,
                      const std::string& content);

    void set_suite_result(const std::string& suite, bool pass);

    /// Finalizes wall-clock and writes manifest.json into `dir`.
    void write(const std::filesystem::path& dir);

    const nlohmann::json& artifacts() const { return manifest_["artifacts"]; }

  private:
    nlohmann::json manifest_;
    std::chrono::steady_clock::time_point start_;
};

}  // namespace atlas::io
