#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "srlab/cli/config.hpp"
#include "srlab/core/io.hpp"

namespace srlab::cli {

using json = nlohmann::ordered_json;

/// Collects the files of one run; every report goes through write() so the
/// manifest can list it with its size and content hash.
class RunManifest {
public:
  RunManifest(std::string command, const ExperimentConfig& config, std::filesystem::path out_dir)
      : command_(std::move(command)), config_(config), out_(std::move(out_dir)),
        start_(std::chrono::steady_clock::now()) {}

  const std::filesystem::path& out_dir() const noexcept { return out_; }
  std::string config_hash() const { return config_.hash(); }

  /// Header every report carries.
  json stamp() const {
    return json{{"format_version", report_format_version}, {"config_hash", config_hash()}, {"command", command_}};
  }

  void write(const std::string& name, const std::string& content) {
    write_atomic(out_ / name, content);
    files_.push_back({name, content.size(), hex64(fnv1a(content))});
  }
  void write_json(const std::string& name, json body) {
    json doc = stamp();
    for (auto& [k, v] : body.items()) doc[k] = v;
    write(name, doc.dump(2) + "\n");
  }
  /// CSV with a leading comment line carrying the stamp.
  void write_csv(const std::string& name, const std::string& rows) {
    write(name, "# srlab format=" + std::to_string(report_format_version) + " config_hash=" + config_hash() + "\n" + rows);
  }
  void note_external(const std::filesystem::path& p, const std::string& role) { external_.push_back({p.string(), role}); }

  /// manifest.json: the only file with timing, so the others stay reproducible.
  void finish(int exit_code) {
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    json files = json::array();
    for (const auto& f : files_) files.push_back({{"name", f.name}, {"bytes", f.bytes}, {"fnv1a", f.hash}});
    json ext = json::array();
    for (const auto& e : external_) ext.push_back({{"path", e.first}, {"role", e.second}});
    json doc = stamp();
    doc["versions"] = {{"srlab", "0.1.0"}, {"report_format", report_format_version}};
    doc["config"] = config_.serialize();
    doc["exit_code"] = exit_code;
    doc["seconds"] = seconds;
    doc["files"] = files;
    doc["external"] = ext;
    write_atomic(out_ / "manifest.json", doc.dump(2) + "\n");
  }

private:
  struct FileEntry {
    std::string name;
    std::size_t bytes;
    std::string hash;
  };
  std::string command_;
  ExperimentConfig config_;
  std::filesystem::path out_;
  std::chrono::steady_clock::time_point start_;
  std::vector<FileEntry> files_;
  std::vector<std::pair<std::string, std::string>> external_;
};

}  // namespace srlab::cli
