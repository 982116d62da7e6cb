#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "colreact/geometry.hpp"

namespace colreact {

struct RunReport;
class VoxelMap;

/// Builds a single-line JSON object with fixed-decimal numbers.
class RecordBuilder {
 public:
  explicit RecordBuilder(const std::string& type, double t);

  RecordBuilder& add(const std::string& key, double v);
  RecordBuilder& add(const std::string& key, int v);
  RecordBuilder& add(const std::string& key, std::size_t v);
  RecordBuilder& add(const std::string& key, bool v);
  RecordBuilder& add(const std::string& key, const std::string& v);
  RecordBuilder& add(const std::string& key, const char* v) { return add(key, std::string(v)); }
  RecordBuilder& add(const std::string& key, const Vec3& v);
  RecordBuilder& add(const std::string& key, const std::vector<double>& v);
  RecordBuilder& add(const std::string& key, const std::vector<Vec3>& v, int decimals = 4);

  std::string str() const { return body_ + "}"; }

 private:
  void key(const std::string& k);
  std::string body_;
};

std::string fixed(double v, int decimals = 6);
std::string json_escape(const std::string& s);

struct RunArtifacts {
  std::filesystem::path trajectory;
  std::filesystem::path events;
  std::filesystem::path map;
  std::filesystem::path report;
};

RunArtifacts artifact_paths(const std::filesystem::path& dir);

/// Writes through a sibling temporary file and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& content);

std::string trajectory_csv(const RunReport& r);
std::string events_jsonl(const RunReport& r);
std::string map_csv(const VoxelMap& map);
std::string report_json(const RunReport& r);

/// Writes all four artifacts into `dir` (created if needed).
RunArtifacts write_artifacts(const RunReport& r, const std::filesystem::path& dir);

}  // namespace colreact
