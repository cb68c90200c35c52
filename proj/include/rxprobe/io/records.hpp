#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "rxprobe/baseline/grid.hpp"
#include "rxprobe/baseline/validate.hpp"
#include "rxprobe/io/json_util.hpp"
#include "rxprobe/search/episode.hpp"

namespace rxprobe::io {

constexpr int kRecordSchemaVersion = 1;

enum class CampaignKind { Search, Grid, Validate, Train };
std::string to_string(CampaignKind k);
CampaignKind campaign_kind_from_string(const std::string& s);

// Malformed, truncated or tampered record file.
class RecordError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Seed, precision, code version and active SIMD kernels.
json environment_fingerprint(std::uint64_t seed);

// Line-delimited campaign file:
//   {"type":"header", "schema_version", "kind", "config", "environment", "meta"}
//   one {"type":"episode"|"grid"|"validation"|"train_step", ...} per record
//   {"type":"summary", ...}
//   {"type":"footer", "records": n, "checksum": fnv1a64 of every preceding byte}
// Lines go to a temp file that is renamed onto `path` by finish(); a writer
// destroyed before finish() removes it.
class RecordWriter {
 public:
  RecordWriter(std::string path, CampaignKind kind, const json& config_snapshot, const json& meta = json::object());
  ~RecordWriter();
  RecordWriter(const RecordWriter&) = delete;
  RecordWriter& operator=(const RecordWriter&) = delete;

  void append(const json& record);
  void finish(const json& summary);
  std::size_t count() const { return count_; }

 private:
  void write_line(const json& j);

  std::string path_, tmp_;
  std::FILE* file_ = nullptr;
  Fnv1a64 hash_;
  std::size_t count_ = 0;
};

struct CampaignFile {
  CampaignKind kind = CampaignKind::Search;
  json header;
  std::vector<json> records;
  json summary;

  const json& config() const { return header.at("config"); }
  const json& meta() const { return header.at("meta"); }
};

// Parses and verifies count and checksum.
CampaignFile read_campaign(const std::string& path);
CampaignFile parse_campaign(const std::string& text);

json to_json(const search::EpisodeRecord& r);
search::EpisodeRecord episode_from_json(const json& j);
json to_json(const baseline::GridRecord& r);
baseline::GridRecord grid_record_from_json(const json& j);
json to_json(const baseline::ValidationRecord& r);
baseline::ValidationRecord validation_record_from_json(const json& j);

std::vector<search::EpisodeRecord> episodes(const CampaignFile& f);
std::vector<baseline::GridRecord> grid_records(const CampaignFile& f);
std::vector<baseline::ValidationRecord> validation_records(const CampaignFile& f);

}  // namespace rxprobe::io
