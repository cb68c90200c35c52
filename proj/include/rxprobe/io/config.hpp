#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rxprobe/baseline/grid.hpp"
#include "rxprobe/io/json_util.hpp"
#include "rxprobe/link/signal.hpp"
#include "rxprobe/neural/train.hpp"
#include "rxprobe/rx/classic.hpp"
#include "rxprobe/search/episode.hpp"
#include "rxprobe/search/space.hpp"

namespace rxprobe::io {

constexpr int kConfigSchemaVersion = 1;

// Invalid or unreadable configuration. The message starts with the
// dotted path of the offending field when there is one.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Validated run configuration. Sections: signal, channel, model, train,
// search (with search.space), grid, validation.
struct RunConfig {
  std::string preset = "PTLC";
  std::uint64_t seed = 1;
  link::SignalConfig signal;
  std::string profile;        // channel profile name
  std::string profiles_file;  // optional JSON table; built-ins when empty
  rx::Demapper demapper = rx::Demapper::MaxLog;
  std::string model_path;
  neural::TrainBudget train;
  search::SearchConfig search;
  search::SearchSpace space;
  baseline::GridSpec grid;
  std::size_t grid_batch = 25;
  double grid_threshold = 1.0;
  std::size_t validation_realizations = 1500;
  std::vector<double> validation_thresholds{0.9, 1.0};

  json snapshot;  // fully resolved tree, overrides applied
  std::vector<std::pair<std::string, std::string>> overrides;
};

// Complete default tree for a preset.
json default_config_tree(const std::string& preset);

// Layers `file_tree` over the preset defaults, then each "dotted.path=value"
// override (value parsed as JSON, else taken as a string). Unknown keys and
// type mismatches are rejected with the dotted path.
RunConfig resolve_config(const json& file_tree, const std::vector<std::pair<std::string, std::string>>& overrides = {});
RunConfig load_config(const std::string& path, const std::vector<std::pair<std::string, std::string>>& overrides = {});
// Rebuilds a config from a stored snapshot (used for replay).
RunConfig config_from_snapshot(const json& snapshot);

// Profile named by the config, from the configured table.
link::ChannelProfile resolve_profile(const RunConfig& config);

}  // namespace rxprobe::io
