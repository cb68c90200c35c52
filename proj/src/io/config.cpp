#include "rxprobe/io/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rxprobe/link/channel.hpp"
#include "rxprobe/link/profiles.hpp"
#include "rxprobe/neural/presets.hpp"

namespace rxprobe::io {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw ConfigError(path + ": " + what); }

std::string join(const std::string& prefix, const std::string& key) { return prefix.empty() ? key : prefix + "." + key; }

std::string type_name(const json& j) {
  if (j.is_number_integer()) return "integer";
  if (j.is_number()) return "number";
  return j.type_name();
}

// `value` may replace `def` when the kinds agree; integers are accepted where
// floats are expected, not the other way round.
void check_type(const std::string& path, const json& def, const json& value) {
  const bool ok = (def.is_number_integer() && value.is_number_integer()) ||
                  (def.is_number_float() && value.is_number()) || (def.is_boolean() && value.is_boolean()) ||
                  (def.is_string() && value.is_string()) || (def.is_array() && value.is_array()) ||
                  (def.is_object() && value.is_object());
  if (!ok) fail(path, "expected " + type_name(def) + ", got " + type_name(value));
  if (def.is_array())
    for (std::size_t i = 0; i < value.size(); ++i)
      if (!value[i].is_number()) fail(path + "[" + std::to_string(i) + "]", "expected number, got " + type_name(value[i]));
}

void merge(json& base, const json& layer, const std::string& prefix) {
  if (!layer.is_object()) fail(prefix.empty() ? "<root>" : prefix, "expected object, got " + type_name(layer));
  for (auto it = layer.begin(); it != layer.end(); ++it) {
    const std::string path = join(prefix, it.key());
    if (!base.contains(it.key())) fail(path, "unknown key");
    json& target = base[it.key()];
    check_type(path, target, it.value());
    if (target.is_object())
      merge(target, it.value(), path);
    else
      target = it.value();
  }
}

json* find_path(json& tree, const std::string& path) {
  json* node = &tree;
  std::stringstream ss(path);
  std::string part;
  while (std::getline(ss, part, '.')) {
    if (!node->is_object() || !node->contains(part)) return nullptr;
    node = &(*node)[part];
  }
  return node;
}

std::vector<double> steps(double start, double step, double stop) {
  std::vector<double> v;
  for (int i = 0; start + i * step <= stop + 1e-9; ++i) v.push_back(start + i * step);
  return v;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

// Typed getters with range checks; `path` names the field in errors.
struct Reader {
  const json& root;

  const json& at(const std::string& path) const {
    const json* node = &root;
    std::stringstream ss(path);
    std::string part;
    while (std::getline(ss, part, '.')) node = &node->at(part);
    return *node;
  }
  double number(const std::string& path) const {
    const double v = at(path).get<double>();
    if (!std::isfinite(v)) fail(path, "must be finite");
    return v;
  }
  double positive(const std::string& path) const {
    const double v = number(path);
    if (!(v > 0.0)) fail(path, "must be positive, got " + std::to_string(v));
    return v;
  }
  std::size_t count(const std::string& path, std::int64_t min) const {
    const auto v = at(path).get<std::int64_t>();
    if (v < min) fail(path, "must be >= " + std::to_string(min) + ", got " + std::to_string(v));
    return static_cast<std::size_t>(v);
  }
  std::string string(const std::string& path) const { return at(path).get<std::string>(); }
  std::vector<double> numbers(const std::string& path) const { return at(path).get<std::vector<double>>(); }
};

search::Axis read_axis(const Reader& r, const std::string& path, double lo_limit, double hi_limit) {
  const double min = r.number(path + ".min"), max = r.number(path + ".max");
  if (!(min < max)) fail(path + ".max", "must be greater than min (" + std::to_string(max) + " <= " + std::to_string(min) + ")");
  if (min < lo_limit || max > hi_limit) {
    fail(path, "bounds must lie within [" + std::to_string(lo_limit) + ", " + std::to_string(hi_limit) + "]");
  }
  const auto lattice = r.numbers(path + ".lattice");
  if (lattice.empty()) fail(path + ".lattice", "must not be empty");
  for (double v : lattice)
    if (v < min || v > max) fail(path + ".lattice", "value " + std::to_string(v) + " outside [min, max]");
  return search::Axis{"", min, max, lattice};
}

baseline::GridAxis read_grid_axis(const Reader& r, const std::string& path, double lo_limit, double hi_limit) {
  baseline::GridAxis a{r.number(path + ".min"), r.number(path + ".max"), r.count(path + ".count", 1)};
  if (a.max < a.min) fail(path + ".max", "must not be below min");
  if (a.min < lo_limit || a.max > hi_limit) {
    fail(path, "bounds must lie within [" + std::to_string(lo_limit) + ", " + std::to_string(hi_limit) + "]");
  }
  return a;
}

RunConfig build(const json& tree) {
  const Reader r{tree};
  RunConfig c;
  c.preset = r.string("preset");
  c.seed = r.at("seed").get<std::uint64_t>();

  auto& s = c.signal;
  s.n_symbols = r.count("signal.n_symbols", 1);
  s.subcarrier_spacing_hz = r.positive("signal.subcarrier_spacing_hz");
  s.n_prb = r.count("signal.n_prb", 1);
  s.carrier_frequency_hz = r.positive("signal.carrier_frequency_hz");
  s.pilot_symbols.clear();
  for (double v : r.numbers("signal.pilot_symbols")) {
    if (v < 0 || v != std::floor(v)) fail("signal.pilot_symbols", "entries must be non-negative integers");
    s.pilot_symbols.push_back(static_cast<std::size_t>(v));
  }
  try {
    s.modulation = link::modulation_from_string(r.string("signal.modulation"));
  } catch (const std::exception& e) {
    fail("signal.modulation", e.what());
  }
  try {
    s.validate();
  } catch (const std::exception& e) {
    fail("signal", e.what());
  }

  c.profile = r.string("channel.profile");
  c.profiles_file = r.string("channel.profiles_file");
  const std::string dm = lower(r.string("receiver.demapper"));
  if (dm == "maxlog")
    c.demapper = rx::Demapper::MaxLog;
  else if (dm == "exact")
    c.demapper = rx::Demapper::Exact;
  else
    fail("receiver.demapper", "must be \"maxlog\" or \"exact\", got \"" + dm + "\"");
  c.model_path = r.string("model.path");

  c.train.n_steps = r.count("train.steps", 1);
  c.train.batch = r.count("train.batch", 1);
  c.train.lr = r.positive("train.lr");
  const std::string decay = lower(r.string("train.decay"));
  if (decay == "cosine")
    c.train.decay = neural::LrDecay::Cosine;
  else if (decay == "constant")
    c.train.decay = neural::LrDecay::Constant;
  else
    fail("train.decay", "must be \"cosine\" or \"constant\", got \"" + decay + "\"");
  c.train.seed = r.at("train.seed").get<std::uint64_t>();

  auto& q = c.search;
  q.n_episodes = r.count("search.episodes", 1);
  q.max_iters = r.count("search.max_iters", 1);
  q.batch = r.count("search.batch", 1);
  q.lr = r.positive("search.lr");
  q.patience = r.count("search.patience", 1);
  q.max_halvings = r.count("search.max_halvings", 0);
  q.improve_tol = r.number("search.improve_tol");
  if (q.improve_tol < 0) fail("search.improve_tol", "must be non-negative");
  q.threshold = r.positive("search.threshold");
  q.resample = r.at("search.resample").get<bool>();
  q.seed = c.seed;

  using L = link::ChannelLimits;
  c.space.axes[0] = read_axis(r, "search.space.speed", 0.0, L::kMaxSpeed);
  c.space.axes[0].name = "speed";
  c.space.axes[1] = read_axis(r, "search.space.delay_spread", 0.0, L::kMaxDelay);
  c.space.axes[1].name = "delay_spread";
  const auto snr = read_axis(r, "search.space.snr_db", -L::kMaxNoise, -L::kMinNoise);
  c.space.axes[2] = search::SearchSpace::noise_axis_from_snr(snr.min, snr.max, snr.lattice);

  c.grid.speed = read_grid_axis(r, "grid.speed", 0.0, L::kMaxSpeed);
  c.grid.delay_spread = read_grid_axis(r, "grid.delay_spread", 0.0, L::kMaxDelay);
  c.grid.snr_db = read_grid_axis(r, "grid.snr_db", -L::kMaxNoise, -L::kMinNoise);
  c.grid_batch = r.count("grid.batch", 1);
  c.grid_threshold = r.positive("grid.threshold");

  c.validation_realizations = r.count("validation.realizations", 1);
  c.validation_thresholds = r.numbers("validation.thresholds");
  if (c.validation_thresholds.empty()) fail("validation.thresholds", "must not be empty");
  for (double t : c.validation_thresholds)
    if (!(t > 0.0)) fail("validation.thresholds", "entries must be positive");

  resolve_profile(c);
  c.snapshot = tree;
  return c;
}

}  // namespace

json default_config_tree(const std::string& preset_name) {
  const neural::TrainPreset* preset = nullptr;
  try {
    preset = &neural::find_preset(preset_name);
  } catch (const std::exception& e) {
    fail("preset", e.what());
  }
  const link::SignalConfig sig;
  const auto space = search::SearchSpace::defaults();
  std::vector<double> delays = steps(10, 10, 380);
  delays.push_back(400);
  const baseline::GridSpec grid;
  const neural::TrainBudget budget;
  const search::SearchConfig sc;
  const auto grid_axis = [](const baseline::GridAxis& a) {
    return json{{"min", a.min}, {"max", a.max}, {"count", a.count}};
  };
  return {
      {"schema_version", kConfigSchemaVersion},
      {"preset", preset->name},
      {"seed", 1},
      {"signal",
       {{"n_symbols", sig.n_symbols},
        {"subcarrier_spacing_hz", sig.subcarrier_spacing_hz},
        {"n_prb", sig.n_prb},
        {"pilot_symbols", sig.pilot_symbols},
        {"modulation", link::to_string(preset->test_modulation())},
        {"carrier_frequency_hz", sig.carrier_frequency_hz}}},
      {"channel", {{"profile", preset->profiles.back()}, {"profiles_file", ""}}},
      {"receiver", {{"demapper", "maxlog"}}},
      {"model", {{"path", "models/" + lower(preset->name) + ".rxpm"}}},
      {"train",
       {{"steps", budget.n_steps}, {"batch", budget.batch}, {"lr", budget.lr}, {"decay", "cosine"}, {"seed", 1}}},
      {"search",
       {{"episodes", sc.n_episodes},
        {"max_iters", sc.max_iters},
        {"batch", sc.batch},
        {"lr", sc.lr},
        {"patience", sc.patience},
        {"max_halvings", sc.max_halvings},
        {"improve_tol", sc.improve_tol},
        {"threshold", sc.threshold},
        {"resample", sc.resample},
        {"space",
         {{"speed", {{"min", 0.0}, {"max", 30.0}, {"lattice", space.axes[0].lattice}}},
          {"delay_spread", {{"min", 10.0}, {"max", 400.0}, {"lattice", delays}}},
          {"snr_db", {{"min", 0.0}, {"max", 22.0}, {"lattice", {5.0, 10.0, 15.0, 20.0}}}}}}}},
      {"grid",
       {{"speed", grid_axis(grid.speed)},
        {"delay_spread", grid_axis(grid.delay_spread)},
        {"snr_db", grid_axis(grid.snr_db)},
        {"batch", 25},
        {"threshold", 1.0}}},
      {"validation", {{"realizations", 1500}, {"thresholds", {0.9, 1.0}}}},
  };
}

RunConfig resolve_config(const json& file_tree, const std::vector<std::pair<std::string, std::string>>& overrides) {
  if (!file_tree.is_object()) fail("<root>", "expected object, got " + type_name(file_tree));
  std::string preset = "PTLC";
  if (file_tree.contains("preset")) {
    if (!file_tree["preset"].is_string()) fail("preset", "expected string, got " + type_name(file_tree["preset"]));
    preset = file_tree["preset"].get<std::string>();
  }
  for (const auto& [path, value] : overrides)
    if (path == "preset") preset = value;
  json tree = default_config_tree(preset);
  merge(tree, file_tree, "");
  if (tree["schema_version"].get<std::int64_t>() != kConfigSchemaVersion) {
    fail("schema_version", "unsupported version " + tree["schema_version"].dump());
  }

  json applied = json::array();
  for (const auto& [path, text] : overrides) {
    json* node = find_path(tree, path);
    if (!node) fail(path, "unknown key");
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;
    if (node->is_number_float() && value.is_number()) value = value.get<double>();
    check_type(path, *node, value);
    if (node->is_object()) fail(path, "cannot override a whole section");
    *node = value;
    applied.push_back({{"path", path}, {"value", value}});
  }
  RunConfig c = build(tree);
  c.overrides = overrides;
  c.snapshot["overrides"] = applied;
  return c;
}

RunConfig load_config(const std::string& path, const std::vector<std::pair<std::string, std::string>>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  json tree = json::parse(in, nullptr, false);
  if (tree.is_discarded()) throw ConfigError(path + ": not valid JSON");
  return resolve_config(tree, overrides);
}

RunConfig config_from_snapshot(const json& snapshot) {
  json tree = snapshot;
  tree.erase("overrides");
  RunConfig c = resolve_config(tree);
  c.snapshot["overrides"] = snapshot.value("overrides", json::array());
  return c;
}

link::ChannelProfile resolve_profile(const RunConfig& c) {
  try {
    if (c.profiles_file.empty()) return link::default_profile(c.profile);
    const auto table = link::load_profiles(c.profiles_file);
    return link::find_profile(table, c.profile);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    fail("channel.profile", e.what());
  }
}

}  // namespace rxprobe::io
