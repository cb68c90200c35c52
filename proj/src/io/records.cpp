#include "rxprobe/io/records.hpp"

#include <filesystem>
#include <utility>

#include <unistd.h>

#include "rxprobe/io/atomic_file.hpp"
#include "rxprobe/simd/conv_kernels.hpp"

#ifndef RXPROBE_VERSION
#define RXPROBE_VERSION "unknown"
#endif

namespace rxprobe::io {

namespace fs = std::filesystem;

std::string to_string(CampaignKind k) {
  switch (k) {
    case CampaignKind::Search: return "search";
    case CampaignKind::Grid: return "grid";
    case CampaignKind::Validate: return "validate";
    case CampaignKind::Train: return "train";
  }
  return "?";
}

CampaignKind campaign_kind_from_string(const std::string& s) {
  for (auto k : {CampaignKind::Search, CampaignKind::Grid, CampaignKind::Validate, CampaignKind::Train})
    if (to_string(k) == s) return k;
  throw RecordError("unknown campaign kind '" + s + "'");
}

json environment_fingerprint(std::uint64_t seed) {
  return {{"seed", seed},
          {"precision", "float64"},
          {"code_version", RXPROBE_VERSION},
          {"simd", std::string(simd::active_kernels().name)}};
}

RecordWriter::RecordWriter(std::string path, CampaignKind kind, const json& config_snapshot, const json& meta)
    : path_(std::move(path)) {
  const fs::path target(path_);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  tmp_ = path_ + ".tmp." + std::to_string(::getpid());
  file_ = std::fopen(tmp_.c_str(), "wb");
  if (!file_) throw std::runtime_error("cannot open '" + tmp_ + "' for writing");
  const std::uint64_t seed = config_snapshot.is_object() ? config_snapshot.value("seed", std::uint64_t{0}) : 0;
  write_line({{"type", "header"},
              {"schema_version", kRecordSchemaVersion},
              {"kind", to_string(kind)},
              {"config", config_snapshot},
              {"environment", environment_fingerprint(seed)},
              {"meta", meta}});
}

RecordWriter::~RecordWriter() {
  if (!file_) return;
  std::fclose(file_);
  std::error_code ec;
  fs::remove(tmp_, ec);
}

void RecordWriter::write_line(const json& j) {
  if (!file_) throw std::logic_error("record writer already finished");
  const std::string line = dump_line(j) + "\n";
  if (std::fwrite(line.data(), 1, line.size(), file_) != line.size()) {
    throw std::runtime_error("failed writing '" + tmp_ + "'");
  }
  hash_.update(line);
}

void RecordWriter::append(const json& record) {
  write_line(record);
  ++count_;
  std::fflush(file_);
}

void RecordWriter::finish(const json& summary) {
  json s = summary;
  s["type"] = "summary";
  write_line(s);
  const std::string footer =
      dump_line({{"type", "footer"}, {"records", count_}, {"checksum", hash_.hex()}}) + "\n";
  const bool ok = std::fwrite(footer.data(), 1, footer.size(), file_) == footer.size() && std::fflush(file_) == 0 &&
                  ::fsync(::fileno(file_)) == 0;
  const bool closed = std::fclose(file_) == 0;
  file_ = nullptr;
  std::error_code ec;
  if (!ok || !closed) {
    fs::remove(tmp_, ec);
    throw std::runtime_error("failed writing '" + tmp_ + "'");
  }
  fs::rename(tmp_, path_, ec);
  if (ec) {
    fs::remove(tmp_, ec);
    throw std::runtime_error("cannot rename temp file onto '" + path_ + "'");
  }
}

CampaignFile parse_campaign(const std::string& text) {
  std::vector<std::pair<std::size_t, std::size_t>> lines;  // [begin, end) without the newline
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) throw RecordError("truncated record file (no trailing newline)");
    lines.emplace_back(pos, nl);
    pos = nl + 1;
  }
  if (lines.size() < 3) throw RecordError("record file too short");

  const auto parse_line = [&](std::size_t i) {
    const auto [b, e] = lines[i];
    json j = json::parse(text.begin() + b, text.begin() + e, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("type")) {
      throw RecordError("line " + std::to_string(i + 1) + ": not a record object");
    }
    return j;
  };

  const json footer = parse_line(lines.size() - 1);
  if (footer["type"] != "footer") throw RecordError("missing footer (file truncated?)");
  Fnv1a64 h;
  h.update(std::string_view(text).substr(0, lines.back().first));
  if (footer.value("checksum", std::string()) != h.hex()) throw RecordError("checksum mismatch");

  CampaignFile f;
  f.header = parse_line(0);
  if (f.header["type"] != "header") throw RecordError("first line is not a header");
  if (f.header.value("schema_version", 0) != kRecordSchemaVersion) {
    throw RecordError("unsupported record schema version " + f.header.value("schema_version", json()).dump());
  }
  f.kind = campaign_kind_from_string(f.header.value("kind", std::string()));
  for (std::size_t i = 1; i + 2 < lines.size(); ++i) {
    json r = parse_line(i);
    if (r["type"] == "header" || r["type"] == "summary" || r["type"] == "footer") {
      throw RecordError("line " + std::to_string(i + 1) + ": unexpected " + r["type"].get<std::string>());
    }
    f.records.push_back(std::move(r));
  }
  f.summary = parse_line(lines.size() - 2);
  if (f.summary["type"] != "summary") throw RecordError("missing summary line");
  if (footer.value("records", std::size_t{0}) != f.records.size()) throw RecordError("record count mismatch");
  return f;
}

CampaignFile read_campaign(const std::string& path) {
  try {
    return parse_campaign(read_file(path));
  } catch (const RecordError& e) {
    throw RecordError(path + ": " + e.what());
  }
}

json to_json(const search::EpisodeRecord& r) {
  json trace = json::array();
  for (const auto& it : r.trace) {
    trace.push_back({{"iteration", it.iteration},
                     {"x_hat", {number(it.x_hat[0]), number(it.x_hat[1]), number(it.x_hat[2])}},
                     {"params", to_json(it.params)},
                     {"hard_ber_t", number(it.hard_ber_t)},
                     {"hard_ber_ai", number(it.hard_ber_ai)},
                     {"soft_ber_t", number(it.soft_ber_t)},
                     {"soft_ber_ai", number(it.soft_ber_ai)},
                     {"loss", number(it.loss)},
                     {"lr", it.lr}});
  }
  return {{"type", "episode"},
          {"episode", r.episode},
          {"seed", r.seed},
          {"start", to_json(r.start)},
          {"outcome", search::to_string(r.outcome)},
          {"stop", search::to_string(r.stop)},
          {"diagnostic", r.diagnostic},
          {"trace", trace}};
}

search::EpisodeRecord episode_from_json(const json& j) {
  try {
    search::EpisodeRecord r;
    r.episode = j.at("episode").get<std::size_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.start = scenario_from_json(j.at("start"));
    r.outcome = search::outcome_from_string(j.at("outcome").get<std::string>());
    r.stop = search::stop_reason_from_string(j.at("stop").get<std::string>());
    r.diagnostic = j.at("diagnostic").get<std::string>();
    for (const auto& t : j.at("trace")) {
      search::IterationRecord it;
      it.iteration = t.at("iteration").get<std::size_t>();
      for (std::size_t a = 0; a < search::kAxes; ++a) it.x_hat[a] = to_double(t.at("x_hat").at(a));
      it.params = scenario_from_json(t.at("params"));
      it.hard_ber_t = to_double(t.at("hard_ber_t"));
      it.hard_ber_ai = to_double(t.at("hard_ber_ai"));
      it.soft_ber_t = to_double(t.at("soft_ber_t"));
      it.soft_ber_ai = to_double(t.at("soft_ber_ai"));
      it.loss = to_double(t.at("loss"));
      it.lr = t.at("lr").get<double>();
      r.trace.push_back(it);
    }
    if (r.trace.empty()) throw RecordError("episode record with empty trace");
    return r;
  } catch (const json::exception& e) {
    throw RecordError(std::string("bad episode record: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw RecordError(std::string("bad episode record: ") + e.what());
  }
}

json to_json(const baseline::GridRecord& r) {
  return {{"type", "grid"},
          {"id", r.id},
          {"params", to_json(r.params)},
          {"hard_ber_t", number(r.hard_ber_t)},
          {"hard_ber_ai", number(r.hard_ber_ai)},
          {"failure", r.failure}};
}

baseline::GridRecord grid_record_from_json(const json& j) {
  try {
    return {j.at("id").get<std::size_t>(), scenario_from_json(j.at("params")), to_double(j.at("hard_ber_t")),
            to_double(j.at("hard_ber_ai")), j.at("failure").get<bool>()};
  } catch (const json::exception& e) {
    throw RecordError(std::string("bad grid record: ") + e.what());
  }
}

json to_json(const baseline::ValidationRecord& r) {
  return {{"type", "validation"},
          {"id", r.id},
          {"params", to_json(r.params)},
          {"label", search::to_string(r.label)},
          {"hard_ber_t", number(r.hard_ber_t)},
          {"hard_ber_ai", number(r.hard_ber_ai)},
          {"n_bits", r.n_bits}};
}

baseline::ValidationRecord validation_record_from_json(const json& j) {
  try {
    baseline::ValidationRecord r;
    r.id = j.at("id").get<std::size_t>();
    r.params = scenario_from_json(j.at("params"));
    r.label = search::outcome_from_string(j.at("label").get<std::string>());
    r.hard_ber_t = to_double(j.at("hard_ber_t"));
    r.hard_ber_ai = to_double(j.at("hard_ber_ai"));
    r.n_bits = j.at("n_bits").get<std::size_t>();
    return r;
  } catch (const json::exception& e) {
    throw RecordError(std::string("bad validation record: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw RecordError(std::string("bad validation record: ") + e.what());
  }
}

namespace {

void expect_kind(const CampaignFile& f, CampaignKind k) {
  if (f.kind != k) throw RecordError("expected a " + to_string(k) + " campaign, got " + to_string(f.kind));
}

}  // namespace

std::vector<search::EpisodeRecord> episodes(const CampaignFile& f) {
  expect_kind(f, CampaignKind::Search);
  std::vector<search::EpisodeRecord> out;
  for (const auto& r : f.records) out.push_back(episode_from_json(r));
  return out;
}

std::vector<baseline::GridRecord> grid_records(const CampaignFile& f) {
  expect_kind(f, CampaignKind::Grid);
  std::vector<baseline::GridRecord> out;
  for (const auto& r : f.records) out.push_back(grid_record_from_json(r));
  return out;
}

std::vector<baseline::ValidationRecord> validation_records(const CampaignFile& f) {
  expect_kind(f, CampaignKind::Validate);
  std::vector<baseline::ValidationRecord> out;
  for (const auto& r : f.records) out.push_back(validation_record_from_json(r));
  return out;
}

}  // namespace rxprobe::io
