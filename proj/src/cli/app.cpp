#include "rxprobe/cli/app.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <optional>

#include <CLI11.hpp>

#include "rxprobe/baseline/cost_model.hpp"
#include "rxprobe/baseline/metrics.hpp"
#include "rxprobe/io/atomic_file.hpp"
#include "rxprobe/io/config.hpp"
#include "rxprobe/io/export.hpp"
#include "rxprobe/io/records.hpp"
#include "rxprobe/io/report.hpp"
#include "rxprobe/neural/model_io.hpp"
#include "rxprobe/search/campaign.hpp"

namespace rxprobe::cli {

namespace {

namespace fs = std::filesystem;
using io::json;
using Overrides = std::vector<std::pair<std::string, std::string>>;

struct Options {
  std::string config_path, preset, model, out, replay, input, export_dir;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<double> threshold;
  std::optional<std::size_t> episodes, max_iters, batch, steps, realizations;
  std::optional<double> speed_min, speed_max, delay_min, delay_max, snr_min, snr_max;
};

std::string text(double v) { return io::json(v).dump(); }

void add_config_options(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config_path, "JSON config file")->check(CLI::ExistingFile);
  sub->add_option("--preset", o.preset, "Preset name (PTLC, FTLC, FTHC, FTHC-desk)");
  sub->add_option("--seed", o.seed, "Root seed");
  sub->add_option("--set", o.sets, "Override a config field, e.g. --set search.lr=0.02");
}

void add_space_options(CLI::App* sub, Options& o) {
  sub->add_option("--speed-min", o.speed_min, "Speed lower bound (m/s)");
  sub->add_option("--speed-max", o.speed_max, "Speed upper bound (m/s)");
  sub->add_option("--delay-min", o.delay_min, "Delay spread lower bound (ns)");
  sub->add_option("--delay-max", o.delay_max, "Delay spread upper bound (ns)");
  sub->add_option("--snr-min", o.snr_min, "SNR lower bound (dB)");
  sub->add_option("--snr-max", o.snr_max, "SNR upper bound (dB)");
}

Overrides collect_overrides(const std::string& command, const Options& o) {
  Overrides ov;
  if (!o.preset.empty()) ov.emplace_back("preset", o.preset);
  if (o.seed) ov.emplace_back("seed", std::to_string(*o.seed));
  if (!o.model.empty()) ov.emplace_back("model.path", json(o.model).dump());
  if (o.episodes) ov.emplace_back("search.episodes", std::to_string(*o.episodes));
  if (o.max_iters) ov.emplace_back("search.max_iters", std::to_string(*o.max_iters));
  if (o.steps) ov.emplace_back("train.steps", std::to_string(*o.steps));
  if (o.realizations) ov.emplace_back("validation.realizations", std::to_string(*o.realizations));
  if (o.threshold) {
    if (command == "grid")
      ov.emplace_back("grid.threshold", text(*o.threshold));
    else if (command == "validate")
      ov.emplace_back("validation.thresholds", "[" + text(*o.threshold) + "]");
    else
      ov.emplace_back("search.threshold", text(*o.threshold));
  }
  if (o.batch) {
    const std::string key = command == "grid" ? "grid.batch" : command == "train" ? "train.batch" : "search.batch";
    ov.emplace_back(key, std::to_string(*o.batch));
  }
  const std::string base = command == "grid" ? "grid." : "search.space.";
  const std::pair<const std::optional<double>*, const char*> bounds[] = {
      {&o.speed_min, "speed.min"},      {&o.speed_max, "speed.max"}, {&o.delay_min, "delay_spread.min"},
      {&o.delay_max, "delay_spread.max"}, {&o.snr_min, "snr_db.min"}, {&o.snr_max, "snr_db.max"}};
  for (const auto& [value, key] : bounds)
    if (*value) ov.emplace_back(base + key, text(**value));
  for (const auto& s : o.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw io::ConfigError("--set " + s + ": expected key=value");
    ov.emplace_back(s.substr(0, eq), s.substr(eq + 1));
  }
  return ov;
}

io::RunConfig resolve(const std::string& command, const Options& o) {
  const auto ov = collect_overrides(command, o);
  return o.config_path.empty() ? io::resolve_config(json::object(), ov) : io::load_config(o.config_path, ov);
}

std::string model_checksum(const std::string& path) { return io::fnv1a64_hex(io::read_file(path)); }

neural::LoadedModel load_model_for(const io::RunConfig& cfg) {
  if (!fs::exists(cfg.model_path)) throw io::ConfigError("model.path: no model file at '" + cfg.model_path + "'");
  return neural::load_model(cfg.model_path);
}

json metrics_json(const baseline::ConfusionCounts& c) {
  const auto m = baseline::compute_metrics(c);
  const auto opt = [](std::optional<double> v) { return v ? json(*v) : json(nullptr); };
  return {{"tp", c.true_positives()},
          {"fp", c.false_positives()},
          {"tn", c.true_negatives()},
          {"fn", c.false_negatives()},
          {"accuracy", opt(m.accuracy)},
          {"precision", opt(m.precision)},
          {"recall", opt(m.recall)}};
}

int cmd_train(const Options& o, std::ostream& out, std::ostream& err) {
  const auto cfg = resolve("train", o);
  const auto& preset = neural::find_preset(cfg.preset);
  const std::string path = o.out.empty() ? cfg.model_path : o.out;
  neural::NeuralReceiver model(preset.model);
  err << "training " << preset.name << ": " << model.parameter_count() << " parameters, " << cfg.train.n_steps
      << " steps of batch " << cfg.train.batch << "\n";
  io::RecordWriter log(path + ".train.jsonl", io::CampaignKind::Train, cfg.snapshot,
                       {{"parameters", model.parameter_count()}});
  const auto result = neural::train(model, preset, cfg.train, cfg.signal, [&](std::size_t step, double loss, double lr) {
    log.append({{"type", "train_step"}, {"step", step}, {"loss", io::number(loss)}, {"lr", lr}});
    if ((step + 1) % 50 == 0) err << "step " << step + 1 << " loss " << loss << "\n";
  });
  const auto& h = result.loss_history;
  const std::size_t tail = std::min<std::size_t>(50, h.size());
  double final_loss = 0.0;
  for (std::size_t i = h.size() - tail; i < h.size(); ++i) final_loss += h[i] / static_cast<double>(tail);
  neural::TrainingManifest manifest{preset.name,   cfg.train.seed, cfg.train.n_steps, cfg.train.batch, cfg.train.lr,
                                    cfg.train.decay == neural::LrDecay::Cosine ? "cosine" : "constant",
                                    final_loss,    result.seconds};
  neural::save_model(path, model, manifest);
  log.finish({{"steps", h.size()}, {"final_loss", final_loss}, {"seconds", result.seconds}});
  out << "model " << path << " final_loss " << final_loss << " seconds " << result.seconds << "\n";
  return kOk;
}

int cmd_search(const Options& o, std::ostream& out, std::ostream& err) {
  std::optional<io::CampaignFile> reference;
  io::RunConfig cfg;
  if (!o.replay.empty()) {
    reference = io::read_campaign(o.replay);
    if (reference->kind != io::CampaignKind::Search) throw io::RecordError(o.replay + ": not a search campaign");
    cfg = io::config_from_snapshot(reference->config());
    if (!o.model.empty()) cfg.model_path = o.model;
  } else {
    cfg = resolve("search", o);
  }
  const auto loaded = load_model_for(cfg);
  const std::string checksum = model_checksum(cfg.model_path);
  if (reference && reference->meta().value("model_checksum", std::string()) != checksum) {
    throw std::runtime_error("model file '" + cfg.model_path + "' differs from the one the campaign used");
  }
  const search::Evaluator ev(loaded.model, cfg.signal, io::resolve_profile(cfg), cfg.demapper);

  const std::string path = o.out.empty() && !reference ? "search.jsonl" : o.out;
  std::optional<io::RecordWriter> writer;
  if (!path.empty()) {
    writer.emplace(path, io::CampaignKind::Search, cfg.snapshot,
                   json{{"model_checksum", checksum}, {"model_preset", loaded.manifest.preset}});
  }
  std::size_t diverged_at = SIZE_MAX;
  const auto result = search::run_campaign(ev, cfg.space, cfg.search, [&](const search::EpisodeRecord& r) {
    const json j = io::to_json(r);
    if (writer) writer->append(j);
    if (reference && diverged_at == SIZE_MAX &&
        (r.episode >= reference->records.size() ||
         io::dump_line(j) != io::dump_line(reference->records[r.episode]))) {
      diverged_at = r.episode;
    }
    err << "episode " << r.episode + 1 << "/" << cfg.search.n_episodes << " " << search::to_string(r.outcome)
        << " after " << r.iterations() << " iterations (" << search::to_string(r.stop) << ")\n";
  });
  const auto& s = result.summary;
  if (writer) {
    writer->finish({{"episodes", s.episodes()},
                    {"fail_search", s.fail_search},
                    {"fail_init", s.fail_init},
                    {"not_fail", s.not_fail},
                    {"aborted", s.aborted},
                    {"total_tests", s.total_tests}});
  }
  out << "episodes " << s.episodes() << " fail_search " << s.fail_search << " fail_init " << s.fail_init
      << " not_fail " << s.not_fail << " aborted " << s.aborted << " tests " << s.total_tests << "\n";
  if (reference) {
    if (diverged_at == SIZE_MAX && result.records.size() != reference->records.size()) diverged_at = result.records.size();
    if (diverged_at != SIZE_MAX) {
      err << "replay diverged at episode " << diverged_at << "\n";
      return kRuntimeError;
    }
    out << "replay identical: " << result.records.size() << " episodes\n";
  }
  return kOk;
}

int cmd_grid(const Options& o, std::ostream& out, std::ostream& err) {
  const auto cfg = resolve("grid", o);
  const auto loaded = load_model_for(cfg);
  const search::Evaluator ev(loaded.model, cfg.signal, io::resolve_profile(cfg), cfg.demapper);
  const std::string path = o.out.empty() ? "grid.jsonl" : o.out;
  io::RecordWriter writer(path, io::CampaignKind::Grid, cfg.snapshot,
                          {{"model_checksum", model_checksum(cfg.model_path)}});
  const std::size_t total = cfg.grid.total_points();
  std::size_t flagged = 0;
  const auto records =
      baseline::run_grid(ev, cfg.grid, cfg.grid_batch, cfg.grid_threshold, cfg.seed, [&](const baseline::GridRecord& r) {
        writer.append(io::to_json(r));
        flagged += r.failure ? 1 : 0;
        if ((r.id + 1) % 100 == 0 || r.id + 1 == total) err << "grid " << r.id + 1 << "/" << total << "\n";
      });
  writer.finish({{"points", records.size()}, {"failures", flagged}});
  out << "points " << records.size() << " failures " << flagged << "\n";
  return kOk;
}

int cmd_validate(const Options& o, std::ostream& out, std::ostream& err) {
  const auto input = io::read_campaign(o.input);
  io::RunConfig cfg;
  if (o.config_path.empty()) {
    json tree = input.config();
    tree.erase("overrides");
    cfg = io::resolve_config(tree, collect_overrides("validate", o));
  } else {
    cfg = resolve("validate", o);
  }
  std::vector<baseline::LabeledConfig> configs;
  std::string source;
  if (input.kind == io::CampaignKind::Search) {
    configs = baseline::configs_from_campaign(io::episodes(input));
    source = "search";
  } else if (input.kind == io::CampaignKind::Grid) {
    configs = baseline::configs_from_grid(io::grid_records(input));
    source = "grid";
  } else {
    throw io::RecordError(o.input + ": only search and grid campaigns can be validated");
  }
  const auto loaded = load_model_for(cfg);
  const search::Evaluator ev(loaded.model, cfg.signal, io::resolve_profile(cfg), cfg.demapper);
  const std::string path = o.out.empty() ? "validation.jsonl" : o.out;
  io::RecordWriter writer(path, io::CampaignKind::Validate, cfg.snapshot,
                          {{"source", source}, {"input", o.input}, {"model_checksum", model_checksum(cfg.model_path)}});
  std::size_t done = 0;
  const auto records = baseline::validate_configs(ev, configs, cfg.validation_realizations, cfg.seed,
                                                  [&](const baseline::ValidationRecord& r) {
                                                    writer.append(io::to_json(r));
                                                    err << "validated " << ++done << "/" << configs.size() << "\n";
                                                  });
  json per_threshold = json::array();
  for (double t : cfg.validation_thresholds) {
    json m = metrics_json(baseline::confusion(records, t));
    m["threshold"] = t;
    per_threshold.push_back(m);
    out << "T " << t << " tp " << m["tp"] << " fp " << m["fp"] << " tn " << m["tn"] << " fn " << m["fn"]
        << " accuracy " << io::fixed(m["accuracy"].is_null() ? std::nullopt : std::optional(m["accuracy"].get<double>()), 3)
        << "\n";
  }
  writer.finish({{"configs", records.size()}, {"metrics", per_threshold}});
  return kOk;
}

int cmd_report(const Options& o, const std::vector<std::string>& inputs, const std::vector<double>& thresholds,
               std::ostream& out) {
  auto in = io::load_report_inputs(inputs);
  if (!thresholds.empty()) in.thresholds = thresholds;
  const std::string report = io::render_report(in);
  out << report;
  if (!o.out.empty()) io::write_file_atomic(o.out, report);
  if (!o.export_dir.empty()) {
    const fs::path dir(o.export_dir);
    if (in.search) {
      const auto eps = io::episodes(*in.search);
      io::write_file_atomic((dir / "trajectories.csv").string(), io::trajectories_csv(eps));
      io::write_file_atomic((dir / "failure_scatter.csv").string(), io::failure_scatter_csv(eps));
    }
    if (in.grid) {
      const auto grid = io::grid_records(*in.grid);
      io::write_file_atomic((dir / "grid.csv").string(), io::grid_csv(grid));
      io::write_file_atomic((dir / "grid_failures.csv").string(), io::grid_failure_scatter_csv(grid));
    }
  }
  return kOk;
}

struct CostOptions {
  std::vector<std::size_t> k{10};
  std::size_t d = 3;
  std::size_t episodes = 100;
  std::size_t max_iters = 100;
  double factor = 1.0;
  std::size_t d_max = 10;
  std::string out;
};

int cmd_cost_model(const CostOptions& c, std::ostream& out) {
  baseline::CostModelInput in{c.k, c.d, c.episodes, c.max_iters, c.factor};
  try {
    in.validate();
  } catch (const std::invalid_argument& e) {
    throw io::ConfigError(std::string("cost-model: ") + e.what());
  }
  const auto r = baseline::cost_model(in);
  char buf[96];
  std::snprintf(buf, sizeof(buf), "grid_tests %.15g\ngradient_tests %.15g\n", r.grid_tests, r.gradient_tests);
  out << buf;
  if (!c.out.empty()) io::write_file_atomic(c.out, io::cost_curves_csv(c.k, c.episodes, c.max_iters, c.d_max));
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gradient-guided failure search for neural receivers"};
  app.require_subcommand(1);
  Options o;

  auto* train = app.add_subcommand("train", "Train a neural receiver for the configured preset");
  add_config_options(train, o);
  train->add_option("--steps", o.steps, "Training steps");
  train->add_option("--batch", o.batch, "Training batch size");
  train->add_option("--out", o.out, "Model file (default: model.path)");

  auto* search = app.add_subcommand("search", "Run gradient-guided search episodes");
  add_config_options(search, o);
  add_space_options(search, o);
  search->add_option("--model", o.model, "Model file");
  search->add_option("--threshold", o.threshold, "Failure threshold T");
  search->add_option("--episodes", o.episodes, "Number of episodes");
  search->add_option("--max-iters", o.max_iters, "Iterations per episode");
  search->add_option("--batch", o.batch, "Realizations per iteration");
  search->add_option("--out", o.out, "Campaign file (default: search.jsonl)");
  search->add_option("--replay", o.replay, "Re-run a campaign from its snapshot and compare")->check(CLI::ExistingFile);

  auto* grid = app.add_subcommand("grid", "Evaluate the uniform grid baseline");
  add_config_options(grid, o);
  add_space_options(grid, o);
  grid->add_option("--model", o.model, "Model file");
  grid->add_option("--threshold", o.threshold, "Failure threshold T");
  grid->add_option("--batch", o.batch, "Realizations per grid point");
  grid->add_option("--out", o.out, "Campaign file (default: grid.jsonl)");

  auto* validate = app.add_subcommand("validate", "Re-test stored configurations on fresh realizations");
  add_config_options(validate, o);
  validate->add_option("--input", o.input, "Search or grid campaign file")->required()->check(CLI::ExistingFile);
  validate->add_option("--model", o.model, "Model file");
  validate->add_option("--threshold", o.threshold, "Single validation threshold");
  validate->add_option("--realizations", o.realizations, "Realizations per configuration");
  validate->add_option("--out", o.out, "Validation file (default: validation.jsonl)");

  std::vector<std::string> report_inputs;
  std::vector<double> report_thresholds;
  auto* report = app.add_subcommand("report", "Summary tables and plot exports from campaign files");
  report->add_option("files", report_inputs, "Campaign files")->required()->check(CLI::ExistingFile);
  report->add_option("--thresholds", report_thresholds, "Thresholds for the validation tables");
  report->add_option("--out", o.out, "Also write the report here");
  report->add_option("--export-dir", o.export_dir, "Directory for CSV exports");

  CostOptions cost;
  auto* cost_cmd = app.add_subcommand("cost-model", "Closed-form grid versus gradient test counts");
  cost_cmd->add_option("--k", cost.k, "Points per axis (one value applies to all axes)")->expected(1, -1);
  cost_cmd->add_option("--d", cost.d, "Number of parameters");
  cost_cmd->add_option("--episodes", cost.episodes, "Episodes N_e");
  cost_cmd->add_option("--max-iters", cost.max_iters, "Iterations per episode");
  cost_cmd->add_option("--factor", cost.factor, "Average fraction of iterations used");
  cost_cmd->add_option("--d-max", cost.d_max, "Largest d in the exported curves");
  cost_cmd->add_option("--out", cost.out, "CSV file for the cost curves");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*train) return cmd_train(o, out, err);
    if (*search) return cmd_search(o, out, err);
    if (*grid) return cmd_grid(o, out, err);
    if (*validate) return cmd_validate(o, out, err);
    if (*report) return cmd_report(o, report_inputs, report_thresholds, out);
    if (*cost_cmd) return cmd_cost_model(cost, out);
  } catch (const io::ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kConfigError;
}

}  // namespace rxprobe::cli
