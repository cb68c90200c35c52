#include "rxprobe/io/report.hpp"

#include <cstdio>
#include <sstream>

#include "rxprobe/baseline/metrics.hpp"
#include "rxprobe/search/campaign.hpp"

namespace rxprobe::io {

namespace {

std::string format(const char* fmt, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

std::string ratio(std::size_t a, std::size_t b) { return std::to_string(a) + "/" + std::to_string(b); }

void check_summary(const CampaignFile& f, const char* key, std::size_t recomputed) {
  if (f.summary.contains(key) && f.summary[key].get<std::size_t>() != recomputed) {
    throw RecordError(std::string("summary field '") + key + "' disagrees with the records");
  }
}

std::vector<baseline::ValidationRecord> checked_validation(const CampaignFile& f) {
  auto records = validation_records(f);
  check_summary(f, "configs", records.size());
  return records;
}

void validation_section(std::ostringstream& out, const char* title, const std::vector<baseline::ValidationRecord>& v,
                        const std::vector<double>& thresholds) {
  out << title << " (" << v.size() << " configs)\n";
  out << format("  %-12s", "label");
  for (double t : thresholds) out << format("  %14s", format("T=%.2f t/f", t).c_str());
  out << "\n";
  std::vector<baseline::ConfusionCounts> counts;
  for (double t : thresholds) counts.push_back(baseline::confusion(v, t));
  for (auto o : {search::Outcome::FailSearch, search::Outcome::FailInit, search::Outcome::NotFail}) {
    out << format("  %-12s", search::to_string(o).c_str());
    for (const auto& c : counts)
      out << format("  %14s", ratio(c.at(o).validated_true, c.at(o).validated_false).c_str());
    out << "\n";
  }
  out << format("  %-6s %6s %6s %6s %6s %9s %9s %9s\n", "T", "TP", "FP", "TN", "FN", "accuracy", "precision",
                "recall");
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    const auto& c = counts[i];
    const auto m = baseline::compute_metrics(c);
    out << format("  %-6.2f %6zu %6zu %6zu %6zu %9s %9s %9s\n", thresholds[i], c.true_positives(),
                  c.false_positives(), c.true_negatives(), c.false_negatives(), fixed(m.accuracy, 3).c_str(),
                  fixed(m.precision, 3).c_str(), fixed(m.recall, 3).c_str());
  }
  out << "\n";
}

}  // namespace

ReportInputs load_report_inputs(const std::vector<std::string>& paths) {
  ReportInputs in;
  const auto place = [](std::optional<CampaignFile>& slot, CampaignFile f, const std::string& path) {
    if (slot) throw RecordError(path + ": more than one file for the same report slot");
    slot = std::move(f);
  };
  for (const auto& p : paths) {
    CampaignFile f = read_campaign(p);
    switch (f.kind) {
      case CampaignKind::Search: place(in.search, std::move(f), p); break;
      case CampaignKind::Grid: place(in.grid, std::move(f), p); break;
      case CampaignKind::Validate: {
        const std::string source = f.meta().value("source", std::string());
        if (source == "search")
          place(in.search_validation, std::move(f), p);
        else if (source == "grid")
          place(in.grid_validation, std::move(f), p);
        else
          throw RecordError(p + ": validation file without meta.source");
        break;
      }
      case CampaignKind::Train: throw RecordError(p + ": training logs carry no report data");
    }
  }
  return in;
}

std::string render_report(const ReportInputs& in) {
  std::ostringstream out;
  std::optional<search::CampaignSummary> gradient;
  if (in.search) {
    const auto records = episodes(*in.search);
    const auto s = search::summarize(records);
    check_summary(*in.search, "total_tests", s.total_tests);
    check_summary(*in.search, "episodes", s.episodes());
    gradient = s;
    out << "Search campaign (" << s.episodes() << " episodes)\n";
    out << format("  %-12s %8zu\n", "fail_search", s.fail_search);
    out << format("  %-12s %8zu\n", "fail_init", s.fail_init);
    out << format("  %-12s %8zu\n", "not_fail", s.not_fail);
    out << format("  %-12s %8zu\n", "aborted", s.aborted);
    out << format("  %-12s %8zu\n\n", "tests", s.total_tests);
  }
  std::optional<std::size_t> grid_tests;
  if (in.grid) {
    const auto records = grid_records(*in.grid);
    std::size_t flagged = 0;
    for (const auto& r : records) flagged += r.failure ? 1 : 0;
    check_summary(*in.grid, "points", records.size());
    check_summary(*in.grid, "failures", flagged);
    grid_tests = records.size();
    out << "Grid campaign\n";
    out << format("  %-12s %8zu\n", "points", records.size());
    out << format("  %-12s %8zu\n\n", "flagged", flagged);
  }
  std::vector<baseline::ValidationRecord> sv, gv;
  if (in.search_validation) {
    sv = checked_validation(*in.search_validation);
    validation_section(out, "Validation of search configs", sv, in.thresholds);
  }
  if (in.grid_validation) {
    gv = checked_validation(*in.grid_validation);
    validation_section(out, "Validation of grid configs", gv, in.thresholds);
  }
  if ((gradient && in.search_validation) || (grid_tests && in.grid_validation)) {
    out << "Efficiency\n";
    out << format("  %-6s %-9s %9s %9s %14s\n", "T", "method", "tests", "failures", "tests/failure");
    for (double t : in.thresholds) {
      std::optional<double> g, b;
      if (gradient && in.search_validation) {
        const auto tp = baseline::confusion(sv, t).true_positives();
        g = baseline::tests_per_failure(gradient->total_tests, tp);
        out << format("  %-6.2f %-9s %9zu %9zu %14s\n", t, "gradient", gradient->total_tests, tp,
                      fixed(g, 1).c_str());
      }
      if (grid_tests && in.grid_validation) {
        const auto tp = baseline::confusion(gv, t).true_positives();
        b = baseline::tests_per_failure(*grid_tests, tp);
        out << format("  %-6.2f %-9s %9zu %9zu %14s\n", t, "grid", *grid_tests, tp, fixed(b, 1).c_str());
      }
      if (g && b) {
        const auto r = baseline::relative_reduction(g, b);
        out << format("  %-6.2f %-9s %34s\n", t, "reduction",
                      r ? format("%.1f%%", 100.0 * *r).c_str() : "n/a");
      }
    }
  }
  return out.str();
}

}  // namespace rxprobe::io
