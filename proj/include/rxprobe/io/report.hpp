#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rxprobe/io/records.hpp"

namespace rxprobe::io {

// Campaign files feeding a report; any subset may be present. Validation
// files name their source ("search" or "grid") in meta.source.
struct ReportInputs {
  std::optional<CampaignFile> search;
  std::optional<CampaignFile> grid;
  std::optional<CampaignFile> search_validation;
  std::optional<CampaignFile> grid_validation;
  std::vector<double> thresholds{0.9, 1.0};
};

// Loads each file into the matching slot by kind and meta.source.
ReportInputs load_report_inputs(const std::vector<std::string>& paths);

// Plain-text tables: search outcomes, per-label validation verdicts and
// metrics at every threshold, and gradient-versus-grid efficiency. Every
// number is recomputed from the records; a summary line that disagrees with
// them is rejected.
std::string render_report(const ReportInputs& inputs);

}  // namespace rxprobe::io
