#pragma once

#include <functional>
#include <vector>

#include "rxprobe/search/episode.hpp"

namespace rxprobe::search {

struct CampaignSummary {
  std::size_t fail_search = 0;
  std::size_t fail_init = 0;
  std::size_t not_fail = 0;
  std::size_t aborted = 0;      // subset of not_fail
  std::size_t total_tests = 0;  // every evaluated iteration, the initial one included

  std::size_t episodes() const { return fail_search + fail_init + not_fail; }
  bool operator==(const CampaignSummary&) const = default;
};

CampaignSummary summarize(const std::vector<EpisodeRecord>& records);

struct CampaignResult {
  std::vector<EpisodeRecord> records;
  CampaignSummary summary;
};

using EpisodeSink = std::function<void(const EpisodeRecord&)>;

// Episodes 0 .. n_episodes-1 in order; `sink` sees each record as it finishes.
CampaignResult run_campaign(const Evaluator& evaluator, const SearchSpace& space, const SearchConfig& config,
                            const EpisodeSink& sink = {});

}  // namespace rxprobe::search
