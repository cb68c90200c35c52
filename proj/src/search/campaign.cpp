#include "rxprobe/search/campaign.hpp"

namespace rxprobe::search {

CampaignSummary summarize(const std::vector<EpisodeRecord>& records) {
  CampaignSummary s;
  for (const auto& r : records) {
    switch (r.outcome) {
      case Outcome::FailSearch: ++s.fail_search; break;
      case Outcome::FailInit: ++s.fail_init; break;
      case Outcome::NotFail: ++s.not_fail; break;
    }
    if (r.stop == StopReason::Aborted) ++s.aborted;
    s.total_tests += r.iterations();
  }
  return s;
}

CampaignResult run_campaign(const Evaluator& evaluator, const SearchSpace& space, const SearchConfig& config,
                            const EpisodeSink& sink) {
  config.validate();
  space.validate();
  CampaignResult out;
  out.records.reserve(config.n_episodes);
  for (std::size_t e = 0; e < config.n_episodes; ++e) {
    out.records.push_back(run_episode(evaluator, space, config, e));
    if (sink) sink(out.records.back());
  }
  out.summary = summarize(out.records);
  return out;
}

}  // namespace rxprobe::search
