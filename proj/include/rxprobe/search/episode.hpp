#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rxprobe/link/signal.hpp"
#include "rxprobe/search/evaluator.hpp"
#include "rxprobe/search/space.hpp"

namespace rxprobe::search {

struct SearchConfig {
  std::size_t n_episodes = 100;
  std::size_t max_iters = 100;
  std::size_t batch = 25;
  double lr = 0.01;
  std::size_t patience = 5;
  std::size_t max_halvings = 2;
  double improve_tol = 1e-5;
  double threshold = 0.9;
  bool resample = true;  // fresh realizations every iteration
  std::uint64_t seed = 1;

  void validate() const;
};

// Learning-rate halving with early stopping. A loss improves when it beats the
// best seen so far by at least `tol`. After `patience` observations without
// improvement the rate halves; once `max_halvings` have happened, the next
// exhausted patience stops the episode.
class LrSchedule {
 public:
  enum class Action { Continue, Halved, Stop };

  LrSchedule(double lr, std::size_t patience, std::size_t max_halvings, double tol);

  Action observe(double loss);
  double lr() const { return lr_; }
  std::size_t halvings() const { return halvings_; }

 private:
  double lr_;
  std::size_t patience_, max_halvings_;
  double tol_;
  double best_;
  std::size_t stale_ = 0;
  std::size_t halvings_ = 0;
  bool seen_ = false;
};

enum class Outcome { FailSearch, FailInit, NotFail };
enum class StopReason { Triggered, EarlyStopped, MaxIters, Aborted };

std::string to_string(Outcome o);
std::string to_string(StopReason r);
Outcome outcome_from_string(const std::string& s);
StopReason stop_reason_from_string(const std::string& s);

struct IterationRecord {
  std::size_t iteration = 0;
  std::array<double, kAxes> x_hat{};
  link::ScenarioParams params;  // canonical units
  double hard_ber_t = 0.0;
  double hard_ber_ai = 0.0;
  double soft_ber_t = 0.0;
  double soft_ber_ai = 0.0;
  double loss = 0.0;
  double lr = 0.0;  // rate in force when this point was evaluated

  bool operator==(const IterationRecord&) const = default;
};

struct EpisodeRecord {
  std::size_t episode = 0;
  std::uint64_t seed = 0;
  link::ScenarioParams start;
  std::vector<IterationRecord> trace;
  Outcome outcome = Outcome::NotFail;
  StopReason stop = StopReason::MaxIters;
  std::string diagnostic;

  std::size_t iterations() const { return trace.size(); }
  const IterationRecord& final() const { return trace.back(); }
  bool operator==(const EpisodeRecord&) const = default;
};

// Seed of one iteration's batch; with resampling off every iteration reuses
// the first one.
std::uint64_t iteration_seed(const SearchConfig& config, std::uint64_t episode_seed, std::size_t iteration);

// Simulate, evaluate both receivers, test the trigger, then step the
// normalized parameters with Adam on L and clamp them to [0, 1]. The trigger
// is checked before the schedule, so a failure wins over an early stop.
EpisodeRecord run_episode(const Evaluator& evaluator, const SearchSpace& space, const SearchConfig& config,
                          std::size_t episode);

}  // namespace rxprobe::search
