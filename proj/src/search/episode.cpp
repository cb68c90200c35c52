#include "rxprobe/search/episode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rxprobe/ad/adam.hpp"
#include "rxprobe/link/rng.hpp"

namespace rxprobe::search {

void SearchConfig::validate() const {
  if (n_episodes < 1) throw std::invalid_argument("search.episodes must be >= 1");
  if (max_iters < 1) throw std::invalid_argument("search.max_iters must be >= 1");
  if (batch < 1) throw std::invalid_argument("search.batch must be >= 1");
  if (!(lr > 0.0) || !std::isfinite(lr)) throw std::invalid_argument("search.lr must be positive");
  if (patience < 1) throw std::invalid_argument("search.patience must be >= 1");
  if (!(improve_tol >= 0.0)) throw std::invalid_argument("search.improve_tol must be non-negative");
  if (!(threshold > 0.0) || !std::isfinite(threshold)) throw std::invalid_argument("search.threshold must be positive");
}

LrSchedule::LrSchedule(double lr, std::size_t patience, std::size_t max_halvings, double tol)
    : lr_(lr), patience_(patience), max_halvings_(max_halvings), tol_(tol),
      best_(std::numeric_limits<double>::infinity()) {
  if (patience_ < 1) throw std::invalid_argument("LrSchedule: patience must be >= 1");
}

LrSchedule::Action LrSchedule::observe(double loss) {
  if (!seen_ || loss <= best_ - tol_) {
    seen_ = true;
    best_ = loss;
    stale_ = 0;
    return Action::Continue;
  }
  if (++stale_ < patience_) return Action::Continue;
  stale_ = 0;
  if (halvings_ >= max_halvings_) return Action::Stop;
  ++halvings_;
  lr_ *= 0.5;
  return Action::Halved;
}

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::FailSearch: return "fail_search";
    case Outcome::FailInit: return "fail_init";
    case Outcome::NotFail: return "not_fail";
  }
  return "?";
}

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::Triggered: return "triggered";
    case StopReason::EarlyStopped: return "early_stopped";
    case StopReason::MaxIters: return "max_iters";
    case StopReason::Aborted: return "aborted";
  }
  return "?";
}

Outcome outcome_from_string(const std::string& s) {
  for (auto o : {Outcome::FailSearch, Outcome::FailInit, Outcome::NotFail})
    if (to_string(o) == s) return o;
  throw std::invalid_argument("unknown outcome '" + s + "'");
}

StopReason stop_reason_from_string(const std::string& s) {
  for (auto r : {StopReason::Triggered, StopReason::EarlyStopped, StopReason::MaxIters, StopReason::Aborted})
    if (to_string(r) == s) return r;
  throw std::invalid_argument("unknown stop reason '" + s + "'");
}

std::uint64_t iteration_seed(const SearchConfig& config, std::uint64_t episode_seed, std::size_t iteration) {
  return link::derive_seed(episode_seed, link::Stream::Iteration, config.resample ? iteration : 0);
}

EpisodeRecord run_episode(const Evaluator& evaluator, const SearchSpace& space, const SearchConfig& config,
                          std::size_t episode) {
  config.validate();
  EpisodeRecord rec;
  rec.episode = episode;
  rec.seed = link::derive_seed(config.seed, link::Stream::Episode, episode);
  rec.start = sample_initial(space, config.seed, episode);

  std::array<double, kAxes> x_hat = space.normalize(rec.start);
  std::vector<ad::Tensor> params{ad::Tensor::real({kAxes}, std::vector<double>(x_hat.begin(), x_hat.end()))};
  ad::AdamState adam(ad::AdamConfig{config.lr});
  LrSchedule schedule(config.lr, config.patience, config.max_halvings, config.improve_tol);
  rec.stop = StopReason::MaxIters;

  for (std::size_t it = 0; it < config.max_iters; ++it) {
    const double lr_now = schedule.lr();
    const Evaluation e = evaluator.evaluate(space, x_hat, iteration_seed(config, rec.seed, it), config.batch, true);
    rec.trace.push_back({it, x_hat, space.denormalize(x_hat), e.hard_ber_t, e.hard_ber_ai, e.soft_ber_t, e.soft_ber_ai,
                         e.loss, lr_now});

    if (failure_criterion(e.hard_ber_t, e.hard_ber_ai, config.threshold)) {
      rec.outcome = it <= 1 ? Outcome::FailInit : Outcome::FailSearch;
      rec.stop = StopReason::Triggered;
      return rec;
    }
    const bool finite_grad = std::all_of(e.grad.begin(), e.grad.end(), [](double g) { return std::isfinite(g); });
    if (!std::isfinite(e.loss) || !finite_grad) {
      rec.stop = StopReason::Aborted;
      rec.diagnostic = "non-finite loss or gradient at iteration " + std::to_string(it);
      return rec;
    }
    if (schedule.observe(e.loss) == LrSchedule::Action::Stop) {
      rec.stop = StopReason::EarlyStopped;
      return rec;
    }
    if (it + 1 == config.max_iters) break;

    adam.config.lr = schedule.lr();
    ad::adam_step(adam, params, {ad::Tensor::real({kAxes}, std::vector<double>(e.grad.begin(), e.grad.end()))});
    const auto p = params[0].data();
    for (std::size_t i = 0; i < kAxes; ++i) x_hat[i] = std::clamp(p[i], 0.0, 1.0);
    params[0] = ad::Tensor::real({kAxes}, std::vector<double>(x_hat.begin(), x_hat.end()));
  }
  return rec;
}

}  // namespace rxprobe::search
