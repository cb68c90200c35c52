#include "rxprobe/io/export.hpp"

#include <charconv>
#include <sstream>
#include <stdexcept>

#include "rxprobe/baseline/cost_model.hpp"

namespace rxprobe::io {

namespace {

// Shortest text that reads back to the same double.
std::string num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void params_cols(std::ostringstream& out, const link::ScenarioParams& p) {
  out << num(p.speed_mps) << ',' << num(p.delay_spread_ns) << ',' << num(p.snr_db());
}

}  // namespace

std::string trajectories_csv(const std::vector<search::EpisodeRecord>& episodes) {
  std::ostringstream out;
  out << "episode,iteration,speed_mps,delay_spread_ns,snr_db,loss,hard_ber_t,hard_ber_ai,soft_ber_t,soft_ber_ai,lr,"
         "outcome\n";
  for (const auto& e : episodes)
    for (const auto& it : e.trace) {
      out << e.episode << ',' << it.iteration << ',';
      params_cols(out, it.params);
      out << ',' << num(it.loss) << ',' << num(it.hard_ber_t) << ',' << num(it.hard_ber_ai) << ','
          << num(it.soft_ber_t) << ',' << num(it.soft_ber_ai) << ',' << num(it.lr) << ','
          << search::to_string(e.outcome) << '\n';
    }
  return out.str();
}

std::string failure_scatter_csv(const std::vector<search::EpisodeRecord>& episodes) {
  std::ostringstream out;
  out << "episode,outcome,iterations,speed_mps,delay_spread_ns,snr_db,hard_ber_t,hard_ber_ai\n";
  for (const auto& e : episodes) {
    if (e.outcome == search::Outcome::NotFail) continue;
    const auto& f = e.final();
    out << e.episode << ',' << search::to_string(e.outcome) << ',' << e.iterations() << ',';
    params_cols(out, f.params);
    out << ',' << num(f.hard_ber_t) << ',' << num(f.hard_ber_ai) << '\n';
  }
  return out.str();
}

std::string grid_failure_scatter_csv(const std::vector<baseline::GridRecord>& records) {
  std::ostringstream out;
  out << "id,speed_mps,delay_spread_ns,snr_db,hard_ber_t,hard_ber_ai\n";
  for (const auto& r : records) {
    if (!r.failure) continue;
    out << r.id << ',';
    params_cols(out, r.params);
    out << ',' << num(r.hard_ber_t) << ',' << num(r.hard_ber_ai) << '\n';
  }
  return out.str();
}

std::string grid_csv(const std::vector<baseline::GridRecord>& records) {
  std::ostringstream out;
  out << "id,speed_mps,delay_spread_ns,snr_db,hard_ber_t,hard_ber_ai,failure\n";
  for (const auto& r : records) {
    out << r.id << ',';
    params_cols(out, r.params);
    out << ',' << num(r.hard_ber_t) << ',' << num(r.hard_ber_ai) << ',' << (r.failure ? 1 : 0) << '\n';
  }
  return out.str();
}

std::string cost_curves_csv(const std::vector<std::size_t>& k, std::size_t n_episodes, std::size_t max_iters,
                            std::size_t d_max) {
  if (k.empty()) throw std::invalid_argument("cost curves need at least one k");
  std::ostringstream out;
  out << "d,grid,gradient_full,gradient_half,gradient_quarter\n";
  for (std::size_t d = 1; d <= d_max; ++d) {
    baseline::CostModelInput in;
    in.k.clear();
    for (std::size_t i = 0; i < d; ++i) in.k.push_back(k[std::min(i, k.size() - 1)]);
    in.d = d;
    in.n_episodes = n_episodes;
    in.max_iters = max_iters;
    out << d << ',' << num(baseline::cost_model(in).grid_tests);
    for (double f : {1.0, 0.5, 0.25}) {
      in.early_stop_factor = f;
      out << ',' << num(baseline::cost_model(in).gradient_tests);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace rxprobe::io
