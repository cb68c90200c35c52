#pragma once

#include <string>
#include <vector>

#include "rxprobe/baseline/grid.hpp"
#include "rxprobe/search/episode.hpp"

namespace rxprobe::io {

// Comma-separated tables with a header row; an empty input gives the header
// alone. SNR columns are in dB.

// One row per evaluated iteration.
std::string trajectories_csv(const std::vector<search::EpisodeRecord>& episodes);
// Final point of every FailSearch/FailInit episode.
std::string failure_scatter_csv(const std::vector<search::EpisodeRecord>& episodes);
// Flagged grid points.
std::string grid_failure_scatter_csv(const std::vector<baseline::GridRecord>& records);
std::string grid_csv(const std::vector<baseline::GridRecord>& records);
// Grid and gradient test counts for d = 1 .. d_max. `k` gives points per
// axis; past its end the last entry repeats.
std::string cost_curves_csv(const std::vector<std::size_t>& k, std::size_t n_episodes, std::size_t max_iters,
                            std::size_t d_max = 10);

}  // namespace rxprobe::io
