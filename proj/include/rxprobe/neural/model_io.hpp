#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "rxprobe/neural/model.hpp"

namespace rxprobe::neural {

// File layout, all integers little-endian:
//   8 bytes   magic "RXPMODEL"
//   u32       format version (kModelFormatVersion)
//   u64       header length n
//   n bytes   JSON header: {"config", "manifest", "tensors": [{"name", "shape", "offset", "count"}]}
//   ...       float64 weight blobs, row-major, at the listed element offsets
constexpr std::uint32_t kModelFormatVersion = 1;

struct TrainingManifest {
  std::string preset;
  std::uint64_t seed = 0;
  std::size_t n_steps = 0;
  std::size_t batch = 0;
  double lr = 0.0;
  std::string lr_decay = "cosine";
  double final_loss = 0.0;  // mean of the last 50 steps
  double seconds = 0.0;
};

struct LoadedModel {
  NeuralReceiver model;
  TrainingManifest manifest;
};

void save_model(const std::string& path, const NeuralReceiver& model, const TrainingManifest& manifest);

// Rejects bad magic, another format version, inconsistent tensors and, when
// `expected` is given, any config other than it (seed excluded).
LoadedModel load_model(const std::string& path, const std::optional<ModelConfig>& expected = std::nullopt);

}  // namespace rxprobe::neural
