#include "rxprobe/neural/model_io.hpp"

#include <bit>
#include <cstring>
#include <stdexcept>

#include <json.hpp>

#include "rxprobe/io/atomic_file.hpp"

namespace rxprobe::neural {

static_assert(std::endian::native == std::endian::little, "model files are written in host byte order");

namespace {

using json = nlohmann::json;
constexpr char kMagic[8] = {'R', 'X', 'P', 'M', 'O', 'D', 'E', 'L'};

template <class T>
void put(std::string& out, T v) {
  char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  out.append(b, sizeof(T));
}

template <class T>
T get(const std::string& in, std::size_t& pos, const std::string& path) {
  if (pos + sizeof(T) > in.size()) throw std::runtime_error("model file '" + path + "' is truncated");
  T v;
  std::memcpy(&v, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

json config_json(const ModelConfig& c) {
  return {{"n_resblocks", c.n_resblocks},
          {"channel_width", c.channel_width},
          {"bits_out", c.bits_out},
          {"init_seed", c.init_seed}};
}

json manifest_json(const TrainingManifest& m) {
  return {{"preset", m.preset}, {"seed", m.seed},         {"n_steps", m.n_steps},       {"batch", m.batch},
          {"lr", m.lr},         {"lr_decay", m.lr_decay}, {"final_loss", m.final_loss}, {"seconds", m.seconds}};
}

}  // namespace

void save_model(const std::string& path, const NeuralReceiver& model, const TrainingManifest& manifest) {
  json tensors = json::array();
  const auto names = model.param_names();
  std::size_t offset = 0;
  for (std::size_t i = 0; i < model.params().size(); ++i) {
    const auto& p = model.params()[i];
    tensors.push_back({{"name", names[i]}, {"shape", p.shape()}, {"offset", offset}, {"count", p.numel()}});
    offset += p.numel();
  }
  const std::string header =
      json{{"config", config_json(model.config())}, {"manifest", manifest_json(manifest)}, {"tensors", tensors}}
          .dump();

  std::string out(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, kModelFormatVersion);
  put<std::uint64_t>(out, header.size());
  out += header;
  for (const auto& p : model.params()) {
    const auto d = p.data();
    out.append(reinterpret_cast<const char*>(d.data()), d.size() * sizeof(double));
  }
  io::write_file_atomic(path, out);
}

LoadedModel load_model(const std::string& path, const std::optional<ModelConfig>& expected) {
  const std::string in = io::read_file(path);
  if (in.size() < sizeof(kMagic) || std::memcmp(in.data(), kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("'" + path + "' is not a model file (bad magic)");
  }
  std::size_t pos = sizeof(kMagic);
  const auto version = get<std::uint32_t>(in, pos, path);
  if (version != kModelFormatVersion) {
    throw std::runtime_error("model file '" + path + "' has format version " + std::to_string(version) +
                             ", expected " + std::to_string(kModelFormatVersion));
  }
  const auto header_len = get<std::uint64_t>(in, pos, path);
  if (header_len > in.size() - pos) throw std::runtime_error("model file '" + path + "' is truncated");
  const json header = json::parse(in.substr(pos, header_len));
  pos += header_len;

  ModelConfig cfg;
  const auto& c = header.at("config");
  cfg.n_resblocks = c.at("n_resblocks").get<std::size_t>();
  cfg.channel_width = c.at("channel_width").get<std::size_t>();
  cfg.bits_out = c.at("bits_out").get<std::size_t>();
  cfg.init_seed = c.at("init_seed").get<std::uint64_t>();
  if (expected) {
    const auto mismatch = [&](const char* field, std::size_t want, std::size_t got) {
      if (want != got) {
        throw std::runtime_error("model file '" + path + "': " + field + " is " + std::to_string(got) + ", expected " +
                                 std::to_string(want));
      }
    };
    mismatch("n_resblocks", expected->n_resblocks, cfg.n_resblocks);
    mismatch("channel_width", expected->channel_width, cfg.channel_width);
    mismatch("bits_out", expected->bits_out, cfg.bits_out);
  }

  const auto shapes = NeuralReceiver::param_shapes(cfg);
  const auto& tensors = header.at("tensors");
  if (tensors.size() != shapes.size()) throw std::runtime_error("model file '" + path + "': wrong tensor count");
  const std::size_t blob_start = pos;
  const std::size_t n_values = (in.size() - blob_start) / sizeof(double);
  if ((in.size() - blob_start) % sizeof(double) != 0) throw std::runtime_error("model file '" + path + "' is truncated");
  std::vector<ad::Tensor> params;
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    const auto shape = tensors[i].at("shape").get<ad::Shape>();
    const auto offset = tensors[i].at("offset").get<std::size_t>();
    const auto count = tensors[i].at("count").get<std::size_t>();
    if (shape != shapes[i] || count != ad::shape_numel(shape) || offset > n_values || count > n_values - offset) {
      throw std::runtime_error("model file '" + path + "': tensor " + tensors[i].value("name", std::to_string(i)) +
                               " is inconsistent with the config");
    }
    std::vector<double> v(count);
    std::memcpy(v.data(), in.data() + blob_start + offset * sizeof(double), count * sizeof(double));
    params.push_back(ad::Tensor::real(shape, std::move(v)));
  }

  TrainingManifest m;
  const auto& mj = header.at("manifest");
  m.preset = mj.at("preset").get<std::string>();
  m.seed = mj.at("seed").get<std::uint64_t>();
  m.n_steps = mj.at("n_steps").get<std::size_t>();
  m.batch = mj.at("batch").get<std::size_t>();
  m.lr = mj.at("lr").get<double>();
  m.lr_decay = mj.at("lr_decay").get<std::string>();
  m.final_loss = mj.at("final_loss").get<double>();
  m.seconds = mj.at("seconds").get<double>();
  return {NeuralReceiver(cfg, std::move(params)), m};
}

}  // namespace rxprobe::neural
