#include <cmath>
#include <filesystem>
#include <limits>
#include <random>
#include <set>

#include "doctest.h"
#include "grad_check.hpp"
#include "rxprobe/io/atomic_file.hpp"
#include "rxprobe/link/channel.hpp"
#include "rxprobe/neural/model.hpp"
#include "rxprobe/neural/model_io.hpp"
#include "rxprobe/neural/presets.hpp"
#include "rxprobe/neural/train.hpp"
#include "rxprobe/rx/classic.hpp"

using namespace rxprobe;
using ad::Tensor;
using neural::ModelConfig;
using neural::NeuralReceiver;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("rxprobe_test_neural_" + name)).string();
}

bool same_bits(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) return false;
  auto x = a.data();
  auto y = b.data();
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] != y[i]) return false;
  return true;
}

link::LinkBatch small_batch(std::size_t batch, link::Modulation m, double snr_db = 15.0) {
  link::SignalConfig cfg;
  cfg.modulation = m;
  return link::simulate_batch(3, cfg, link::default_profile("TDL-D"),
                              link::ScenarioTensors::constant({10.0, 100.0, -snr_db}), batch);
}

}  // namespace

TEST_CASE("parameter counts") {
  for (const auto& p : neural::builtin_presets()) {
    const NeuralReceiver m(p.model);
    CHECK(m.parameter_count() == p.model.parameter_count());
    CHECK(m.params().size() == m.param_names().size());
  }
  const auto ptlc = NeuralReceiver(neural::find_preset("PTLC").model).parameter_count();
  const auto ftlc = NeuralReceiver(neural::find_preset("FTLC").model).parameter_count();
  const auto fthc = NeuralReceiver(neural::find_preset("FTHC").model).parameter_count();
  MESSAGE("PTLC " << ptlc << ", FTLC " << ftlc << ", FTHC " << fthc);
  CHECK(ptlc >= 49300);
  CHECK(ptlc <= 66700);
  CHECK(ftlc >= 49300);
  CHECK(ftlc <= 66700);
  CHECK(fthc >= 595000);
  CHECK(fthc <= 805000);
  CHECK(neural::find_preset("PTLC").model.n_resblocks == 5);
  CHECK(neural::find_preset("FTLC").model.n_resblocks == 5);
  CHECK(neural::find_preset("FTHC").model.n_resblocks == 11);
}

TEST_CASE("config validation and deterministic init") {
  CHECK_THROWS_AS(NeuralReceiver(ModelConfig{0, 8, 4, 1}), std::invalid_argument);
  CHECK_THROWS_AS(NeuralReceiver(ModelConfig{1, 8, 3, 1}), std::invalid_argument);
  const NeuralReceiver a(ModelConfig{2, 8, 4, 7}), b(ModelConfig{2, 8, 4, 7}), c(ModelConfig{2, 8, 4, 8});
  bool all_same = true, any_diff = false;
  for (std::size_t i = 0; i < a.params().size(); ++i) {
    all_same = all_same && same_bits(a.params()[i], b.params()[i]);
    any_diff = any_diff || !same_bits(a.params()[i], c.params()[i]);
  }
  CHECK(all_same);
  CHECK(any_diff);
  std::vector<Tensor> wrong = a.params();
  wrong.pop_back();
  CHECK_THROWS_AS(NeuralReceiver(a.config(), wrong), std::invalid_argument);
}

TEST_CASE("forward shapes and rejections") {
  const NeuralReceiver m(ModelConfig{2, 8, 4, 1});
  std::mt19937_64 rng(1);
  const Tensor rx = testing::random_complex({2, 14, 72}, rng);
  const Tensor feats = neural::make_features(rx, rx, rx);
  CHECK(feats.shape() == ad::Shape{2, 14, 72, 6});
  CHECK(m.forward(feats).shape() == ad::Shape{2, 14, 72, 4});
  // Features are scaled so a unit-power complex value gives unit-variance planes.
  CHECK(feats.data()[0] == doctest::Approx(std::sqrt(2.0) * rx.data()[0]));
  CHECK(feats.data()[1] == doctest::Approx(std::sqrt(2.0) * rx.data()[1]));

  CHECK_THROWS_AS(m.forward(testing::random_real({2, 14, 72, 5}, rng)), std::invalid_argument);
  CHECK_THROWS_AS(m.forward(testing::random_real({14, 72, 6}, rng)), std::invalid_argument);
  CHECK_THROWS_AS(neural::make_features(rx, testing::random_complex({2, 14, 71}, rng), rx), std::invalid_argument);
  // Spatial shape is preserved for other grid sizes too.
  CHECK(m.forward(testing::random_real({1, 5, 9, 6}, rng)).shape() == ad::Shape{1, 5, 9, 4});
}

TEST_CASE("untrained model is uninformative") {
  const NeuralReceiver m(neural::find_preset("PTLC").model);
  const auto sim = small_batch(3, link::Modulation::QAM16);
  const auto targets = rx::BitTargets::from_frame(sim.frame, 4);
  REQUIRE(targets.n_bits >= 10000);
  const Tensor llr = neural::neural_llr(m, sim.channel.rx.values, sim.frame, link::SignalConfig{});
  const double ber = rx::hard_ber(llr, targets);
  MESSAGE("untrained hard BER " << ber << " over " << targets.n_bits << " bits");
  CHECK(std::abs(ber - 0.5) <= 0.05);
}

TEST_CASE("input gradient path is alive") {
  const NeuralReceiver m(ModelConfig{2, 8, 4, 1});
  const auto sim = small_batch(1, link::Modulation::QAM16);
  const auto targets = rx::BitTargets::from_frame(sim.frame, 4);
  ad::Tape tape;
  const Tensor re = tape.watch(ad::real_part(sim.channel.rx.values));
  const Tensor im = ad::imag_part(sim.channel.rx.values);
  const Tensor rx_w = ad::make_complex(re, im);
  const Tensor loss = rx::soft_ber(neural::neural_llr(m, rx_w, sim.frame, link::SignalConfig{}), targets);
  const auto g = tape.backward(loss);
  const Tensor gr = g.wrt(re);
  std::size_t nonzero = 0;
  for (double v : gr.data()) nonzero += v != 0.0;
  CHECK(nonzero > gr.numel() / 2);
}

TEST_CASE("weight gradients match finite differences") {
  const NeuralReceiver m(neural::find_preset("PTLC").model);
  const auto sim = small_batch(1, link::Modulation::QAM16);
  const auto targets = rx::BitTargets::from_frame(sim.frame, 4);
  const link::SignalConfig cfg;
  const auto loss_with = [&](const std::vector<Tensor>& p) {
    return rx::bce_loss(neural::neural_llr(m, sim.channel.rx.values, sim.frame, cfg, p), targets);
  };

  ad::Tape tape;
  std::vector<Tensor> watched;
  for (const auto& p : m.params()) watched.push_back(tape.watch(p));
  const auto grads = tape.backward(loss_with(watched));

  // Ten random (tensor, element) coordinates across the network.
  std::mt19937_64 rng(11);
  std::vector<double> analytic, numeric;
  for (int k = 0; k < 10; ++k) {
    const std::size_t t = std::uniform_int_distribution<std::size_t>(0, m.params().size() - 1)(rng);
    const std::size_t e = std::uniform_int_distribution<std::size_t>(0, m.params()[t].numel() - 1)(rng);
    const Tensor gt = grads.wrt(watched[t]);
    analytic.push_back(gt.data()[e]);
    const double eps = 1e-5;
    auto shifted = [&](double d) {
      std::vector<Tensor> p = m.params();
      std::vector<double> v(p[t].data().begin(), p[t].data().end());
      v[e] += d;
      p[t] = Tensor::real(p[t].shape(), v);
      return loss_with(p).item();
    };
    numeric.push_back((shifted(eps) - shifted(-eps)) / (2 * eps));
  }
  const double err = ad::relative_error(analytic, numeric);
  MESSAGE("weight-gradient relative error " << err);
  CHECK(err < 1e-4);
}

TEST_CASE("preset sampling") {
  const auto& ptlc = neural::find_preset("PTLC");
  const auto& ftlc = neural::find_preset("FTLC");
  const auto& fthc = neural::find_preset("FTHC");
  CHECK(ptlc.test_modulation() == link::Modulation::QAM16);
  CHECK(fthc.test_modulation() == link::Modulation::QAM64);

  SUBCASE("PTLC only emits the discrete extremes") {
    std::set<double> delays, speeds, ebn0;
    for (std::uint64_t step = 0; step < 200; ++step) {
      const auto d = neural::draw_batch(ptlc, 5, step, 16);
      CHECK(d.modulation == link::Modulation::QAM16);
      CHECK(d.profile == "TDL-D");
      for (std::size_t b = 0; b < d.items.size(); ++b) {
        const auto& s = d.items[b];
        CHECK_FALSE((s.delay_spread_ns > 20.0 && s.delay_spread_ns < 300.0));
        CHECK_FALSE((s.speed_mps > 2.0 && s.speed_mps < 20.0));
        delays.insert(s.delay_spread_ns);
        speeds.insert(s.speed_mps);
        ebn0.insert(d.ebn0_db[b]);
        CHECK(s.noise_dbm == doctest::Approx(-link::ebn0_to_snr_db(d.ebn0_db[b], link::Modulation::QAM16)));
      }
    }
    CHECK(delays == std::set<double>{0, 10, 20, 300, 350, 400});
    CHECK(speeds == std::set<double>{0, 1, 2, 20, 25, 30});
    CHECK(ebn0 == std::set<double>{0, 1, 2, 3, 18, 19, 20});
  }
  SUBCASE("FTLC covers speed and delay continuously") {
    std::vector<int> speed_bins(30, 0), delay_bins(40, 0);
    std::set<double> distinct;
    for (std::uint64_t step = 0; step < 200; ++step) {
      for (const auto& s : neural::draw_batch(ftlc, 5, step, 16).items) {
        REQUIRE(s.speed_mps >= 0.0);
        REQUIRE(s.speed_mps <= 30.0);
        REQUIRE(s.delay_spread_ns >= 0.0);
        REQUIRE(s.delay_spread_ns <= 400.0);
        ++speed_bins[std::min<std::size_t>(29, static_cast<std::size_t>(s.speed_mps))];
        ++delay_bins[std::min<std::size_t>(39, static_cast<std::size_t>(s.delay_spread_ns / 10))];
        distinct.insert(s.speed_mps);
      }
    }
    for (int c : speed_bins) CHECK(c > 0);
    for (int c : delay_bins) CHECK(c > 0);
    CHECK(distinct.size() == 3200);
  }
  SUBCASE("FTHC mixes modulations and profiles") {
    std::set<link::Modulation> mods;
    std::set<std::string> profiles;
    for (std::uint64_t step = 0; step < 100; ++step) {
      const auto d = neural::draw_batch(fthc, 5, step, 2);
      mods.insert(d.modulation);
      profiles.insert(d.profile);
      for (const auto& s : d.items) CHECK(s.delay_spread_ns >= 10.0);
    }
    CHECK(mods.size() == 3);
    CHECK(profiles.size() == 3);
  }
  SUBCASE("draws are a pure function of (seed, step)") {
    const auto a = neural::draw_batch(ftlc, 5, 17, 8), b = neural::draw_batch(ftlc, 5, 17, 8);
    CHECK(a.items == b.items);
    CHECK(neural::draw_batch(ftlc, 5, 18, 8).items != a.items);
  }
  CHECK_THROWS_AS(neural::find_preset("XYZ"), std::invalid_argument);
}

TEST_CASE("cosine learning rate") {
  neural::TrainBudget b;
  b.n_steps = 100;
  b.lr = 2e-3;
  CHECK(neural::learning_rate(b, 0) == doctest::Approx(2e-3));
  CHECK(neural::learning_rate(b, 50) == doctest::Approx(1e-3));
  CHECK(neural::learning_rate(b, 100) == doctest::Approx(0.0));
  b.decay = neural::LrDecay::Constant;
  CHECK(neural::learning_rate(b, 70) == doctest::Approx(2e-3));
}

TEST_CASE("training loop") {
  auto preset = neural::find_preset("PTLC");
  preset.model = ModelConfig{1, 8, 4, 3};
  neural::TrainBudget budget;
  budget.n_steps = 4;
  budget.batch = 2;
  budget.lr = 1e-3;

  SUBCASE("runs, reports every step and is deterministic") {
    NeuralReceiver a(preset.model), b(preset.model);
    std::size_t calls = 0;
    const auto ra = neural::train(a, preset, budget, {}, [&](std::size_t, double, double) { ++calls; });
    const auto rb = neural::train(b, preset, budget);
    CHECK(calls == 4);
    REQUIRE(ra.loss_history.size() == 4);
    CHECK(ra.loss_history == rb.loss_history);
    for (double l : ra.loss_history) CHECK(std::isfinite(l));
    CHECK(same_bits(a.params()[0], b.params()[0]));
    CHECK_FALSE(same_bits(a.params()[0], NeuralReceiver(preset.model).params()[0]));
  }
  SUBCASE("invalid budgets and incompatible presets are rejected") {
    NeuralReceiver m(preset.model);
    auto bad = budget;
    bad.n_steps = 0;
    CHECK_THROWS_AS(neural::train(m, preset, bad), std::invalid_argument);
    bad = budget;
    bad.lr = -1.0;
    CHECK_THROWS_AS(neural::train(m, preset, bad), std::invalid_argument);
    auto wide = preset;
    wide.modulations = {link::Modulation::QAM64};
    CHECK_THROWS_AS(neural::train(m, wide, budget), std::invalid_argument);
  }
  SUBCASE("a non-finite loss aborts with a diagnostic") {
    NeuralReceiver m(preset.model);
    auto& bias = m.mutable_params().back();
    std::vector<double> v(bias.numel(), std::numeric_limits<double>::quiet_NaN());
    bias = Tensor::real(bias.shape(), v);
    try {
      neural::train(m, preset, budget);
      FAIL("expected TrainingDiverged");
    } catch (const neural::TrainingDiverged& e) {
      CHECK(std::string(e.what()).find("step 0") != std::string::npos);
    }
  }
}

TEST_CASE("model file round trip") {
  const NeuralReceiver m(ModelConfig{2, 8, 4, 9});
  const neural::TrainingManifest manifest{"PTLC", 42, 1000, 16, 1e-3, "cosine", 0.25, 12.5};
  const std::string path = temp_path("roundtrip.rxpm");
  neural::save_model(path, m, manifest);

  const auto loaded = neural::load_model(path, m.config());
  CHECK(loaded.model.config() == m.config());
  CHECK(loaded.manifest.preset == "PTLC");
  CHECK(loaded.manifest.seed == 42);
  CHECK(loaded.manifest.n_steps == 1000);
  CHECK(loaded.manifest.batch == 16);
  std::mt19937_64 rng(3);
  const Tensor x = testing::random_real({1, 14, 72, 6}, rng);
  CHECK(same_bits(m.forward(x), loaded.model.forward(x)));

  SUBCASE("wrong bits_out is rejected") {
    auto other = m.config();
    other.bits_out = 6;
    CHECK_THROWS_AS(neural::load_model(path, other), std::runtime_error);
  }
  SUBCASE("corrupt files are rejected") {
    std::string bytes = io::read_file(path);
    const std::string bad = temp_path("bad.rxpm");
    std::string v = bytes;
    v[8] = 7;  // format version
    io::write_file_atomic(bad, v);
    CHECK_THROWS_AS(neural::load_model(bad), std::runtime_error);
    v = bytes;
    v[0] = 'X';
    io::write_file_atomic(bad, v);
    CHECK_THROWS_AS(neural::load_model(bad), std::runtime_error);
    io::write_file_atomic(bad, bytes.substr(0, bytes.size() - 100));
    CHECK_THROWS_AS(neural::load_model(bad), std::runtime_error);
    std::filesystem::remove(bad);
  }
  std::filesystem::remove(path);
}
