#include <cmath>
#include <random>

#include "doctest.h"
#include "grad_check.hpp"
#include "rxprobe/ad/adam.hpp"

using namespace rxprobe;
using ad::Tensor;
using testing::grad_check;
using testing::probe;
using testing::random_complex;
using testing::random_real;

namespace {

constexpr double kOpTol = 1e-5;

void expect_grad(const testing::LossBuilder& loss, const std::vector<Tensor>& values) {
  const auto r = grad_check(loss, values);
  CAPTURE(r.rel_error);
  CHECK(r.rel_error < kOpTol);
}

}  // namespace

TEST_CASE("spec examples for record and backward") {
  SUBCASE("x * x at 3") {
    ad::Tape tape;
    const Tensor x = tape.watch(Tensor::real({1}, {3.0}));
    const auto g = tape.backward(ad::sum(x * x));
    CHECK(g.wrt(x).item() == doctest::Approx(6.0));
  }
  SUBCASE("sum of ones") {
    ad::Tape tape;
    const Tensor x = tape.watch(Tensor::full({4}, 1.0));
    const Tensor s = ad::sum(x);
    CHECK(s.item() == 4.0);
    const auto g = tape.backward(s);
    const Tensor gx = g.wrt(x);
    for (double v : gx.data()) CHECK(v == 1.0);
  }
  SUBCASE("abs2 of 1+1j") {
    ad::Tape tape;
    const Tensor z = tape.watch(Tensor::complex({1}, std::vector<double>{1.0, 1.0}));
    const Tensor y = ad::sum(ad::abs2(z));
    CHECK(y.item() == 2.0);
    const auto g = tape.backward(y).wrt(z);
    CHECK(g.data()[0] == doctest::Approx(2.0));
    CHECK(g.data()[1] == doctest::Approx(2.0));
  }
  SUBCASE("sigmoid at 0") {
    ad::Tape tape;
    const Tensor w = tape.watch(Tensor::scalar(0.0));
    CHECK(tape.backward(ad::sigmoid(w)).wrt(w).item() == doctest::Approx(0.25));
  }
  SUBCASE("sum(A x) gives column sums") {
    std::mt19937_64 rng(1);
    const Tensor a = random_real({3, 4}, rng);
    ad::Tape tape;
    const Tensor x = tape.watch(random_real({4, 1}, rng));
    const auto g = tape.backward(ad::sum(ad::matmul(a, x))).wrt(x);
    for (std::size_t j = 0; j < 4; ++j) {
      double col = 0.0;
      for (std::size_t i = 0; i < 3; ++i) col += a.at(i * 4 + j);
      CHECK(g.at(j) == doctest::Approx(col).epsilon(1e-14));
    }
  }
  SUBCASE("unreachable leaf gets zeros") {
    ad::Tape tape;
    const Tensor a = tape.watch(Tensor::real({2}, {1.0, 2.0}));
    const Tensor b = tape.watch(Tensor::real({3}, {1.0, 2.0, 3.0}));
    const auto g = tape.backward(ad::sum(a * a));
    CHECK_FALSE(g.reached(b));
    const Tensor gb = g.wrt(b);
    CHECK(gb.shape() == ad::Shape{3});
    for (double v : gb.data()) CHECK(v == 0.0);
  }
}

TEST_CASE("backward rejects non-scalar and complex losses") {
  ad::Tape tape;
  const Tensor x = tape.watch(Tensor::real({2}, {1.0, 2.0}));
  CHECK_THROWS_AS(tape.backward(x * x), std::invalid_argument);
  const Tensor z = tape.watch(Tensor::complex({1}, std::vector<double>{1.0, 2.0}));
  CHECK_THROWS_AS(tape.backward(ad::sum(z)), std::invalid_argument);
}

TEST_CASE("shape mismatch names the op and shapes") {
  const Tensor a = Tensor::zeros({2, 3});
  const Tensor b = Tensor::zeros({4});
  try {
    (void)ad::add(a, b);
    FAIL("expected a throw");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("add") != std::string::npos);
    CHECK(msg.find("[2, 3]") != std::string::npos);
  }
  CHECK_THROWS_AS(ad::matmul(Tensor::zeros({2, 3}), Tensor::zeros({2, 3})), std::invalid_argument);
  CHECK_THROWS_AS(Tensor::real({2, 2}, {1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("per-op gradients match finite differences") {
  std::mt19937_64 rng(7);
  const Tensor ra = random_real({3, 4}, rng), rb = random_real({3, 4}, rng);
  const Tensor rrow = random_real({4}, rng), rcol = random_real({3, 1}, rng);
  const Tensor ca = random_complex({3, 4}, rng), cb = random_complex({3, 4}, rng);
  const Tensor pos = random_real({3, 4}, rng, 0.5, 2.0);
  const Tensor cpos = random_complex({3, 4}, rng, 0.5, 1.5);

  SUBCASE("add/sub/mul/div real with broadcasting") {
    expect_grad([](auto& v) { return probe(v[0] + v[1]); }, {ra, rb});
    expect_grad([](auto& v) { return probe(v[0] - v[1]); }, {ra, rrow});
    expect_grad([](auto& v) { return probe(v[0] * v[1]); }, {ra, rcol});
    expect_grad([](auto& v) { return probe(v[0] / v[1]); }, {ra, pos});
    expect_grad([](auto& v) { return probe(v[0] / v[1]); }, {rrow, pos});
  }
  SUBCASE("complex arithmetic and promotion") {
    expect_grad([](auto& v) { return probe(v[0] + v[1]); }, {ca, cb});
    expect_grad([](auto& v) { return probe(v[0] * v[1]); }, {ca, cb});
    expect_grad([](auto& v) { return probe(v[0] / v[1]); }, {ca, cpos});
    expect_grad([](auto& v) { return probe(v[0] * v[1]); }, {ca, rrow});
    expect_grad([](auto& v) { return probe(v[0] / v[1]); }, {ca, pos});
    expect_grad([](auto& v) { return probe(v[0] - v[1]); }, {rcol, cb});
  }
  SUBCASE("scalar arithmetic") {
    expect_grad([](auto& v) { return probe(ad::scale(v[0], -2.5)); }, {ca});
    expect_grad([](auto& v) { return probe(ad::add_scalar(v[0], 0.7)); }, {ra});
    expect_grad([](auto& v) { return probe(-v[0]); }, {ra});
  }
  SUBCASE("real unary ops") {
    expect_grad([](auto& v) { return probe(ad::exp(v[0])); }, {ra});
    expect_grad([](auto& v) { return probe(ad::log(v[0])); }, {pos});
    expect_grad([](auto& v) { return probe(ad::sqrt(v[0])); }, {pos});
    expect_grad([](auto& v) { return probe(ad::sigmoid(v[0])); }, {ra});
    expect_grad([](auto& v) { return probe(ad::softplus(ad::scale(v[0], 30.0))); }, {ra});
    expect_grad([](auto& v) { return probe(ad::relu(v[0])); }, {ra});
    expect_grad([](auto& v) { return probe(ad::clamp_min(v[0], 0.1)); }, {ra});
    expect_grad([](auto& v) { return probe(ad::clamp(v[0], -0.3, 0.4)); }, {ra});
  }
  SUBCASE("complex helpers") {
    expect_grad([](auto& v) { return probe(ad::abs2(v[0])); }, {ca});
    expect_grad([](auto& v) { return probe(ad::conj(v[0])); }, {ca});
    expect_grad([](auto& v) { return probe(ad::real_part(v[0]) * ad::imag_part(v[0])); }, {ca});
    expect_grad([](auto& v) { return probe(ad::make_complex(v[0], v[1]) * v[2]); }, {ra, rb, cb});
    expect_grad([](auto& v) { return probe(ad::to_complex(v[0]) * v[1]); }, {ra, cb});
    expect_grad([](auto& v) { return probe(ad::expj(v[0])); }, {ra});
  }
  SUBCASE("reductions") {
    expect_grad([](auto& v) { return ad::sum(ad::abs2(v[0])); }, {ca});
    expect_grad([](auto& v) { return ad::mean(v[0] * v[0]); }, {ra});
    expect_grad([](auto& v) { return probe(ad::sum_axis(v[0], 0)); }, {ca});
    expect_grad([](auto& v) { return probe(ad::sum_axis(v[0], 1)); }, {ra});
  }
  SUBCASE("shape ops") {
    expect_grad([](auto& v) { return probe(ad::reshape(v[0], {2, 6})); }, {ca});
    expect_grad([](auto& v) { return probe(ad::index_select(v[0], 1, {3, 0, 0, 2})); }, {ra});
    expect_grad([](auto& v) { return probe(ad::slice(v[0], 0, 1, 3)); }, {ca});
    expect_grad([](auto& v) { return probe(ad::concat({v[0], v[1]}, 1)); }, {ra, rb});
    expect_grad([](auto& v) { return probe(ad::concat({v[0], v[1]}, 0)); }, {ca, cb});
  }
  SUBCASE("matmul and dft") {
    const Tensor m1 = random_real({2, 3, 4}, rng), m2 = random_real({2, 4, 5}, rng), m3 = random_real({4, 2}, rng);
    const Tensor c1 = random_complex({2, 3, 4}, rng), c2 = random_complex({4, 3}, rng);
    expect_grad([](auto& v) { return probe(ad::matmul(v[0], v[1])); }, {m1, m2});
    expect_grad([](auto& v) { return probe(ad::matmul(v[0], v[1])); }, {m1, m3});
    expect_grad([](auto& v) { return probe(ad::matmul(v[0], v[1])); }, {c1, c2});
    expect_grad([](auto& v) { return probe(ad::dft(v[0])); }, {ca});
  }
  SUBCASE("conv2d") {
    const Tensor x = random_real({2, 4, 5, 3}, rng), w = random_real({3, 3, 3, 2}, rng), b = random_real({2}, rng);
    expect_grad([](auto& v) { return probe(ad::conv2d_3x3(v[0], v[1], v[2])); }, {x, w, b});
  }
}

TEST_CASE("dft matches the direct sum") {
  std::mt19937_64 rng(3);
  const Tensor x = random_complex({5}, rng);
  const Tensor y = ad::dft(x);
  for (std::size_t k = 0; k < 5; ++k) {
    ad::cplx acc = 0;
    for (std::size_t t = 0; t < 5; ++t) acc += x.cat(t) * std::polar(1.0, -2.0 * M_PI * double(k * t) / 5.0);
    CHECK(std::abs(y.cat(k) - acc) < 1e-12);
  }
}

TEST_CASE("conv2d matches a direct loop") {
  std::mt19937_64 rng(5);
  const std::size_t B = 2, H = 3, W = 4, CI = 3, CO = 5;
  const Tensor x = random_real({B, H, W, CI}, rng), w = random_real({3, 3, CI, CO}, rng), b = random_real({CO}, rng);
  const Tensor y = ad::conv2d_3x3(x, w, b);
  REQUIRE(y.shape() == ad::Shape{B, H, W, CO});
  for (std::size_t n = 0; n < B; ++n)
    for (std::size_t h = 0; h < H; ++h)
      for (std::size_t c = 0; c < W; ++c)
        for (std::size_t co = 0; co < CO; ++co) {
          double acc = b.at(co);
          for (int kh = 0; kh < 3; ++kh)
            for (int kw = 0; kw < 3; ++kw) {
              const int hh = int(h) + kh - 1, ww = int(c) + kw - 1;
              if (hh < 0 || ww < 0 || hh >= int(H) || ww >= int(W)) continue;
              for (std::size_t ci = 0; ci < CI; ++ci)
                acc += x.at(((n * H + hh) * W + ww) * CI + ci) * w.at(((kh * 3 + kw) * CI + ci) * CO + co);
            }
          CHECK(y.at(((n * H + h) * W + c) * CO + co) == doctest::Approx(acc).epsilon(1e-12));
        }
}

TEST_CASE("backward is deterministic") {
  std::mt19937_64 rng(11);
  const Tensor x = random_real({2, 6, 7, 3}, rng), w = random_real({3, 3, 3, 4}, rng), b = random_real({4}, rng);
  auto run = [&] {
    ad::Tape tape;
    const Tensor wl = tape.watch(w);
    const auto g = tape.backward(probe(ad::relu(ad::conv2d_3x3(x, wl, b))));
    const Tensor gw = g.wrt(wl);
    auto d = gw.data();
    return std::vector<double>(d.begin(), d.end());
  };
  CHECK(run() == run());
}

TEST_CASE("finite_diff utility") {
  auto sq = [](std::span<const double> x) { return x[0] * x[0]; };
  const std::vector<double> x{3.0};
  CHECK(ad::finite_diff(sq, x, 1e-4)[0] == doctest::Approx(6.0).epsilon(1e-6));
  auto constant = [](std::span<const double>) { return 4.2; };
  CHECK(std::abs(ad::finite_diff(constant, x, 1e-4)[0]) < 1e-8);
}

TEST_CASE("adam") {
  SUBCASE("first step has magnitude lr") {
    ad::AdamState st(ad::AdamConfig{.lr = 0.01});
    std::vector<Tensor> p{Tensor::real({3}, {1.0, -2.0, 0.5})};
    const std::vector<Tensor> g{Tensor::real({3}, {0.3, -7.0, 1e-3})};
    ad::adam_step(st, p, g);
    CHECK(st.step == 1);
    CHECK(p[0].at(0) == doctest::Approx(1.0 - 0.01).epsilon(1e-9));
    CHECK(p[0].at(1) == doctest::Approx(-2.0 + 0.01).epsilon(1e-9));
    CHECK(std::abs(p[0].at(2) - 0.5) == doctest::Approx(0.01 * 1e-3 / (1e-3 + 1e-8)).epsilon(1e-12));
  }
  SUBCASE("zero gradient is a fixed point") {
    ad::AdamState st;
    std::vector<Tensor> p{Tensor::real({2}, {1.0, 2.0})};
    for (int i = 0; i < 3; ++i) ad::adam_step(st, p, {Tensor::zeros({2})});
    CHECK(p[0].at(0) == 1.0);
    CHECK(p[0].at(1) == 2.0);
    CHECK(st.step == 3);
  }
  SUBCASE("halving lr halves the update for a constant gradient") {
    ad::AdamState a(ad::AdamConfig{.lr = 0.02}), b(ad::AdamConfig{.lr = 0.02});
    std::vector<Tensor> pa{Tensor::scalar(0.0)}, pb{Tensor::scalar(0.0)};
    const std::vector<Tensor> g{Tensor::scalar(0.5)};
    for (int i = 0; i < 4; ++i) {
      ad::adam_step(a, pa, g);
      ad::adam_step(b, pb, g);
    }
    b.config.lr *= 0.5;
    const double before_a = pa[0].item(), before_b = pb[0].item();
    ad::adam_step(a, pa, g);
    ad::adam_step(b, pb, g);
    CHECK((pb[0].item() - before_b) == doctest::Approx(0.5 * (pa[0].item() - before_a)).epsilon(1e-12));
  }
  SUBCASE("non-finite gradient is rejected without mutation") {
    ad::AdamState st;
    std::vector<Tensor> p{Tensor::real({2}, {1.0, 2.0})};
    ad::adam_step(st, p, {Tensor::real({2}, {0.1, 0.1})});
    const double p0 = p[0].at(0);
    const auto m = st.first_moment;
    CHECK_THROWS_AS(ad::adam_step(st, p, {Tensor::real({2}, {NAN, 0.1})}), ad::NonFiniteGradient);
    CHECK_THROWS_AS(ad::adam_step(st, p, {Tensor::real({2}, {0.0, INFINITY})}), ad::NonFiniteGradient);
    CHECK(st.step == 1);
    CHECK(p[0].at(0) == p0);
    CHECK(st.first_moment == m);
  }
  SUBCASE("misaligned params and grads") {
    ad::AdamState st;
    std::vector<Tensor> p{Tensor::zeros({2})};
    CHECK_THROWS(ad::adam_step(st, p, {Tensor::zeros({3})}));
    CHECK_THROWS(ad::adam_step(st, p, {}));
  }
}
