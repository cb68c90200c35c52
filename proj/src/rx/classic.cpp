#include "rxprobe/rx/classic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "rxprobe/ad/ops.hpp"
#include "rxprobe/ad/tape.hpp"
#include "rxprobe/link/modulation.hpp"

namespace rxprobe::rx {

using ad::Tensor;

namespace {

// LLRs of the bits of one PAM axis at coordinate u with noise variance s.
// Writes the clamped LLR and its partials w.r.t. u and s (zero when clamped).
void axis_llr(double u, double s, const link::Constellation& c, Demapper kind, double* llr, double* du, double* ds) {
  const std::size_t nl = c.levels.size();
  for (std::size_t j = 0; j < c.bits_per_axis; ++j) {
    double raw = 0.0, d_u = 0.0, d_s = 0.0;
    if (kind == Demapper::MaxLog) {
      double best[2] = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
      double arg[2] = {0.0, 0.0};
      for (std::size_t w = 0; w < nl; ++w) {
        const int b = link::Constellation::axis_bit(w, j, c.bits_per_axis);
        const double d = (u - c.levels[w]) * (u - c.levels[w]);
        if (d < best[b]) {
          best[b] = d;
          arg[b] = c.levels[w];
        }
      }
      raw = (best[1] - best[0]) / s;
      d_u = 2.0 * (arg[0] - arg[1]) / s;
      d_s = -raw / s;
    } else {
      // log-sum-exp over each bit class, shifted by the class maximum.
      double peak[2] = {-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
      for (std::size_t w = 0; w < nl; ++w) {
        const int b = link::Constellation::axis_bit(w, j, c.bits_per_axis);
        peak[b] = std::max(peak[b], -(u - c.levels[w]) * (u - c.levels[w]) / s);
      }
      double z[2] = {0.0, 0.0}, zu[2] = {0.0, 0.0}, zs[2] = {0.0, 0.0};
      for (std::size_t w = 0; w < nl; ++w) {
        const int b = link::Constellation::axis_bit(w, j, c.bits_per_axis);
        const double e = u - c.levels[w];
        const double p = std::exp(-e * e / s - peak[b]);
        z[b] += p;
        zu[b] += p * (-2.0 * e / s);
        zs[b] += p * (e * e / (s * s));
      }
      raw = (peak[0] + std::log(z[0])) - (peak[1] + std::log(z[1]));
      d_u = zu[0] / z[0] - zu[1] / z[1];
      d_s = zs[0] / z[0] - zs[1] / z[1];
    }
    if (raw > kLlrMax || raw < -kLlrMax) {
      llr[j] = raw > 0 ? kLlrMax : -kLlrMax;
      du[j] = 0.0;
      ds[j] = 0.0;
    } else {
      llr[j] = raw;
      du[j] = d_u;
      ds[j] = d_s;
    }
  }
}

}  // namespace

std::vector<double> interpolation_matrix(const std::vector<std::size_t>& pos, std::size_t n) {
  if (pos.empty()) throw std::invalid_argument("interpolation_matrix: no pilot positions");
  const std::size_t np = pos.size();
  std::vector<double> w(n * np, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    if (t <= pos.front()) {
      w[t * np] = 1.0;
    } else if (t >= pos.back()) {
      w[t * np + np - 1] = 1.0;
    } else {
      std::size_t k = 0;
      while (pos[k + 1] < t) ++k;
      const double a = static_cast<double>(t - pos[k]) / static_cast<double>(pos[k + 1] - pos[k]);
      w[t * np + k] = 1.0 - a;
      w[t * np + k + 1] = a;
    }
  }
  return w;
}

Tensor ls_estimate(const Tensor& rx, const Tensor& pilots, const std::vector<std::uint8_t>& mask, std::size_t nt,
                   std::size_t nf) {
  if (!rx.is_complex() || rx.ndim() != 3 || rx.dim(1) != nt || rx.dim(2) != nf) {
    throw std::invalid_argument("ls_estimate: rx must be complex (batch, " + std::to_string(nt) + ", " +
                                std::to_string(nf) + "), got " + ad::shape_str(rx.shape()));
  }
  if (pilots.shape() != rx.shape() || !pilots.is_complex()) throw std::invalid_argument("ls_estimate: pilot grid shape mismatch");
  if (mask.size() != nt * nf) throw std::invalid_argument("ls_estimate: pilot mask size mismatch");

  std::vector<std::size_t> sym, sub;
  for (std::size_t t = 0; t < nt; ++t) {
    std::vector<std::size_t> row;
    for (std::size_t f = 0; f < nf; ++f)
      if (mask[t * nf + f]) row.push_back(f);
    if (row.empty()) continue;
    if (sym.empty()) {
      sub = row;
    } else if (row != sub) {
      throw std::invalid_argument("ls_estimate: pilot symbols must share the same pilot subcarriers");
    }
    sym.push_back(t);
  }
  if (sym.empty()) throw std::invalid_argument("ls_estimate: pilot mask is empty");

  for (std::size_t b = 0; b < rx.dim(0); ++b)
    for (std::size_t t : sym)
      for (std::size_t f : sub)
        if (std::abs(pilots.cat((b * nt + t) * nf + f)) < 1e-9)
          throw std::invalid_argument("ls_estimate: pilot magnitude below 1e-9 at symbol " + std::to_string(t) +
                                      ", subcarrier " + std::to_string(f));

  Tensor y = ad::index_select(rx, 1, sym);
  Tensor p = ad::index_select(pilots, 1, sym);
  if (sub.size() != nf) {
    y = ad::index_select(y, 2, sub);
    p = ad::index_select(p, 2, sub);
  }
  Tensor h = ad::div(y, p);  // (batch, pilot symbols, pilot subcarriers)
  if (sub.size() != nf) {
    const auto wf = interpolation_matrix(sub, nf);  // (nf, |sub|)
    std::vector<double> wft(sub.size() * nf);
    for (std::size_t f = 0; f < nf; ++f)
      for (std::size_t k = 0; k < sub.size(); ++k) wft[k * nf + f] = wf[f * sub.size() + k];
    h = ad::matmul(h, Tensor::real({sub.size(), nf}, std::move(wft)));
  }
  if (sym.size() == nt) return h;
  return ad::matmul(Tensor::real({nt, sym.size()}, interpolation_matrix(sym, nt)), h);
}

Equalized lmmse_equalize(const Tensor& rx, const Tensor& h_hat, const Tensor& noise_var) {
  if (!rx.is_complex() || !h_hat.is_complex() || rx.shape() != h_hat.shape()) {
    throw std::invalid_argument("lmmse_equalize: rx " + ad::shape_str(rx.shape()) + " and H " +
                                ad::shape_str(h_hat.shape()) + " must be complex grids of equal shape");
  }
  if (noise_var.is_complex()) throw std::invalid_argument("lmmse_equalize: noise variance must be real");
  for (double v : noise_var.data())
    if (!(v >= 0.0)) throw std::invalid_argument("lmmse_equalize: noise variance must be >= 0");
  const Tensor denom = ad::clamp_min(ad::add(ad::abs2(h_hat), noise_var), kDenominatorFloor);
  Equalized out;
  out.symbols = ad::div(ad::mul(ad::conj(h_hat), rx), denom);
  out.noise_var = ad::div(ad::mul(noise_var, Tensor::full(rx.shape(), 1.0)), denom);
  return out;
}

Tensor demap_llr(const Tensor& symbols, const Tensor& noise_var_in, link::Modulation modulation, Demapper kind) {
  if (!symbols.is_complex()) throw std::invalid_argument("demap_llr: symbols must be complex");
  if (noise_var_in.is_complex()) throw std::invalid_argument("demap_llr: noise variance must be real");
  Tensor noise_var = noise_var_in;
  if (noise_var.shape() != symbols.shape()) noise_var = ad::mul(noise_var_in, Tensor::full(symbols.shape(), 1.0));
  for (double v : noise_var.data())
    if (!(v > 0.0)) throw std::invalid_argument("demap_llr: noise variance must be > 0");

  const auto& c = link::constellation(modulation);
  const std::size_t n = symbols.numel(), nb = c.bits, half = c.bits_per_axis;
  auto x = symbols.data();
  auto s = noise_var.data();
  std::vector<double> llr(n * nb), du(n * nb), ds(n * nb);
  for (std::size_t i = 0; i < n; ++i) {
    axis_llr(x[2 * i], s[i], c, kind, &llr[i * nb], &du[i * nb], &ds[i * nb]);
    axis_llr(x[2 * i + 1], s[i], c, kind, &llr[i * nb + half], &du[i * nb + half], &ds[i * nb + half]);
  }
  ad::Shape out_shape = symbols.shape();
  out_shape.push_back(nb);
  Tensor out = Tensor::real(out_shape, std::move(llr));
  if (!symbols.requires_grad() && !noise_var.requires_grad()) return out;
  return ad::Tape::record(
      "demap_llr", std::move(out), {&symbols, &noise_var},
      [n, nb, half, du = std::move(du), ds = std::move(ds)](std::span<const double> g, std::span<double* const> gin) {
        for (std::size_t i = 0; i < n; ++i) {
          double gre = 0.0, gim = 0.0, gs = 0.0;
          for (std::size_t j = 0; j < nb; ++j) {
            const double gj = g[i * nb + j];
            (j < half ? gre : gim) += gj * du[i * nb + j];
            gs += gj * ds[i * nb + j];
          }
          if (gin[0]) {
            gin[0][2 * i] += gre;
            gin[0][2 * i + 1] += gim;
          }
          if (gin[1]) gin[1][i] += gs;
        }
      });
}

BitTargets BitTargets::from_bits(ad::Shape shape, std::vector<std::uint8_t> bits, std::vector<std::uint8_t> mask) {
  const std::size_t n = ad::shape_numel(shape);
  if (bits.size() != n || mask.size() != n) throw std::invalid_argument("BitTargets: bits/mask do not match shape");
  BitTargets t;
  t.shape = std::move(shape);
  t.bits = std::move(bits);
  t.mask = std::move(mask);
  for (auto m : t.mask) t.n_bits += m != 0;
  if (t.n_bits == 0) throw std::invalid_argument("BitTargets: empty BER mask");
  std::vector<double> sign(n, 0.0), weight(n, 0.0);
  const double w = 1.0 / static_cast<double>(t.n_bits);
  for (std::size_t i = 0; i < n; ++i)
    if (t.mask[i]) {
      sign[i] = t.bits[i] ? 1.0 : -1.0;
      weight[i] = w;
    }
  t.sign = Tensor::real(t.shape, std::move(sign));
  t.weight = Tensor::real(t.shape, std::move(weight));
  return t;
}

BitTargets BitTargets::from_frame(const link::Frame& frame, std::size_t planes) {
  const auto& s = frame.tx.values.shape();
  const std::size_t nbt = frame.bits_per_symbol;
  if (planes < nbt) throw std::invalid_argument("BitTargets: fewer LLR planes than bits per symbol");
  const std::size_t res = s[1] * s[2];
  std::vector<std::uint8_t> bits(s[0] * res * planes, 0), mask(bits.size(), 0);
  for (std::size_t b = 0; b < s[0]; ++b)
    for (std::size_t re = 0; re < res; ++re) {
      if (frame.pilot_mask[re]) continue;
      for (std::size_t j = 0; j < nbt; ++j) {
        bits[(b * res + re) * planes + j] = frame.bits[(b * res + re) * nbt + j];
        mask[(b * res + re) * planes + j] = 1;
      }
    }
  return from_bits({s[0], s[1], s[2], planes}, std::move(bits), std::move(mask));
}

double hard_ber(const Tensor& llr, const BitTargets& t) {
  if (llr.shape() != t.shape) {
    throw std::invalid_argument("hard_ber: LLR shape " + ad::shape_str(llr.shape()) + " != label shape " +
                                ad::shape_str(t.shape));
  }
  auto v = llr.data();
  std::size_t errors = 0;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (t.mask[i]) errors += static_cast<std::uint8_t>(v[i] < 0.0) != t.bits[i];
  return static_cast<double>(errors) / static_cast<double>(t.n_bits);
}

double hard_ber(const Tensor& llr, const std::vector<std::uint8_t>& bits, const std::vector<std::uint8_t>& mask) {
  return hard_ber(llr, BitTargets::from_bits(llr.shape(), bits, mask));
}

Tensor soft_ber(const Tensor& llr, const BitTargets& t) {
  if (llr.shape() != t.shape) {
    throw std::invalid_argument("soft_ber: LLR shape " + ad::shape_str(llr.shape()) + " != label shape " +
                                ad::shape_str(t.shape));
  }
  return ad::sum(ad::mul(t.weight, ad::sigmoid(ad::mul(t.sign, llr))));
}

Tensor soft_ber(const Tensor& llr, const std::vector<std::uint8_t>& bits, const std::vector<std::uint8_t>& mask) {
  return soft_ber(llr, BitTargets::from_bits(llr.shape(), bits, mask));
}

Tensor bce_loss(const Tensor& llr, const BitTargets& t) {
  if (llr.shape() != t.shape) throw std::invalid_argument("bce_loss: LLR/label shape mismatch");
  return ad::sum(ad::mul(t.weight, ad::softplus(ad::mul(t.sign, llr))));
}

ClassicOutput classic_receiver(const Tensor& rx, const link::Frame& frame, const Tensor& noise_var,
                               const link::SignalConfig& config, Demapper kind) {
  ClassicOutput out;
  out.h_ls = ls_estimate(rx, frame.pilots.values, frame.pilot_mask, config.n_symbols, config.n_subcarriers());
  const auto eq = lmmse_equalize(rx, out.h_ls, noise_var);
  out.llr = demap_llr(eq.symbols, eq.noise_var, config.modulation, kind);
  return out;
}

}  // namespace rxprobe::rx
