#include "rxprobe/ad/ops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace rxprobe::ad {
namespace {

[[noreturn]] void shape_error(const char* op, const std::string& what) {
  throw std::invalid_argument(std::string(op) + ": " + what);
}

Shape broadcast_shape(const char* op, const Shape& a, const Shape& b) {
  const std::size_t nd = std::max(a.size(), b.size());
  Shape out(nd, 1);
  for (std::size_t i = 0; i < nd; ++i) {
    const std::size_t da = i < nd - a.size() ? 1 : a[i - (nd - a.size())];
    const std::size_t db = i < nd - b.size() ? 1 : b[i - (nd - b.size())];
    if (da != db && da != 1 && db != 1) {
      shape_error(op, "cannot broadcast " + shape_str(a) + " with " + shape_str(b));
    }
    out[i] = da == 1 ? db : da;
  }
  return out;
}

// Element strides of `s` laid against `out`, zero on broadcast dimensions.
std::vector<std::size_t> aligned_strides(const Shape& s, const Shape& out) {
  std::vector<std::size_t> st(out.size(), 0);
  std::size_t stride = 1;
  for (std::size_t i = s.size(); i-- > 0;) {
    const std::size_t o = i + (out.size() - s.size());
    st[o] = s[i] == 1 ? 0 : stride;
    stride *= s[i];
  }
  return st;
}

template <class F>
void for_each_broadcast(const Shape& out, const std::vector<std::size_t>& sa, const std::vector<std::size_t>& sb,
                        F&& f) {
  const std::size_t n = shape_numel(out);
  if (n == 0) return;
  const std::size_t nd = out.size();
  if (nd == 0) {
    f(0, 0, 0);
    return;
  }
  std::vector<std::size_t> idx(nd, 0);
  std::size_t ia = 0, ib = 0;
  const std::size_t inner = out[nd - 1];
  const std::size_t ia_step = sa[nd - 1], ib_step = sb[nd - 1];
  for (std::size_t o = 0; o < n; o += inner) {
    for (std::size_t k = 0; k < inner; ++k) f(o + k, ia + k * ia_step, ib + k * ib_step);
    for (std::size_t d = nd - 1; d-- > 0;) {
      ++idx[d];
      ia += sa[d];
      ib += sb[d];
      if (idx[d] < out[d]) break;
      ia -= sa[d] * out[d];
      ib -= sb[d] * out[d];
      idx[d] = 0;
    }
  }
}

inline cplx load(const double* d, bool cx, std::size_t i) { return cx ? cplx{d[2 * i], d[2 * i + 1]} : cplx{d[i], 0.0}; }

inline void accumulate(double* g, bool cx, std::size_t i, cplx v) {
  if (cx) {
    g[2 * i] += v.real();
    g[2 * i + 1] += v.imag();
  } else {
    g[i] += v.real();
  }
}

enum class BinOp { Add, Sub, Mul, Div };

const char* bin_name(BinOp op) {
  switch (op) {
    case BinOp::Add: return "add";
    case BinOp::Sub: return "sub";
    case BinOp::Mul: return "mul";
    case BinOp::Div: return "div";
  }
  return "?";
}

Tensor binary(BinOp op, const Tensor& a, const Tensor& b) {
  const char* name = bin_name(op);
  if (!a.defined() || !b.defined()) shape_error(name, "undefined operand");
  const Shape out_shape = broadcast_shape(name, a.shape(), b.shape());
  const auto sa = aligned_strides(a.shape(), out_shape);
  const auto sb = aligned_strides(b.shape(), out_shape);
  const std::size_t n = shape_numel(out_shape);
  const bool ca = a.is_complex(), cb = b.is_complex();
  const bool cx = ca || cb;
  const double* pa = a.data().data();
  const double* pb = b.data().data();

  if (!cx) {
    std::vector<double> out(n);
    const bool same = a.shape() == b.shape();
    auto apply = [&](std::size_t o, std::size_t ia, std::size_t ib) {
      const double x = pa[ia], y = pb[ib];
      switch (op) {
        case BinOp::Add: out[o] = x + y; break;
        case BinOp::Sub: out[o] = x - y; break;
        case BinOp::Mul: out[o] = x * y; break;
        case BinOp::Div: out[o] = x / y; break;
      }
    };
    if (same) {
      for (std::size_t i = 0; i < n; ++i) apply(i, i, i);
    } else {
      for_each_broadcast(out_shape, sa, sb, apply);
    }
    Tensor result = Tensor::real(out_shape, std::move(out));
    Tensor ac = a.detach(), bc = b.detach();
    return Tape::record(name, std::move(result), {&a, &b},
                        [op, ac, bc, out_shape, sa, sb, same](std::span<const double> g, std::span<double* const> gin) {
                          const double* xa = ac.data().data();
                          const double* xb = bc.data().data();
                          double* ga = gin[0];
                          double* gb = gin[1];
                          auto back = [&](std::size_t o, std::size_t ia, std::size_t ib) {
                            const double go = g[o];
                            switch (op) {
                              case BinOp::Add:
                                if (ga) ga[ia] += go;
                                if (gb) gb[ib] += go;
                                break;
                              case BinOp::Sub:
                                if (ga) ga[ia] += go;
                                if (gb) gb[ib] -= go;
                                break;
                              case BinOp::Mul:
                                if (ga) ga[ia] += go * xb[ib];
                                if (gb) gb[ib] += go * xa[ia];
                                break;
                              case BinOp::Div:
                                if (ga) ga[ia] += go / xb[ib];
                                if (gb) gb[ib] -= go * xa[ia] / (xb[ib] * xb[ib]);
                                break;
                            }
                          };
                          if (same) {
                            for (std::size_t i = 0; i < g.size(); ++i) back(i, i, i);
                          } else {
                            for_each_broadcast(out_shape, sa, sb, back);
                          }
                        });
  }

  std::vector<double> out(2 * n);
  for_each_broadcast(out_shape, sa, sb, [&](std::size_t o, std::size_t ia, std::size_t ib) {
    const cplx x = load(pa, ca, ia), y = load(pb, cb, ib);
    cplx z;
    switch (op) {
      case BinOp::Add: z = x + y; break;
      case BinOp::Sub: z = x - y; break;
      case BinOp::Mul: z = x * y; break;
      case BinOp::Div: z = x / y; break;
    }
    out[2 * o] = z.real();
    out[2 * o + 1] = z.imag();
  });
  Tensor result = Tensor::complex(out_shape, std::move(out));
  Tensor ac = a.detach(), bc = b.detach();
  return Tape::record(name, std::move(result), {&a, &b},
                      [op, ac, bc, out_shape, sa, sb, ca, cb](std::span<const double> g, std::span<double* const> gin) {
                        const double* xa = ac.data().data();
                        const double* xb = bc.data().data();
                        double* ga = gin[0];
                        double* gb = gin[1];
                        for_each_broadcast(out_shape, sa, sb, [&](std::size_t o, std::size_t ia, std::size_t ib) {
                          const cplx go{g[2 * o], g[2 * o + 1]};
                          const cplx x = load(xa, ca, ia), y = load(xb, cb, ib);
                          switch (op) {
                            case BinOp::Add:
                              if (ga) accumulate(ga, ca, ia, go);
                              if (gb) accumulate(gb, cb, ib, go);
                              break;
                            case BinOp::Sub:
                              if (ga) accumulate(ga, ca, ia, go);
                              if (gb) accumulate(gb, cb, ib, -go);
                              break;
                            case BinOp::Mul:
                              if (ga) accumulate(ga, ca, ia, go * std::conj(y));
                              if (gb) accumulate(gb, cb, ib, go * std::conj(x));
                              break;
                            case BinOp::Div: {
                              const cplx z = x / y;
                              if (ga) accumulate(ga, ca, ia, go / std::conj(y));
                              if (gb) accumulate(gb, cb, ib, -go * std::conj(z / y));
                              break;
                            }
                          }
                        });
                      });
}

void require_real(const char* op, const Tensor& x) {
  if (!x.defined()) shape_error(op, "undefined operand");
  if (x.is_complex()) shape_error(op, "expects a real tensor, got complex " + shape_str(x.shape()));
}

void require_complex(const char* op, const Tensor& x) {
  if (!x.defined()) shape_error(op, "undefined operand");
  if (!x.is_complex()) shape_error(op, "expects a complex tensor, got real " + shape_str(x.shape()));
}

// y = f(x) elementwise on a real tensor; dydx(x, y) gives the local slope.
template <class F, class D>
Tensor unary_real(const char* op, const Tensor& x, F f, D dydx) {
  require_real(op, x);
  auto xd = x.data();
  std::vector<double> out(xd.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(xd[i]);
  Tensor result = Tensor::real(x.shape(), std::move(out));
  if (!x.requires_grad()) return result;
  Tensor xc = x.detach(), yc = result.detach();
  return Tape::record(op, std::move(result), {&x}, [xc, yc, dydx](std::span<const double> g, std::span<double* const> gin) {
    auto xv = xc.data();
    auto yv = yc.data();
    double* gx = gin[0];
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * dydx(xv[i], yv[i]);
  });
}

Tensor make_like(const Shape& shape, bool cx, std::vector<double> raw) {
  return cx ? Tensor::complex(shape, std::move(raw)) : Tensor::real(shape, std::move(raw));
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) { return binary(BinOp::Add, a, b); }
Tensor sub(const Tensor& a, const Tensor& b) { return binary(BinOp::Sub, a, b); }
Tensor mul(const Tensor& a, const Tensor& b) { return binary(BinOp::Mul, a, b); }
Tensor div(const Tensor& a, const Tensor& b) { return binary(BinOp::Div, a, b); }

Tensor scale(const Tensor& x, double factor) {
  if (!x.defined()) shape_error("scale", "undefined operand");
  auto xd = x.data();
  std::vector<double> out(xd.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = xd[i] * factor;
  Tensor result = make_like(x.shape(), x.is_complex(), std::move(out));
  return Tape::record("scale", std::move(result), {&x}, [factor](std::span<const double> g, std::span<double* const> gin) {
    for (std::size_t i = 0; i < g.size(); ++i) gin[0][i] += g[i] * factor;
  });
}

Tensor neg(const Tensor& x) { return scale(x, -1.0); }

Tensor add_scalar(const Tensor& x, double offset) {
  if (!x.defined()) shape_error("add_scalar", "undefined operand");
  auto xd = x.data();
  std::vector<double> out(xd.begin(), xd.end());
  const std::size_t step = x.is_complex() ? 2 : 1;
  for (std::size_t i = 0; i < out.size(); i += step) out[i] += offset;
  Tensor result = make_like(x.shape(), x.is_complex(), std::move(out));
  return Tape::record("add_scalar", std::move(result), {&x}, [](std::span<const double> g, std::span<double* const> gin) {
    for (std::size_t i = 0; i < g.size(); ++i) gin[0][i] += g[i];
  });
}

Tensor exp(const Tensor& x) {
  return unary_real("exp", x, [](double v) { return std::exp(v); }, [](double, double y) { return y; });
}

Tensor log(const Tensor& x) {
  return unary_real("log", x, [](double v) { return std::log(v); }, [](double v, double) { return 1.0 / v; });
}

Tensor sqrt(const Tensor& x) {
  return unary_real("sqrt", x, [](double v) { return std::sqrt(v); }, [](double, double y) { return 0.5 / y; });
}

Tensor sigmoid(const Tensor& x) {
  return unary_real(
      "sigmoid", x,
      [](double v) {
        if (v >= 0) return 1.0 / (1.0 + std::exp(-v));
        const double e = std::exp(v);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor relu(const Tensor& x) {
  return unary_real("relu", x, [](double v) { return v > 0 ? v : 0.0; }, [](double v, double) { return v > 0 ? 1.0 : 0.0; });
}

Tensor clamp_min(const Tensor& x, double floor) {
  return unary_real(
      "clamp_min", x, [floor](double v) { return v > floor ? v : floor; },
      [floor](double v, double) { return v > floor ? 1.0 : 0.0; });
}

Tensor clamp(const Tensor& x, double lo, double hi) {
  return unary_real(
      "clamp", x, [lo, hi](double v) { return v < lo ? lo : (v > hi ? hi : v); },
      [lo, hi](double v, double) { return (v > lo && v < hi) ? 1.0 : 0.0; });
}

Tensor softplus(const Tensor& x) {
  return unary_real(
      "softplus", x, [](double v) { return std::max(v, 0.0) + std::log1p(std::exp(-std::abs(v))); },
      [](double v, double) {
        if (v >= 0) return 1.0 / (1.0 + std::exp(-v));
        const double e = std::exp(v);
        return e / (1.0 + e);
      });
}

Tensor abs2(const Tensor& z) {
  if (!z.defined()) shape_error("abs2", "undefined operand");
  if (!z.is_complex()) return mul(z, z);
  auto zd = z.data();
  std::vector<double> out(z.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = zd[2 * i] * zd[2 * i] + zd[2 * i + 1] * zd[2 * i + 1];
  Tensor result = Tensor::real(z.shape(), std::move(out));
  Tensor zc = z.detach();
  return Tape::record("abs2", std::move(result), {&z}, [zc](std::span<const double> g, std::span<double* const> gin) {
    auto zv = zc.data();
    for (std::size_t i = 0; i < g.size(); ++i) {
      gin[0][2 * i] += 2.0 * zv[2 * i] * g[i];
      gin[0][2 * i + 1] += 2.0 * zv[2 * i + 1] * g[i];
    }
  });
}

Tensor conj(const Tensor& z) {
  require_complex("conj", z);
  auto zd = z.data();
  std::vector<double> out(zd.begin(), zd.end());
  for (std::size_t i = 1; i < out.size(); i += 2) out[i] = -out[i];
  Tensor result = Tensor::complex(z.shape(), std::move(out));
  return Tape::record("conj", std::move(result), {&z}, [](std::span<const double> g, std::span<double* const> gin) {
    for (std::size_t i = 0; i < g.size(); i += 2) {
      gin[0][i] += g[i];
      gin[0][i + 1] -= g[i + 1];
    }
  });
}

Tensor real_part(const Tensor& z) {
  require_complex("real_part", z);
  Tensor result = real_values(z);
  return Tape::record("real_part", std::move(result), {&z}, [](std::span<const double> g, std::span<double* const> gin) {
    for (std::size_t i = 0; i < g.size(); ++i) gin[0][2 * i] += g[i];
  });
}

Tensor imag_part(const Tensor& z) {
  require_complex("imag_part", z);
  Tensor result = imag_values(z);
  return Tape::record("imag_part", std::move(result), {&z}, [](std::span<const double> g, std::span<double* const> gin) {
    for (std::size_t i = 0; i < g.size(); ++i) gin[0][2 * i + 1] += g[i];
  });
}

Tensor make_complex(const Tensor& re, const Tensor& im) {
  require_real("make_complex", re);
  require_real("make_complex", im);
  if (re.shape() != im.shape()) {
    shape_error("make_complex", "real part " + shape_str(re.shape()) + " vs imaginary part " + shape_str(im.shape()));
  }
  auto r = re.data();
  auto i = im.data();
  std::vector<double> out(2 * re.numel());
  for (std::size_t k = 0; k < re.numel(); ++k) {
    out[2 * k] = r[k];
    out[2 * k + 1] = i[k];
  }
  Tensor result = Tensor::complex(re.shape(), std::move(out));
  return Tape::record("make_complex", std::move(result), {&re, &im},
                      [](std::span<const double> g, std::span<double* const> gin) {
                        const std::size_t n = g.size() / 2;
                        if (gin[0])
                          for (std::size_t k = 0; k < n; ++k) gin[0][k] += g[2 * k];
                        if (gin[1])
                          for (std::size_t k = 0; k < n; ++k) gin[1][k] += g[2 * k + 1];
                      });
}

Tensor to_complex(const Tensor& x) {
  if (x.is_complex()) return x;
  require_real("to_complex", x);
  auto xd = x.data();
  std::vector<double> out(2 * x.numel(), 0.0);
  for (std::size_t k = 0; k < x.numel(); ++k) out[2 * k] = xd[k];
  Tensor result = Tensor::complex(x.shape(), std::move(out));
  return Tape::record("to_complex", std::move(result), {&x}, [](std::span<const double> g, std::span<double* const> gin) {
    for (std::size_t k = 0; k < g.size() / 2; ++k) gin[0][k] += g[2 * k];
  });
}

Tensor expj(const Tensor& theta) {
  require_real("expj", theta);
  auto t = theta.data();
  std::vector<double> out(2 * theta.numel());
  for (std::size_t k = 0; k < theta.numel(); ++k) {
    out[2 * k] = std::cos(t[k]);
    out[2 * k + 1] = std::sin(t[k]);
  }
  Tensor result = Tensor::complex(theta.shape(), std::move(out));
  Tensor zc = result.detach();
  return Tape::record("expj", std::move(result), {&theta}, [zc](std::span<const double> g, std::span<double* const> gin) {
    auto z = zc.data();
    for (std::size_t k = 0; k < g.size() / 2; ++k) gin[0][k] += -g[2 * k] * z[2 * k + 1] + g[2 * k + 1] * z[2 * k];
  });
}

Tensor as_planes(const Tensor& z) {
  require_complex("as_planes", z);
  Shape s = z.shape();
  s.push_back(2);
  auto zd = z.data();
  Tensor result = Tensor::real(s, std::vector<double>(zd.begin(), zd.end()));
  return Tape::record("as_planes", std::move(result), {&z}, [](std::span<const double> g, std::span<double* const> gin) {
    for (std::size_t i = 0; i < g.size(); ++i) gin[0][i] += g[i];
  });
}

Tensor sum(const Tensor& x) {
  if (!x.defined()) shape_error("sum", "undefined operand");
  auto xd = x.data();
  Tensor result;
  if (x.is_complex()) {
    double re = 0, im = 0;
    for (std::size_t i = 0; i < xd.size(); i += 2) {
      re += xd[i];
      im += xd[i + 1];
    }
    result = Tensor::complex({}, std::vector<double>{re, im});
  } else {
    double s = 0;
    for (double v : xd) s += v;
    result = Tensor::scalar(s);
  }
  const bool cx = x.is_complex();
  const std::size_t raw = xd.size();
  return Tape::record("sum", std::move(result), {&x}, [cx, raw](std::span<const double> g, std::span<double* const> gin) {
    double* gx = gin[0];
    if (cx) {
      for (std::size_t i = 0; i < raw; i += 2) {
        gx[i] += g[0];
        gx[i + 1] += g[1];
      }
    } else {
      for (std::size_t i = 0; i < raw; ++i) gx[i] += g[0];
    }
  });
}

Tensor mean(const Tensor& x) {
  if (x.numel() == 0) shape_error("mean", "empty tensor");
  return scale(sum(x), 1.0 / static_cast<double>(x.numel()));
}

Tensor sum_axis(const Tensor& x, std::size_t axis) {
  if (!x.defined()) shape_error("sum_axis", "undefined operand");
  if (axis >= x.ndim()) shape_error("sum_axis", "axis " + std::to_string(axis) + " out of range for " + shape_str(x.shape()));
  const Shape& s = x.shape();
  std::size_t outer = 1, inner = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= s[i];
  for (std::size_t i = axis + 1; i < s.size(); ++i) inner *= s[i];
  const std::size_t len = s[axis];
  const std::size_t w = x.is_complex() ? 2 : 1;
  Shape out_shape;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (i != axis) out_shape.push_back(s[i]);
  auto xd = x.data();
  std::vector<double> out(outer * inner * w, 0.0);
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t l = 0; l < len; ++l) {
      const double* src = xd.data() + ((o * len + l) * inner) * w;
      double* dst = out.data() + o * inner * w;
      for (std::size_t k = 0; k < inner * w; ++k) dst[k] += src[k];
    }
  Tensor result = make_like(out_shape, x.is_complex(), std::move(out));
  return Tape::record("sum_axis", std::move(result), {&x},
                      [outer, inner, len, w](std::span<const double> g, std::span<double* const> gin) {
                        for (std::size_t o = 0; o < outer; ++o)
                          for (std::size_t l = 0; l < len; ++l) {
                            double* dst = gin[0] + ((o * len + l) * inner) * w;
                            const double* src = g.data() + o * inner * w;
                            for (std::size_t k = 0; k < inner * w; ++k) dst[k] += src[k];
                          }
                      });
}

Tensor reshape(const Tensor& x, Shape shape) {
  if (!x.defined()) shape_error("reshape", "undefined operand");
  if (shape_numel(shape) != x.numel()) {
    shape_error("reshape", "cannot reshape " + shape_str(x.shape()) + " to " + shape_str(shape));
  }
  auto xd = x.data();
  Tensor result = make_like(shape, x.is_complex(), std::vector<double>(xd.begin(), xd.end()));
  return Tape::record("reshape", std::move(result), {&x}, [](std::span<const double> g, std::span<double* const> gin) {
    for (std::size_t i = 0; i < g.size(); ++i) gin[0][i] += g[i];
  });
}

Tensor index_select(const Tensor& x, std::size_t axis, const std::vector<std::size_t>& indices) {
  if (!x.defined()) shape_error("index_select", "undefined operand");
  if (axis >= x.ndim()) shape_error("index_select", "axis out of range for " + shape_str(x.shape()));
  const Shape& s = x.shape();
  for (auto i : indices)
    if (i >= s[axis]) shape_error("index_select", "index " + std::to_string(i) + " out of range for axis size " + std::to_string(s[axis]));
  std::size_t outer = 1, inner = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= s[i];
  for (std::size_t i = axis + 1; i < s.size(); ++i) inner *= s[i];
  const std::size_t w = x.is_complex() ? 2 : 1;
  const std::size_t len = s[axis];
  Shape out_shape = s;
  out_shape[axis] = indices.size();
  auto xd = x.data();
  std::vector<double> out(outer * indices.size() * inner * w);
  const std::size_t blk = inner * w;
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t j = 0; j < indices.size(); ++j)
      std::copy_n(xd.data() + (o * len + indices[j]) * blk, blk, out.data() + (o * indices.size() + j) * blk);
  Tensor result = make_like(out_shape, x.is_complex(), std::move(out));
  return Tape::record("index_select", std::move(result), {&x},
                      [outer, len, blk, indices](std::span<const double> g, std::span<double* const> gin) {
                        for (std::size_t o = 0; o < outer; ++o)
                          for (std::size_t j = 0; j < indices.size(); ++j) {
                            double* dst = gin[0] + (o * len + indices[j]) * blk;
                            const double* src = g.data() + (o * indices.size() + j) * blk;
                            for (std::size_t k = 0; k < blk; ++k) dst[k] += src[k];
                          }
                      });
}

Tensor slice(const Tensor& x, std::size_t axis, std::size_t begin, std::size_t end) {
  if (axis >= x.ndim() || begin > end || end > x.dim(axis)) {
    shape_error("slice", "range [" + std::to_string(begin) + ", " + std::to_string(end) + ") invalid for " +
                             shape_str(x.shape()));
  }
  std::vector<std::size_t> idx(end - begin);
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = begin + i;
  return index_select(x, axis, idx);
}

Tensor concat(const std::vector<Tensor>& parts, std::size_t axis) {
  if (parts.empty()) shape_error("concat", "no inputs");
  const Tensor& first = parts.front();
  if (axis >= first.ndim()) shape_error("concat", "axis out of range for " + shape_str(first.shape()));
  const bool cx = first.is_complex();
  Shape out_shape = first.shape();
  out_shape[axis] = 0;
  for (const auto& p : parts) {
    if (p.is_complex() != cx || p.ndim() != first.ndim()) shape_error("concat", "mixed dtypes or ranks");
    for (std::size_t i = 0; i < p.ndim(); ++i)
      if (i != axis && p.dim(i) != first.dim(i))
        shape_error("concat", "shape " + shape_str(p.shape()) + " incompatible with " + shape_str(first.shape()));
    out_shape[axis] += p.dim(axis);
  }
  std::size_t outer = 1, inner = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= out_shape[i];
  for (std::size_t i = axis + 1; i < out_shape.size(); ++i) inner *= out_shape[i];
  const std::size_t w = cx ? 2 : 1;
  const std::size_t out_len = out_shape[axis];
  std::vector<double> out(shape_numel(out_shape) * w);
  std::vector<std::size_t> offsets, lens;
  std::size_t off = 0;
  for (const auto& p : parts) {
    offsets.push_back(off);
    lens.push_back(p.dim(axis));
    auto pd = p.data();
    const std::size_t blk = p.dim(axis) * inner * w;
    for (std::size_t o = 0; o < outer; ++o)
      std::copy_n(pd.data() + o * blk, blk, out.data() + (o * out_len + off) * inner * w);
    off += p.dim(axis);
  }
  Tensor result = make_like(out_shape, cx, std::move(out));
  std::vector<const Tensor*> inputs;
  for (const auto& p : parts) inputs.push_back(&p);
  return Tape::record("concat", std::move(result), inputs,
                      [outer, inner, w, out_len, offsets, lens](std::span<const double> g, std::span<double* const> gin) {
                        for (std::size_t k = 0; k < gin.size(); ++k) {
                          if (!gin[k]) continue;
                          const std::size_t blk = lens[k] * inner * w;
                          for (std::size_t o = 0; o < outer; ++o) {
                            const double* src = g.data() + (o * out_len + offsets[k]) * inner * w;
                            double* dst = gin[k] + o * blk;
                            for (std::size_t i = 0; i < blk; ++i) dst[i] += src[i];
                          }
                        }
                      });
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (!a.defined() || !b.defined()) shape_error("matmul", "undefined operand");
  if (a.ndim() < 2 || b.ndim() < 2) {
    shape_error("matmul", "needs rank >= 2 operands, got " + shape_str(a.shape()) + " and " + shape_str(b.shape()));
  }
  const std::size_t m = a.dim(a.ndim() - 2), k = a.dim(a.ndim() - 1);
  const std::size_t k2 = b.dim(b.ndim() - 2), n = b.dim(b.ndim() - 1);
  if (k != k2) shape_error("matmul", "inner dimensions differ: " + shape_str(a.shape()) + " x " + shape_str(b.shape()));
  const Shape ba(a.shape().begin(), a.shape().end() - 2);
  const Shape bb(b.shape().begin(), b.shape().end() - 2);
  if (!ba.empty() && !bb.empty() && ba != bb) {
    shape_error("matmul", "batch dimensions differ: " + shape_str(a.shape()) + " x " + shape_str(b.shape()));
  }
  const Shape batch = ba.empty() ? bb : ba;
  const std::size_t nb = shape_numel(batch);
  const std::size_t sa = ba.empty() ? 0 : m * k;
  const std::size_t sb = bb.empty() ? 0 : k * n;
  Shape out_shape = batch;
  out_shape.push_back(m);
  out_shape.push_back(n);
  const bool ca = a.is_complex(), cb = b.is_complex(), cx = ca || cb;
  const double* pa = a.data().data();
  const double* pb = b.data().data();

  if (!cx) {
    std::vector<double> out(nb * m * n, 0.0);
    for (std::size_t q = 0; q < nb; ++q) {
      const double* A = pa + q * sa;
      const double* B = pb + q * sb;
      double* C = out.data() + q * m * n;
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t p = 0; p < k; ++p) {
          const double av = A[i * k + p];
          const double* brow = B + p * n;
          double* crow = C + i * n;
          for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
    Tensor result = Tensor::real(out_shape, std::move(out));
    Tensor ac = a.detach(), bc = b.detach();
    return Tape::record("matmul", std::move(result), {&a, &b},
                        [ac, bc, nb, m, k, n, sa, sb](std::span<const double> g, std::span<double* const> gin) {
                          const double* A0 = ac.data().data();
                          const double* B0 = bc.data().data();
                          for (std::size_t q = 0; q < nb; ++q) {
                            const double* A = A0 + q * sa;
                            const double* B = B0 + q * sb;
                            const double* G = g.data() + q * m * n;
                            if (gin[0]) {
                              double* GA = gin[0] + q * sa;
                              for (std::size_t i = 0; i < m; ++i)
                                for (std::size_t p = 0; p < k; ++p) {
                                  double s = 0;
                                  for (std::size_t j = 0; j < n; ++j) s += G[i * n + j] * B[p * n + j];
                                  GA[i * k + p] += s;
                                }
                            }
                            if (gin[1]) {
                              double* GB = gin[1] + q * sb;
                              for (std::size_t i = 0; i < m; ++i)
                                for (std::size_t p = 0; p < k; ++p) {
                                  const double av = A[i * k + p];
                                  for (std::size_t j = 0; j < n; ++j) GB[p * n + j] += av * G[i * n + j];
                                }
                            }
                          }
                        });
  }

  std::vector<double> out(2 * nb * m * n, 0.0);
  for (std::size_t q = 0; q < nb; ++q) {
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t p = 0; p < k; ++p) {
        const cplx av = load(pa, ca, q * sa + i * k + p);
        for (std::size_t j = 0; j < n; ++j) {
          const cplx prod = av * load(pb, cb, q * sb + p * n + j);
          const std::size_t o = q * m * n + i * n + j;
          out[2 * o] += prod.real();
          out[2 * o + 1] += prod.imag();
        }
      }
  }
  Tensor result = Tensor::complex(out_shape, std::move(out));
  Tensor ac = a.detach(), bc = b.detach();
  return Tape::record("matmul", std::move(result), {&a, &b},
                      [ac, bc, nb, m, k, n, sa, sb, ca, cb](std::span<const double> g, std::span<double* const> gin) {
                        const double* A0 = ac.data().data();
                        const double* B0 = bc.data().data();
                        for (std::size_t q = 0; q < nb; ++q) {
                          for (std::size_t i = 0; i < m; ++i)
                            for (std::size_t p = 0; p < k; ++p) {
                              const cplx av = load(A0, ca, q * sa + i * k + p);
                              cplx ga{0, 0};
                              for (std::size_t j = 0; j < n; ++j) {
                                const std::size_t o = q * m * n + i * n + j;
                                const cplx go{g[2 * o], g[2 * o + 1]};
                                const cplx bv = load(B0, cb, q * sb + p * n + j);
                                ga += go * std::conj(bv);
                                if (gin[1]) accumulate(gin[1], cb, q * sb + p * n + j, std::conj(av) * go);
                              }
                              if (gin[0]) accumulate(gin[0], ca, q * sa + i * k + p, ga);
                            }
                        }
                      });
}

Tensor dft_matrix(std::size_t n) {
  std::vector<cplx> f(n * n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t t = 0; t < n; ++t) {
      const double ang = -2.0 * std::numbers::pi * static_cast<double>((k * t) % n) / static_cast<double>(n);
      f[k * n + t] = {std::cos(ang), std::sin(ang)};
    }
  return Tensor::complex({n, n}, f);
}

Tensor dft(const Tensor& x) {
  if (x.ndim() < 1) shape_error("dft", "needs rank >= 1");
  const std::size_t n = x.dim(x.ndim() - 1);
  const std::size_t rows = x.numel() / std::max<std::size_t>(n, 1);
  // F is symmetric, so x F^T = x F.
  Tensor y = matmul(reshape(x, {rows, n}), dft_matrix(n));
  return reshape(y, x.shape());
}

}  // namespace rxprobe::ad
