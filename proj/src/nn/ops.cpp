// src/nn/ops.cpp

// Copyright 2026 The medleysep Authors

// See the top-level LICENSE file for the full license text.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "medleysep/nn/ops.h"

#include <cmath>
#include <stdexcept>

namespace medleysep::nn {
namespace {

// The spectrogram carries a rate; nothing here depends on it.
constexpr int kNominalRate = 16000;

using ArrayMap = Eigen::Map<Eigen::ArrayXd>;
using ConstArrayMap = Eigen::Map<const Eigen::ArrayXd>;

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

MatrixMap as_matrix(Eigen::ArrayXd& a, std::size_t rows, std::size_t cols) {
  return {a.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols)};
}
ConstMatrixMap as_matrix(const Eigen::ArrayXd& a, std::size_t rows, std::size_t cols) {
  return {a.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols)};
}

bool needs(const Node* n) { return n && n->requires_grad; }

// Elementwise op with derivative given as a function of (x, y).
template <class F, class D>
Var unary(const Var& x, F f, D df) {
  Eigen::ArrayXd y = x->value.unaryExpr(f);
  return make_result(x->shape, y, {x}, [xp = x.get(), df](Node& self) {
    for (Eigen::Index i = 0; i < self.value.size(); ++i) xp->grad[i] += self.grad[i] * df(xp->value[i], self.value[i]);
  });
}

void check_same(const Var& a, const Var& b, const char* what) {
  require(a->shape == b->shape, std::string(what) + ": shapes differ " + shape_string(a->shape) + " vs " +
                                    shape_string(b->shape));
}

}  // namespace

Var conv1x1(const Var& x, const Var& w, const Var& b) {
  const std::size_t cin = x->channels(), len = x->inner();
  require(w->shape.size() == 2 && w->shape[1] == cin,
          "conv1x1: weight " + shape_string(w->shape) + " does not match input " + shape_string(x->shape));
  const std::size_t cout = w->shape[0];
  if (b) require(b->shape == Shape{cout}, "conv1x1: bias shape");
  Eigen::ArrayXd y(cout * len);
  auto Y = as_matrix(y, cout, len);
  const auto W = as_matrix(w->value, cout, cin);
  Y.noalias() = W * x->matrix();
  if (b) Y.colwise() += b->value.matrix();
  Shape s = x->shape;
  s[0] = cout;
  return make_result(s, std::move(y), {x, w, b}, [xp = x.get(), wp = w.get(), bp = b.get(), cin, cout, len](Node& self) {
    const auto dY = as_matrix(self.grad, cout, len);
    if (needs(wp)) as_matrix(wp->grad, cout, cin).noalias() += dY * xp->matrix().transpose();
    if (needs(bp)) bp->grad += dY.rowwise().sum().array();
    if (needs(xp)) as_matrix(xp->grad, cin, len).noalias() += as_matrix(wp->value, cout, cin).transpose() * dY;
  });
}

Var depthwise_conv1d(const Var& x, const Var& w, const Var& b, std::size_t dilation) {
  require(x->shape.size() == 2, "depthwise_conv1d: expected [C, T] input");
  const std::size_t C = x->shape[0], T = x->shape[1];
  require(w->shape.size() == 2 && w->shape[0] == C && w->shape[1] % 2 == 1, "depthwise_conv1d: weight shape");
  const std::size_t K = w->shape[1];
  require(dilation >= 1, "depthwise_conv1d: dilation must be positive");
  if (b) require(b->shape == Shape{C}, "depthwise_conv1d: bias shape");
  const auto half = static_cast<long>(K / 2);
  const auto len = static_cast<long>(T);
  // Valid output range [t0, t1) for tap k reading x[t + off].
  auto range = [len](long off) { return std::pair<long, long>{std::max(0L, -off), std::min(len, len - off)}; };

  Eigen::ArrayXd y = Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(C * T));
  for (std::size_t c = 0; c < C; ++c) {
    const double* xr = x->value.data() + c * T;
    double* yr = y.data() + c * T;
    for (std::size_t k = 0; k < K; ++k) {
      const long off = (static_cast<long>(k) - half) * static_cast<long>(dilation);
      const auto [t0, t1] = range(off);
      if (t1 <= t0) continue;
      ArrayMap(yr + t0, t1 - t0) += w->value[c * K + k] * ConstArrayMap(xr + t0 + off, t1 - t0);
    }
    if (b) ArrayMap(yr, len) += b->value[c];
  }
  return make_result(x->shape, std::move(y), {x, w, b},
                     [xp = x.get(), wp = w.get(), bp = b.get(), C, T, K, half, dilation, range](Node& self) {
    const auto len = static_cast<long>(T);
    for (std::size_t c = 0; c < C; ++c) {
      const double* gr = self.grad.data() + c * T;
      const double* xr = xp->value.data() + c * T;
      if (needs(bp)) bp->grad[c] += ConstArrayMap(gr, len).sum();
      for (std::size_t k = 0; k < K; ++k) {
        const long off = (static_cast<long>(k) - half) * static_cast<long>(dilation);
        const auto [t0, t1] = range(off);
        if (t1 <= t0) continue;
        const ConstArrayMap g(gr + t0, t1 - t0);
        if (needs(wp)) wp->grad[c * K + k] += (g * ConstArrayMap(xr + t0 + off, t1 - t0)).sum();
        if (needs(xp)) ArrayMap(xp->grad.data() + c * T + t0 + off, t1 - t0) += wp->value[c * K + k] * g;
      }
    }
  });
}

Var depthwise_conv2d(const Var& x, const Var& w, const Var& b) {
  require(x->shape.size() == 3, "depthwise_conv2d: expected [C, F, T] input");
  const std::size_t C = x->shape[0], F = x->shape[1], T = x->shape[2];
  require(w->shape.size() == 3 && w->shape[0] == C && w->shape[1] % 2 == 1 && w->shape[2] % 2 == 1,
          "depthwise_conv2d: weight shape");
  if (b) require(b->shape == Shape{C}, "depthwise_conv2d: bias shape");
  const std::size_t KF = w->shape[1], KT = w->shape[2];

  // Calls fn(c, tap index, output offset, input offset, run length) for every
  // contiguous run of valid (f, t) pairs.
  auto for_each_run = [C, F, T, KF, KT](auto&& fn) {
    const long hf = static_cast<long>(KF / 2), ht = static_cast<long>(KT / 2);
    const long lf = static_cast<long>(F), lt = static_cast<long>(T);
    for (std::size_t c = 0; c < C; ++c)
      for (std::size_t kf = 0; kf < KF; ++kf) {
        const long of = static_cast<long>(kf) - hf;
        for (std::size_t kt = 0; kt < KT; ++kt) {
          const long ot = static_cast<long>(kt) - ht;
          const long t0 = std::max(0L, -ot), t1 = std::min(lt, lt - ot);
          if (t1 <= t0) continue;
          const std::size_t tap = (c * KF + kf) * KT + kt;
          for (long f = std::max(0L, -of); f < std::min(lf, lf - of); ++f) {
            const std::size_t out = c * F * T + static_cast<std::size_t>(f * lt + t0);
            const std::size_t in = c * F * T + static_cast<std::size_t>((f + of) * lt + t0 + ot);
            fn(c, tap, out, in, t1 - t0);
          }
        }
      }
  };

  Eigen::ArrayXd y = Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(C * F * T));
  for_each_run([&](std::size_t, std::size_t tap, std::size_t out, std::size_t in, long n) {
    ArrayMap(y.data() + out, n) += w->value[tap] * ConstArrayMap(x->value.data() + in, n);
  });
  if (b)
    for (std::size_t c = 0; c < C; ++c) ArrayMap(y.data() + c * F * T, static_cast<long>(F * T)) += b->value[c];

  return make_result(x->shape, std::move(y), {x, w, b},
                     [xp = x.get(), wp = w.get(), bp = b.get(), C, F, T, for_each_run](Node& self) {
    if (needs(bp))
      for (std::size_t c = 0; c < C; ++c) bp->grad[c] += ConstArrayMap(self.grad.data() + c * F * T, static_cast<long>(F * T)).sum();
    for_each_run([&](std::size_t, std::size_t tap, std::size_t out, std::size_t in, long n) {
      const ConstArrayMap g(self.grad.data() + out, n);
      if (needs(wp)) wp->grad[tap] += (g * ConstArrayMap(xp->value.data() + in, n)).sum();
      if (needs(xp)) ArrayMap(xp->grad.data() + in, n) += wp->value[tap] * g;
    });
  });
}

Var conv2d(const Var& x, const Var& w, const Var& b) {
  require(x->shape.size() == 3, "conv2d: expected [C, F, T] input");
  const std::size_t cin = x->shape[0], F = x->shape[1], T = x->shape[2];
  require(w->shape.size() == 4 && w->shape[1] == cin && w->shape[2] % 2 == 1 && w->shape[3] % 2 == 1,
          "conv2d: weight shape");
  const std::size_t cout = w->shape[0], KF = w->shape[2], KT = w->shape[3];
  if (b) require(b->shape == Shape{cout}, "conv2d: bias shape");
  const std::size_t rows = cin * KF * KT, cols = F * T;

  // im2col: col[(ci, kf, kt), (f, t)] = x[ci, f + kf - KF/2, t + kt - KT/2].
  auto scatter = [cin, F, T, KF, KT](auto&& fn) {
    const long hf = static_cast<long>(KF / 2), ht = static_cast<long>(KT / 2);
    for (std::size_t ci = 0; ci < cin; ++ci)
      for (std::size_t kf = 0; kf < KF; ++kf)
        for (std::size_t kt = 0; kt < KT; ++kt) {
          const std::size_t row = (ci * KF + kf) * KT + kt;
          const long of = static_cast<long>(kf) - hf, ot = static_cast<long>(kt) - ht;
          const long lt = static_cast<long>(T), t0 = std::max(0L, -ot), t1 = std::min(lt, lt - ot);
          if (t1 <= t0) continue;
          for (long f = std::max(0L, -of); f < std::min(static_cast<long>(F), static_cast<long>(F) - of); ++f)
            fn(row * F * T + static_cast<std::size_t>(f * lt + t0),
               ci * F * T + static_cast<std::size_t>((f + of) * lt + t0 + ot), t1 - t0);
        }
  };
  Eigen::ArrayXd col = Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(rows * cols));
  scatter([&](std::size_t c, std::size_t in, long n) {
    ArrayMap(col.data() + c, n) = ConstArrayMap(x->value.data() + in, n);
  });
  Eigen::ArrayXd y(static_cast<Eigen::Index>(cout * cols));
  auto Y = as_matrix(y, cout, cols);
  Y.noalias() = as_matrix(w->value, cout, rows) * as_matrix(col, rows, cols);
  if (b) Y.colwise() += b->value.matrix();
  Shape s{cout, F, T};
  return make_result(s, std::move(y), {x, w, b},
                     [xp = x.get(), wp = w.get(), bp = b.get(), col = std::move(col), rows, cols, cout, scatter](Node& self) {
    const auto dY = as_matrix(self.grad, cout, cols);
    if (needs(bp)) bp->grad += dY.rowwise().sum().array();
    if (needs(wp)) as_matrix(wp->grad, cout, rows).noalias() += dY * as_matrix(col, rows, cols).transpose();
    if (needs(xp)) {
      Eigen::ArrayXd dcol(static_cast<Eigen::Index>(rows * cols));
      as_matrix(dcol, rows, cols).noalias() = as_matrix(wp->value, cout, rows).transpose() * dY;
      scatter([&](std::size_t c, std::size_t in, long n) {
        ArrayMap(xp->grad.data() + in, n) += ConstArrayMap(dcol.data() + c, n);
      });
    }
  });
}

Var relu(const Var& x) {
  return unary(x, [](double v) { return v > 0.0 ? v : 0.0; }, [](double v, double) { return v > 0.0 ? 1.0 : 0.0; });
}

Var prelu(const Var& x, const Var& slope) {
  require(slope->shape == Shape{1}, "prelu: slope must have shape [1]");
  const double a = slope->value[0];
  Eigen::ArrayXd y = (x->value > 0.0).select(x->value, a * x->value);
  return make_result(x->shape, std::move(y), {x, slope}, [xp = x.get(), sp = slope.get()](Node& self) {
    const double a = sp->value[0];
    const auto pos = xp->value > 0.0;
    if (needs(xp)) xp->grad += pos.select(self.grad, a * self.grad);
    if (needs(sp)) sp->grad[0] += pos.select(0.0, xp->value * self.grad).sum();
  });
}

Var gelu(const Var& x) {
  constexpr double kInvSqrt2 = 0.7071067811865476, kInvSqrt2Pi = 0.3989422804014327;
  return unary(
      x, [](double v) { return 0.5 * v * (1.0 + std::erf(v * kInvSqrt2)); },
      [](double v, double) { return 0.5 * (1.0 + std::erf(v * kInvSqrt2)) + v * kInvSqrt2Pi * std::exp(-0.5 * v * v); });
}

Var sigmoid(const Var& x) {
  return unary(x, [](double v) { return 1.0 / (1.0 + std::exp(-v)); }, [](double, double y) { return y * (1.0 - y); });
}

Var log1p(const Var& x) {
  require((x->value > -1.0).all(), "log1p: input must exceed -1");
  return unary(x, [](double v) { return std::log1p(v); }, [](double v, double) { return 1.0 / (1.0 + v); });
}

Var expm1(const Var& x) {
  return unary(x, [](double v) { return std::expm1(v); }, [](double, double y) { return y + 1.0; });
}

Var global_layer_norm(const Var& x, const Var& gamma, const Var& beta, double eps) {
  const std::size_t C = x->channels(), L = x->inner();
  require(gamma->shape == Shape{C} && beta->shape == Shape{C}, "global_layer_norm: affine shape");
  const double mean = x->value.mean();
  const double var = (x->value - mean).square().mean();
  const double inv = 1.0 / std::sqrt(var + eps);
  Eigen::ArrayXd xhat = (x->value - mean) * inv;
  Eigen::ArrayXd y(xhat.size());
  as_matrix(y, C, L) = (as_matrix(xhat, C, L).array().colwise() * gamma->value).colwise() + beta->value;
  return make_result(x->shape, std::move(y), {x, gamma, beta},
                     [xp = x.get(), gp = gamma.get(), bp = beta.get(), xhat = std::move(xhat), inv, C, L](Node& self) {
    const auto dY = as_matrix(self.grad, C, L).array();
    const auto Xh = as_matrix(xhat, C, L).array();
    if (needs(gp)) gp->grad += (dY * Xh).rowwise().sum();
    if (needs(bp)) bp->grad += dY.rowwise().sum();
    if (needs(xp)) {
      const Eigen::ArrayXXd dxhat = dY.colwise() * gp->value;
      const double m1 = dxhat.mean(), m2 = (dxhat * Xh).mean();
      as_matrix(xp->grad, C, L).array() += inv * (dxhat - m1 - Xh * m2);
    }
  });
}

Var channel_layer_norm(const Var& x, const Var& gamma, const Var& beta, double eps) {
  const std::size_t C = x->channels(), L = x->inner();
  require(gamma->shape == Shape{C} && beta->shape == Shape{C}, "channel_layer_norm: affine shape");
  const auto X = x->matrix().array();
  const Eigen::RowVectorXd mean = X.colwise().mean().matrix();
  Eigen::ArrayXXd centered = X.rowwise() - mean.array();
  const Eigen::RowVectorXd inv = (centered.square().colwise().mean() + eps).rsqrt().matrix();
  Eigen::ArrayXd xhat(static_cast<Eigen::Index>(C * L));
  as_matrix(xhat, C, L).array() = centered.rowwise() * inv.array();
  Eigen::ArrayXd y(xhat.size());
  as_matrix(y, C, L) = (as_matrix(xhat, C, L).array().colwise() * gamma->value).colwise() + beta->value;
  return make_result(x->shape, std::move(y), {x, gamma, beta},
                     [xp = x.get(), gp = gamma.get(), bp = beta.get(), xhat = std::move(xhat), inv, C, L](Node& self) {
    const auto dY = as_matrix(self.grad, C, L).array();
    const auto Xh = as_matrix(xhat, C, L).array();
    if (needs(gp)) gp->grad += (dY * Xh).rowwise().sum();
    if (needs(bp)) bp->grad += dY.rowwise().sum();
    if (needs(xp)) {
      const Eigen::ArrayXXd dxhat = dY.colwise() * gp->value;
      const Eigen::RowVectorXd m1 = dxhat.colwise().mean().matrix();
      const Eigen::RowVectorXd m2 = (dxhat * Xh).colwise().mean().matrix();
      as_matrix(xp->grad, C, L).array() +=
          ((dxhat.rowwise() - m1.array()) - Xh.rowwise() * m2.array()).rowwise() * inv.array();
    }
  });
}

Var add(const Var& a, const Var& b) {
  check_same(a, b, "add");
  return make_result(a->shape, a->value + b->value, {a, b}, [ap = a.get(), bp = b.get()](Node& self) {
    if (needs(ap)) ap->grad += self.grad;
    if (needs(bp)) bp->grad += self.grad;
  });
}

Var sub(const Var& a, const Var& b) {
  check_same(a, b, "sub");
  return make_result(a->shape, a->value - b->value, {a, b}, [ap = a.get(), bp = b.get()](Node& self) {
    if (needs(ap)) ap->grad += self.grad;
    if (needs(bp)) bp->grad -= self.grad;
  });
}

Var mul(const Var& a, const Var& b) {
  check_same(a, b, "mul");
  return make_result(a->shape, a->value * b->value, {a, b}, [ap = a.get(), bp = b.get()](Node& self) {
    if (needs(ap)) ap->grad += self.grad * bp->value;
    if (needs(bp)) bp->grad += self.grad * ap->value;
  });
}

Var scale(const Var& x, double s) {
  return make_result(x->shape, x->value * s, {x}, [xp = x.get(), s](Node& self) { xp->grad += s * self.grad; });
}

Var channel_scale(const Var& x, const Var& g) {
  const std::size_t C = x->channels(), L = x->inner();
  require(g->shape == Shape{C}, "channel_scale: scale shape");
  Eigen::ArrayXd y(x->value.size());
  as_matrix(y, C, L).array() = x->matrix().array().colwise() * g->value;
  return make_result(x->shape, std::move(y), {x, g}, [xp = x.get(), gp = g.get(), C, L](Node& self) {
    const auto dY = as_matrix(self.grad, C, L).array();
    if (needs(gp)) gp->grad += (dY * xp->matrix().array()).rowwise().sum();
    if (needs(xp)) as_matrix(xp->grad, C, L).array() += dY.colwise() * gp->value;
  });
}

Var sum_all(const Var& x) {
  Eigen::ArrayXd y(1);
  y[0] = x->value.sum();
  return make_result({1}, y, {x}, [xp = x.get()](Node& self) { xp->grad += self.grad[0]; });
}

Var mean_square(const Var& x) {
  Eigen::ArrayXd y(1);
  const double n = static_cast<double>(x->value.size());
  y[0] = x->value.square().sum() / n;
  return make_result({1}, y, {x}, [xp = x.get(), n](Node& self) { xp->grad += self.grad[0] * 2.0 / n * xp->value; });
}

Var concat_channels(const std::vector<Var>& parts) {
  require(!parts.empty(), "concat_channels: nothing to concatenate");
  Shape s = parts.front()->shape;
  std::size_t total = 0;
  for (const auto& p : parts) {
    require(p->shape.size() == s.size() && std::equal(p->shape.begin() + 1, p->shape.end(), s.begin() + 1),
            "concat_channels: inner shapes differ");
    total += p->channels();
  }
  s[0] = total;
  Eigen::ArrayXd y(static_cast<Eigen::Index>(shape_size(s)));
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    y.segment(at, p->value.size()) = p->value;
    at += p->value.size();
  }
  std::vector<Node*> raw;
  for (const auto& p : parts) raw.push_back(p.get());
  return make_result(s, std::move(y), parts, [raw](Node& self) {
    Eigen::Index at = 0;
    for (Node* p : raw) {
      if (needs(p)) p->grad += self.grad.segment(at, p->value.size());
      at += p->value.size();
    }
  });
}

Var slice_channels(const Var& x, std::size_t begin, std::size_t count) {
  require(begin + count <= x->channels() && count > 0, "slice_channels: range outside " + shape_string(x->shape));
  const auto inner = static_cast<Eigen::Index>(x->inner());
  Shape s = x->shape;
  s[0] = count;
  const auto start = static_cast<Eigen::Index>(begin) * inner, n = static_cast<Eigen::Index>(count) * inner;
  return make_result(s, x->value.segment(start, n), {x},
                     [xp = x.get(), start, n](Node& self) { xp->grad.segment(start, n) += self.grad; });
}

Var reshape(const Var& x, Shape shape) {
  require(shape_size(shape) == shape_size(x->shape), "reshape: size mismatch");
  return make_result(std::move(shape), x->value, {x}, [xp = x.get()](Node& self) { xp->grad += self.grad; });
}

Var stft(const Var& x, const StftConfig& config) {
  const std::size_t n = x->value.size();
  const auto S = medleysep::stft(std::span<const double>(x->value.data(), n), config, kNominalRate);
  const std::size_t F = S.bins(), T = S.frames();
  Eigen::ArrayXd y(static_cast<Eigen::Index>(2 * F * T));
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t k = 0; k < F; ++k) {
      y[k * T + t] = S.at(t, k).real();
      y[(F + k) * T + t] = S.at(t, k).imag();
    }
  return make_result({2 * F, T}, std::move(y), {x}, [xp = x.get(), config, F, T, n](Node& self) {
    ComplexSpectrogram G(T, config, kNominalRate);
    for (std::size_t t = 0; t < T; ++t)
      for (std::size_t k = 0; k < F; ++k) G.at(t, k) = {self.grad[k * T + t], self.grad[(F + k) * T + t]};
    const auto dx = stft_adjoint(G, n);
    xp->grad += ConstArrayMap(dx.data(), static_cast<Eigen::Index>(n));
  });
}

Var istft(const Var& spec, const StftConfig& config, std::size_t out_len) {
  const std::size_t F = static_cast<std::size_t>(config.bins());
  require(spec->shape.size() == 2 && spec->shape[0] == 2 * F, "istft: expected [2F, T] spectrogram");
  const std::size_t T = spec->shape[1];
  ComplexSpectrogram S(T, config, kNominalRate);
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t k = 0; k < F; ++k) S.at(t, k) = {spec->value[k * T + t], spec->value[(F + k) * T + t]};
  const auto y = istft_samples(S, out_len);
  return make_result({1, out_len}, ConstArrayMap(y.data(), static_cast<Eigen::Index>(out_len)), {spec},
                     [sp = spec.get(), config, F, T](Node& self) {
    const auto G = istft_adjoint(std::span<const double>(self.grad.data(), self.grad.size()), T, config, kNominalRate);
    for (std::size_t t = 0; t < T; ++t)
      for (std::size_t k = 0; k < F; ++k) {
        sp->grad[k * T + t] += G.at(t, k).real();
        sp->grad[(F + k) * T + t] += G.at(t, k).imag();
      }
  });
}

Var magnitude(const Var& spec) {
  require(spec->shape.size() == 2 && spec->shape[0] % 2 == 0, "magnitude: expected [2F, T] spectrogram");
  const std::size_t F = spec->shape[0] / 2, T = spec->shape[1];
  const auto n = static_cast<Eigen::Index>(F * T);
  Eigen::ArrayXd m = (spec->value.head(n).square() + spec->value.tail(n).square()).sqrt();
  return make_result({F, T}, std::move(m), {spec}, [sp = spec.get(), n](Node& self) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double mag = self.value[i];
      if (mag <= 0.0) continue;
      sp->grad[i] += self.grad[i] * sp->value[i] / mag;
      sp->grad[n + i] += self.grad[i] * sp->value[n + i] / mag;
    }
  });
}

Var apply_phase(const Var& mag, const Var& reference) {
  require(reference->shape.size() == 2 && mag->shape.size() == 2 && reference->shape[0] == 2 * mag->shape[0] &&
              reference->shape[1] == mag->shape[1],
          "apply_phase: expected [F, T] magnitude and [2F, T] reference");
  const auto n = mag->value.size();
  Eigen::ArrayXd y(2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double re = reference->value[i], im = reference->value[n + i];
    const double r = std::hypot(re, im);
    const double ur = r > 0.0 ? re / r : 1.0, ui = r > 0.0 ? im / r : 0.0;
    y[i] = mag->value[i] * ur;
    y[n + i] = mag->value[i] * ui;
  }
  return make_result(reference->shape, std::move(y), {mag, reference}, [mp = mag.get(), rp = reference.get(), n](Node& self) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double re = rp->value[i], im = rp->value[n + i];
      const double r = std::hypot(re, im);
      const double ur = r > 0.0 ? re / r : 1.0, ui = r > 0.0 ? im / r : 0.0;
      const double gr = self.grad[i], gi = self.grad[n + i];
      if (needs(mp)) mp->grad[i] += gr * ur + gi * ui;
      if (needs(rp) && r > 0.0) {
        const double along = ur * gr + ui * gi, k = mp->value[i] / r;
        rp->grad[i] += k * (gr - ur * along);
        rp->grad[n + i] += k * (gi - ui * along);
      }
    }
  });
}

std::size_t frame_count(std::size_t length, std::size_t frame, std::size_t hop) {
  if (length <= frame) return 1;
  return (length - frame + hop - 1) / hop + 1;
}

Var frame_signal(const Var& x, std::size_t frame, std::size_t hop) {
  require(frame > 0 && hop > 0, "frame_signal: frame and hop must be positive");
  const std::size_t n = x->value.size(), T = frame_count(n, frame, hop);
  Eigen::ArrayXd y = Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(frame * T));
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t l = 0; l < frame && t * hop + l < n; ++l) y[l * T + t] = x->value[t * hop + l];
  return make_result({frame, T}, std::move(y), {x}, [xp = x.get(), frame, hop, n, T](Node& self) {
    for (std::size_t t = 0; t < T; ++t)
      for (std::size_t l = 0; l < frame && t * hop + l < n; ++l) xp->grad[t * hop + l] += self.grad[l * T + t];
  });
}

Var overlap_add(const Var& frames, std::size_t hop, std::size_t out_len) {
  require(frames->shape.size() == 2 && hop > 0, "overlap_add: expected [L, T] frames");
  const std::size_t L = frames->shape[0], T = frames->shape[1];
  Eigen::ArrayXd y = Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(out_len));
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t l = 0; l < L && t * hop + l < out_len; ++l) y[t * hop + l] += frames->value[l * T + t];
  return make_result({1, out_len}, std::move(y), {frames}, [fp = frames.get(), hop, L, T, out_len](Node& self) {
    for (std::size_t t = 0; t < T; ++t)
      for (std::size_t l = 0; l < L && t * hop + l < out_len; ++l) fp->grad[l * T + t] += self.grad[t * hop + l];
  });
}

Var mixture_consistency(const Var& estimates, const Eigen::ArrayXd& mixture) {
  const std::size_t S = estimates->channels(), N = estimates->inner();
  require(static_cast<std::size_t>(mixture.size()) == N, "mixture_consistency: mixture length mismatch");
  Eigen::ArrayXd y = estimates->value;
  auto Y = as_matrix(y, S, N);
  const Eigen::RowVectorXd share = (mixture.matrix().transpose() - Y.colwise().sum()) / static_cast<double>(S);
  Y.rowwise() += share;
  return make_result(estimates->shape, std::move(y), {estimates}, [ep = estimates.get(), S, N](Node& self) {
    const auto G = as_matrix(self.grad, S, N);
    const Eigen::RowVectorXd mean = G.colwise().sum() / static_cast<double>(S);
    as_matrix(ep->grad, S, N).rowwise() -= mean;
    as_matrix(ep->grad, S, N) += G;
  });
}

}  // namespace medleysep::nn
