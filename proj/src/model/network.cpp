// Copyright 2026 The hefl Authors.
// SPDX-License-Identifier: Apache-2.0

#include "hefl/model/network.hpp"

#include <cmath>
#include <string>

#include "hefl/common/error.hpp"

namespace hefl::model {

namespace {

using std::exp;
using std::log;

enum class OpKind { dense, sigmoid, conv, avg_pool };

struct Op {
  OpKind kind;
  const LayerSlot* weight = nullptr;
  const LayerSlot* bias = nullptr;
  std::size_t in = 0;   // dense: inputs; conv/pool: channels in
  std::size_t out = 0;  // dense: outputs; conv/pool: channels out
  std::size_t height = 0;
  std::size_t width = 0;
  const char* label = "";
};

constexpr std::size_t kKernel = 5;
constexpr std::size_t kPad = 2;

std::vector<Op> plan_for(const ModelState& m) {
  const Architecture& a = m.arch();
  const Layout& l = m.layout();
  const std::size_t in = a.input.size();
  std::vector<Op> ops;
  auto dense = [&](const char* w, const char* b, std::size_t n_in, std::size_t n_out) {
    ops.push_back(Op{OpKind::dense, &l.find(w), &l.find(b), n_in, n_out, 0, 0, w});
  };
  auto sigmoid = [&](const char* label) { ops.push_back(Op{OpKind::sigmoid, nullptr, nullptr, 0, 0, 0, 0, label}); };
  switch (a.kind) {
    case ArchKind::linear:
      dense("fc.weight", "fc.bias", in, a.classes);
      break;
    case ArchKind::mlp2:
      dense("fc1.weight", "fc1.bias", in, 64);
      sigmoid("fc1.sigmoid");
      dense("fc2.weight", "fc2.bias", 64, 32);
      sigmoid("fc2.sigmoid");
      dense("fc3.weight", "fc3.bias", 32, a.classes);
      break;
    case ArchKind::conv_s: {
      const LayerSlot& w = l.find("conv.weight");
      const std::size_t maps = w.shape[0];
      ops.push_back(Op{OpKind::conv, &w, &l.find("conv.bias"), a.input.channels, maps, a.input.height,
                       a.input.width, "conv.weight"});
      sigmoid("conv.sigmoid");
      ops.push_back(Op{OpKind::avg_pool, nullptr, nullptr, maps, maps, a.input.height, a.input.width, "pool"});
      dense("fc.weight", "fc.bias", maps * (a.input.height / 2) * (a.input.width / 2), a.classes);
      break;
    }
  }
  return ops;
}

template <typename T>
T sigmoid(const T& x) {
  if (value_of(x) >= 0.0) return T(1.0) / (T(1.0) + exp(-x));
  const T e = exp(x);
  return e / (T(1.0) + e);
}

template <typename T>
void check_finite(const std::vector<T>& v, const char* where) {
  for (const T& x : v) {
    if (!std::isfinite(value_of(x))) throw NumericError(where, "non-finite activation");
  }
}

template <typename T>
std::vector<T> forward_op(const Op& op, std::span<const double> p, const std::vector<T>& x) {
  switch (op.kind) {
    case OpKind::dense: {
      const double* w = p.data() + op.weight->offset;
      const double* b = p.data() + op.bias->offset;
      std::vector<T> y(op.out);
      for (std::size_t o = 0; o < op.out; ++o) {
        T acc(b[o]);
        const double* row = w + o * op.in;
        for (std::size_t i = 0; i < op.in; ++i) acc += row[i] * x[i];
        y[o] = acc;
      }
      return y;
    }
    case OpKind::sigmoid: {
      std::vector<T> y(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) y[i] = sigmoid(x[i]);
      return y;
    }
    case OpKind::conv: {
      const double* w = p.data() + op.weight->offset;
      const double* b = p.data() + op.bias->offset;
      const std::size_t h = op.height, wd = op.width;
      std::vector<T> y(op.out * h * wd);
      for (std::size_t co = 0; co < op.out; ++co) {
        for (std::size_t r = 0; r < h; ++r) {
          for (std::size_t c = 0; c < wd; ++c) {
            T acc(b[co]);
            for (std::size_t ci = 0; ci < op.in; ++ci) {
              for (std::size_t ky = 0; ky < kKernel; ++ky) {
                const std::ptrdiff_t rr = static_cast<std::ptrdiff_t>(r + ky) - static_cast<std::ptrdiff_t>(kPad);
                if (rr < 0 || rr >= static_cast<std::ptrdiff_t>(h)) continue;
                for (std::size_t kx = 0; kx < kKernel; ++kx) {
                  const std::ptrdiff_t cc = static_cast<std::ptrdiff_t>(c + kx) - static_cast<std::ptrdiff_t>(kPad);
                  if (cc < 0 || cc >= static_cast<std::ptrdiff_t>(wd)) continue;
                  acc += w[((co * op.in + ci) * kKernel + ky) * kKernel + kx] * x[(ci * h + rr) * wd + cc];
                }
              }
            }
            y[(co * h + r) * wd + c] = acc;
          }
        }
      }
      return y;
    }
    case OpKind::avg_pool: {
      const std::size_t h2 = op.height / 2, w2 = op.width / 2;
      std::vector<T> y(op.out * h2 * w2);
      for (std::size_t ch = 0; ch < op.out; ++ch) {
        for (std::size_t r = 0; r < h2; ++r) {
          for (std::size_t c = 0; c < w2; ++c) {
            const std::size_t base = (ch * op.height + 2 * r) * op.width + 2 * c;
            y[(ch * h2 + r) * w2 + c] =
                0.25 * (x[base] + x[base + 1] + x[base + op.width] + x[base + op.width + 1]);
          }
        }
      }
      return y;
    }
  }
  return {};
}

/// Consumes the output gradient `dy`, accumulates parameter gradients and returns the input gradient.
template <typename T>
std::vector<T> backward_op(const Op& op, std::span<const double> p, const std::vector<T>& x,
                           const std::vector<T>& y, const std::vector<T>& dy, std::span<T> grad) {
  switch (op.kind) {
    case OpKind::dense: {
      const double* w = p.data() + op.weight->offset;
      T* gw = grad.data() + op.weight->offset;
      T* gb = grad.data() + op.bias->offset;
      std::vector<T> dx(op.in, T(0.0));
      for (std::size_t o = 0; o < op.out; ++o) {
        const T g = dy[o];
        gb[o] += g;
        const double* row = w + o * op.in;
        T* grow = gw + o * op.in;
        for (std::size_t i = 0; i < op.in; ++i) {
          grow[i] += g * x[i];
          dx[i] += row[i] * g;
        }
      }
      return dx;
    }
    case OpKind::sigmoid: {
      std::vector<T> dx(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) dx[i] = dy[i] * (y[i] * (T(1.0) - y[i]));
      return dx;
    }
    case OpKind::conv: {
      const double* w = p.data() + op.weight->offset;
      T* gw = grad.data() + op.weight->offset;
      T* gb = grad.data() + op.bias->offset;
      const std::size_t h = op.height, wd = op.width;
      std::vector<T> dx(op.in * h * wd, T(0.0));
      for (std::size_t co = 0; co < op.out; ++co) {
        for (std::size_t r = 0; r < h; ++r) {
          for (std::size_t c = 0; c < wd; ++c) {
            const T g = dy[(co * h + r) * wd + c];
            gb[co] += g;
            for (std::size_t ci = 0; ci < op.in; ++ci) {
              for (std::size_t ky = 0; ky < kKernel; ++ky) {
                const std::ptrdiff_t rr = static_cast<std::ptrdiff_t>(r + ky) - static_cast<std::ptrdiff_t>(kPad);
                if (rr < 0 || rr >= static_cast<std::ptrdiff_t>(h)) continue;
                for (std::size_t kx = 0; kx < kKernel; ++kx) {
                  const std::ptrdiff_t cc = static_cast<std::ptrdiff_t>(c + kx) - static_cast<std::ptrdiff_t>(kPad);
                  if (cc < 0 || cc >= static_cast<std::ptrdiff_t>(wd)) continue;
                  const std::size_t wi = ((co * op.in + ci) * kKernel + ky) * kKernel + kx;
                  const std::size_t xi = (ci * h + rr) * wd + cc;
                  gw[wi] += g * x[xi];
                  dx[xi] += w[wi] * g;
                }
              }
            }
          }
        }
      }
      return dx;
    }
    case OpKind::avg_pool: {
      const std::size_t h2 = op.height / 2, w2 = op.width / 2;
      std::vector<T> dx(x.size(), T(0.0));
      for (std::size_t ch = 0; ch < op.out; ++ch) {
        for (std::size_t r = 0; r < h2; ++r) {
          for (std::size_t c = 0; c < w2; ++c) {
            const T g = 0.25 * dy[(ch * h2 + r) * w2 + c];
            const std::size_t base = (ch * op.height + 2 * r) * op.width + 2 * c;
            dx[base] += g;
            dx[base + 1] += g;
            dx[base + op.width] += g;
            dx[base + op.width + 1] += g;
          }
        }
      }
      return dx;
    }
  }
  return {};
}

template <typename T>
std::vector<std::vector<T>> run_forward(const ModelState& model, const std::vector<Op>& ops,
                                        std::span<const T> input) {
  if (input.size() != model.arch().input.size()) {
    throw UsageError("input has " + std::to_string(input.size()) + " features, model expects " +
                     std::to_string(model.arch().input.size()));
  }
  std::vector<std::vector<T>> acts;
  acts.reserve(ops.size() + 1);
  acts.emplace_back(input.begin(), input.end());
  for (const Op& op : ops) {
    acts.push_back(forward_op(op, model.flat(), acts.back()));
    check_finite(acts.back(), op.label);
  }
  return acts;
}

template <typename T>
T loss_and_delta(LossKind kind, const std::vector<T>& z, std::span<const T> target, std::vector<T>* dz) {
  const std::size_t classes = z.size();
  T loss(0.0);
  if (kind == LossKind::squared_error) {
    for (std::size_t k = 0; k < classes; ++k) {
      const T diff = z[k] - target[k];
      loss += 0.5 * (diff * diff);
      if (dz) (*dz)[k] = diff;
    }
    return loss;
  }
  T zmax = z[0];
  for (const T& v : z) {
    if (value_of(v) > value_of(zmax)) zmax = v;
  }
  T sum(0.0);
  for (const T& v : z) sum += exp(v - zmax);
  const T lse = zmax + log(sum);
  T mass(0.0);
  for (const T& t : target) mass += t;
  for (std::size_t k = 0; k < classes; ++k) {
    loss += target[k] * (lse - z[k]);
    if (dz) (*dz)[k] = exp(z[k] - lse) * mass - target[k];
  }
  return loss;
}

}  // namespace

template <typename T>
std::vector<T> forward_logits(const ModelState& model, std::span<const T> input) {
  const auto ops = plan_for(model);
  auto acts = run_forward(model, ops, input);
  return std::move(acts.back());
}

template <typename T>
T accumulate_example_gradient(const ModelState& model, std::span<const T> input, std::span<const T> target,
                              std::span<T> grad, double weight) {
  const std::size_t classes = model.arch().classes;
  if (target.size() != classes) throw UsageError("target length does not match class count");
  if (grad.size() != model.size()) throw UsageError("gradient buffer does not match parameter count");
  const auto ops = plan_for(model);
  const auto acts = run_forward(model, ops, input);
  const std::vector<T>& z = acts.back();

  std::vector<T> dz(classes);
  const T loss = loss_and_delta<T>(model.arch().loss(), z, target, &dz);
  if (!std::isfinite(value_of(loss))) throw NumericError("loss", "non-finite loss");

  for (auto& g : dz) g = weight * g;
  std::vector<T> dy = std::move(dz);
  for (std::size_t i = ops.size(); i-- > 0;) {
    dy = backward_op(ops[i], model.flat(), acts[i], acts[i + 1], dy, grad);
    check_finite(dy, ops[i].label);
  }
  return loss;
}

template double accumulate_example_gradient<double>(const ModelState&, std::span<const double>,
                                                    std::span<const double>, std::span<double>, double);
template Dual accumulate_example_gradient<Dual>(const ModelState&, std::span<const Dual>, std::span<const Dual>,
                                                std::span<Dual>, double);
template std::vector<double> forward_logits<double>(const ModelState&, std::span<const double>);
template std::vector<Dual> forward_logits<Dual>(const ModelState&, std::span<const Dual>);

std::vector<double> one_hot(int label, std::size_t classes) {
  if (label < 0 || static_cast<std::size_t>(label) >= classes) {
    throw UsageError("label " + std::to_string(label) + " outside [0, " + std::to_string(classes) + ")");
  }
  std::vector<double> t(classes, 0.0);
  t[static_cast<std::size_t>(label)] = 1.0;
  return t;
}

double example_loss(const ModelState& model, std::span<const double> input, std::span<const double> target) {
  if (target.size() != model.arch().classes) throw UsageError("target length does not match class count");
  const auto z = forward_logits<double>(model, input);
  const double loss = loss_and_delta<double>(model.arch().loss(), z, target, nullptr);
  if (!std::isfinite(loss)) throw NumericError("loss", "non-finite loss");
  return loss;
}

LossAndGradient forward_backward(const ModelState& model, std::span<const Example> batch) {
  if (batch.empty()) throw UsageError("forward_backward needs a non-empty batch");
  LossAndGradient out;
  out.gradient.values.assign(model.size(), 0.0);
  out.gradient.batch_count = 1;
  const double weight = 1.0 / static_cast<double>(batch.size());
  double total = 0.0;
  for (const Example& ex : batch) {
    const auto target = one_hot(ex.label, model.arch().classes);
    total += accumulate_example_gradient<double>(model, ex.features, target, out.gradient.values, weight);
  }
  out.loss = total * weight;
  for (double g : out.gradient.values) {
    if (!std::isfinite(g)) throw NumericError("gradient", "non-finite gradient");
  }
  return out;
}

}  // namespace hefl::model
