/*
 * Copyright 2026 The alab Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef ALAB_NETWORK_HPP_
#define ALAB_NETWORK_HPP_

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "alab/errors.hpp"
#include "alab/rng.hpp"

namespace alab {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class Activation : std::uint32_t { kRelu = 0, kTanh = 1 };

// Fully connected layer, y = weight * x + bias.
struct Dense {
  MatrixXd weight;  // out x in
  VectorXd bias;

  Dense() = default;
  Dense(Index in, Index out) : weight(MatrixXd::Zero(out, in)), bias(VectorXd::Zero(out)) {}

  Index inputs() const { return weight.cols(); }
  Index outputs() const { return weight.rows(); }
};

// Trainable parameters. Also used as the gradient and optimizer-moment
// container since it has the same shape.
//
//   hidden   : feature extractor, input -> representation v
//   head     : prediction head, v -> class logits
//   selector : selection head, v -> single logit (logistic output t)
struct Parameters {
  std::vector<Dense> hidden;
  Dense head;
  Dense selector;

  // Flat views over every tensor, in a fixed order.
  std::vector<std::span<double>> tensors() {
    std::vector<std::span<double>> out;
    auto add = [&](Dense& d) {
      out.emplace_back(d.weight.data(), static_cast<std::size_t>(d.weight.size()));
      out.emplace_back(d.bias.data(), static_cast<std::size_t>(d.bias.size()));
    };
    for (auto& h : hidden) add(h);
    add(head);
    add(selector);
    return out;
  }

  std::vector<std::span<const double>> tensors() const {
    std::vector<std::span<const double>> out;
    for (auto s : const_cast<Parameters*>(this)->tensors()) out.emplace_back(s.data(), s.size());
    return out;
  }

  std::size_t size() const {
    std::size_t n = 0;
    for (auto s : tensors()) n += s.size();
    return n;
  }

  void set_zero() {
    for (auto s : tensors()) std::fill(s.begin(), s.end(), 0.0);
  }
};

struct NetworkShape {
  Index inputs = 2;
  std::vector<Index> hidden{32};
  Index classes = 2;
  double dropout = 0.1;
  Activation activation = Activation::kRelu;

  Index representation_dim() const { return hidden.empty() ? inputs : hidden.back(); }

  void validate() const {
    if (inputs < 1) throw InputShapeError("network needs at least one input");
    if (classes < 1) throw InputShapeError("network needs at least one class");
    for (Index h : hidden)
      if (h < 1) throw InputShapeError("hidden layer width must be positive");
    if (!(dropout >= 0.0 && dropout < 1.0))
      throw InputShapeError("dropout rate must lie in [0, 1)");
  }
};

struct Network {
  NetworkShape shape;
  Parameters params;

  Network() : Network(NetworkShape{}) {}

  // All-zero parameters.
  explicit Network(NetworkShape s) : shape(std::move(s)) {
    shape.validate();
    params = zero_parameters(shape);
  }

  static Parameters zero_parameters(const NetworkShape& shape) {
    Parameters p;
    Index in = shape.inputs;
    for (Index h : shape.hidden) {
      p.hidden.emplace_back(in, h);
      in = h;
    }
    p.head = Dense(in, shape.classes);
    p.selector = Dense(in, 1);
    return p;
  }

  Parameters zeros_like() const { return zero_parameters(shape); }
};

// Glorot-uniform weights, zero biases.
inline Network make_network(const NetworkShape& shape, Rng& rng) {
  Network net(shape);
  auto init = [&](Dense& d) {
    const double limit = std::sqrt(6.0 / static_cast<double>(d.inputs() + d.outputs()));
    std::uniform_real_distribution<double> u(-limit, limit);
    for (Index i = 0; i < d.weight.size(); ++i) d.weight.data()[i] = u(rng);
  };
  for (auto& h : net.params.hidden) init(h);
  init(net.params.head);
  init(net.params.selector);
  return net;
}

// Per-hidden-unit multipliers: 0 for dropped units, 1/(1-p) otherwise.
struct DropoutMask {
  std::vector<VectorXd> scale;
};

inline DropoutMask identity_mask(const NetworkShape& shape) {
  DropoutMask m;
  for (Index h : shape.hidden) m.scale.push_back(VectorXd::Ones(h));
  return m;
}

// One independent Bernoulli draw per hidden unit. With rate 0 the mask is
// all ones and the generator is left untouched.
inline DropoutMask sample_mask(const NetworkShape& shape, Rng& rng) {
  if (shape.dropout == 0.0) return identity_mask(shape);
  DropoutMask m;
  const double keep = 1.0 - shape.dropout;
  std::bernoulli_distribution draw(keep);
  for (Index h : shape.hidden) {
    VectorXd s(h);
    for (Index i = 0; i < h; ++i) s[i] = draw(rng) ? 1.0 / keep : 0.0;
    m.scale.push_back(std::move(s));
  }
  return m;
}

inline double activate(Activation a, double z) {
  return a == Activation::kRelu ? std::max(0.0, z) : std::tanh(z);
}

inline double activate_derivative(Activation a, double z) {
  if (a == Activation::kRelu) return z > 0.0 ? 1.0 : 0.0;
  const double t = std::tanh(z);
  return 1.0 - t * t;
}

inline VectorXd softmax(const VectorXd& logits) {
  const double top = logits.maxCoeff();
  VectorXd e = (logits.array() - top).exp();
  return e / e.sum();
}

inline double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Intermediate values of one forward pass, kept for backpropagation.
struct ForwardTrace {
  VectorXd input;
  std::vector<VectorXd> pre;   // hidden pre-activations
  std::vector<VectorXd> post;  // hidden outputs after activation and mask
  VectorXd probs;

  const VectorXd& representation() const { return post.empty() ? input : post.back(); }
};

inline void check_input(const Network& net, const VectorXd& x) {
  if (x.size() != net.shape.inputs)
    throw InputShapeError("expected " + std::to_string(net.shape.inputs) +
                          " features, got " + std::to_string(x.size()));
}

inline ForwardTrace trace_forward(const Network& net, const VectorXd& x, const DropoutMask& mask) {
  check_input(net, x);
  ForwardTrace tr;
  tr.input = x;
  const VectorXd* in = &tr.input;
  for (std::size_t l = 0; l < net.params.hidden.size(); ++l) {
    const Dense& d = net.params.hidden[l];
    VectorXd z = d.weight * *in + d.bias;
    VectorXd a = z.unaryExpr([&](double v) { return activate(net.shape.activation, v); });
    a.array() *= mask.scale[l].array();
    tr.pre.push_back(std::move(z));
    tr.post.push_back(std::move(a));
    in = &tr.post.back();
  }
  tr.probs = softmax(net.params.head.weight * *in + net.params.head.bias);
  return tr;
}

// Dropout-off representation v (output of the feature extractor).
inline VectorXd representation(const Network& net, const VectorXd& x) {
  check_input(net, x);
  VectorXd v = x;
  for (const Dense& d : net.params.hidden) {
    VectorXd z = d.weight * v + d.bias;
    v = z.unaryExpr([&](double s) { return activate(net.shape.activation, s); });
  }
  return v;
}

inline VectorXd forward(const Network& net, const VectorXd& x, const DropoutMask& mask) {
  return trace_forward(net, x, mask).probs;
}

// Class probabilities. The generator is only consumed when dropout_on.
inline VectorXd forward(const Network& net, const VectorXd& x, bool dropout_on, Rng& rng) {
  if (!dropout_on) {
    check_input(net, x);
    const VectorXd v = representation(net, x);
    return softmax(net.params.head.weight * v + net.params.head.bias);
  }
  return forward(net, x, sample_mask(net.shape, rng));
}

inline VectorXd predict(const Network& net, const VectorXd& x) {
  check_input(net, x);
  const VectorXd v = representation(net, x);
  return softmax(net.params.head.weight * v + net.params.head.bias);
}

inline double selector_from_representation(const Network& net, const VectorXd& v) {
  const Dense& s = net.params.selector;
  return logistic((s.weight * v)(0) + s.bias(0));
}

// Selector output t in [0, 1]; always evaluated with dropout off.
inline double selector_forward(const Network& net, const VectorXd& x) {
  return selector_from_representation(net, representation(net, x));
}

// Index of the largest entry; ties go to the lowest index.
inline Index argmax(const VectorXd& v) {
  Index best = 0;
  for (Index i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

// ---------------------------------------------------------------------------
// Checkpoint: little-endian binary.
//   "ALABNET\0" | u32 version | u32 activation | f64 dropout | u64 inputs |
//   u64 classes | u64 n_hidden | u64 width[n_hidden] | f64 tensors...
// Tensors are written in Parameters::tensors() order, column-major.
// ---------------------------------------------------------------------------

inline constexpr std::array<char, 8> kCheckpointMagic{'A', 'L', 'A', 'B', 'N', 'E', 'T', '\0'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

static_assert(std::endian::native == std::endian::little, "checkpoint io assumes little-endian");

namespace detail {

template <typename T>
void write_pod(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw Error("truncated network checkpoint");
  return v;
}

}  // namespace detail

inline void save_checkpoint(const Network& net, std::ostream& os) {
  os.write(kCheckpointMagic.data(), kCheckpointMagic.size());
  detail::write_pod(os, kCheckpointVersion);
  detail::write_pod(os, static_cast<std::uint32_t>(net.shape.activation));
  detail::write_pod(os, net.shape.dropout);
  detail::write_pod(os, static_cast<std::uint64_t>(net.shape.inputs));
  detail::write_pod(os, static_cast<std::uint64_t>(net.shape.classes));
  detail::write_pod(os, static_cast<std::uint64_t>(net.shape.hidden.size()));
  for (Index h : net.shape.hidden) detail::write_pod(os, static_cast<std::uint64_t>(h));
  for (auto t : net.params.tensors())
    os.write(reinterpret_cast<const char*>(t.data()), static_cast<std::streamsize>(t.size_bytes()));
  if (!os) throw Error("failed to write network checkpoint");
}

inline Network load_checkpoint(std::istream& is) {
  std::array<char, 8> magic{};
  is.read(magic.data(), magic.size());
  if (!is || magic != kCheckpointMagic) throw Error("not a network checkpoint");
  const auto version = detail::read_pod<std::uint32_t>(is);
  if (version != kCheckpointVersion)
    throw Error("unsupported checkpoint version " + std::to_string(version));
  NetworkShape shape;
  const auto act = detail::read_pod<std::uint32_t>(is);
  if (act > 1) throw Error("unknown activation in checkpoint");
  shape.activation = static_cast<Activation>(act);
  shape.dropout = detail::read_pod<double>(is);
  shape.inputs = static_cast<Index>(detail::read_pod<std::uint64_t>(is));
  shape.classes = static_cast<Index>(detail::read_pod<std::uint64_t>(is));
  const auto n_hidden = detail::read_pod<std::uint64_t>(is);
  if (n_hidden > 1024) throw Error("implausible layer count in checkpoint");
  shape.hidden.clear();
  for (std::uint64_t i = 0; i < n_hidden; ++i)
    shape.hidden.push_back(static_cast<Index>(detail::read_pod<std::uint64_t>(is)));
  Network net(shape);
  for (auto t : net.params.tensors()) {
    is.read(reinterpret_cast<char*>(t.data()), static_cast<std::streamsize>(t.size_bytes()));
    if (!is) throw Error("truncated network checkpoint");
  }
  return net;
}

}  // namespace alab

#endif  // ALAB_NETWORK_HPP_
