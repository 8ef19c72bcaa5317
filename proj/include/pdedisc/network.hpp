#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "pdedisc/errors.hpp"
#include "pdedisc/jet.hpp"
#include "pdedisc/rng.hpp"
#include "pdedisc/tape.hpp"

namespace pdedisc {

struct NetworkSpec {
  std::vector<int> widths;  // input width 2 (x, t), output width 1
  Activation activation = Activation::kTanh;
  double omega0 = 30.0;  // frequency scale, sine nets only
  std::uint64_t seed = 0;

  int layer_count() const { return static_cast<int>(widths.size()) - 1; }

  void validate() const {
    if (widths.size() < 2) throw ConfigError("network needs at least one layer");
    if (widths.front() != 2) throw ConfigError("network input width must be 2 (x, t)");
    if (widths.back() != 1) throw ConfigError("network output width must be 1");
    for (const int w : widths)
      if (w < 1) throw ConfigError("zero-width network layer");
    if (activation != Activation::kTanh && activation != Activation::kSin)
      throw ConfigError("network activation must be tanh or sin");
    if (activation == Activation::kSin && !(omega0 > 0.0))
      throw ConfigError("omega0 must be > 0 for sine networks");
  }
};

/// Affine map taking physical (x, t) into the network's input box.
struct InputMap {
  double x_scale = 1.0, x_offset = 0.0;
  double t_scale = 1.0, t_offset = 0.0;

  static InputMap from_bounds(double x_min, double x_max, double t_min, double t_max) {
    InputMap m;
    if (x_max > x_min) {
      m.x_scale = 2.0 / (x_max - x_min);
      m.x_offset = -(x_max + x_min) / (x_max - x_min);
    }
    if (t_max > t_min) {
      m.t_scale = 2.0 / (t_max - t_min);
      m.t_offset = -(t_max + t_min) / (t_max - t_min);
    }
    return m;
  }
};

struct NetworkParams {
  std::vector<Eigen::MatrixXd> weights;  // [out x in] per layer
  std::vector<Eigen::VectorXd> biases;

  std::size_t count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights.size(); ++l)
      n += static_cast<std::size_t>(weights[l].size() + biases[l].size());
    return n;
  }
};

/// A trained (or trainable) surrogate: architecture, parameters and the
/// input normalization it was fitted under.
struct Network {
  NetworkSpec spec;
  NetworkParams params;
  InputMap input_map;
};

/// Canonical parameter order: per layer, weights row-major, then biases.
/// The same order is used for tape leaves, optimizer state and model files.
template <class F>
void for_each_param(NetworkParams& p, F&& f) {
  int id = 0;
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    auto& w = p.weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) f(w(r, c), id++);
    auto& b = p.biases[l];
    for (Eigen::Index r = 0; r < b.size(); ++r) f(b(r), id++);
  }
}

template <class F>
void for_each_param(const NetworkParams& p, F&& f) {
  for_each_param(const_cast<NetworkParams&>(p), [&](double& v, int id) {
    f(static_cast<const double&>(v), id);
  });
}

/// Seeded initialization. tanh nets take Glorot-uniform weights and zero
/// biases. Sine nets follow the SIREN scheme: first layer U(+-1/fan_in),
/// deeper layers U(+-sqrt(6/fan_in)/omega0), biases U(+-1/sqrt(fan_in)).
inline NetworkParams init_network(const NetworkSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  NetworkParams p;
  const int n_layers = spec.layer_count();
  p.weights.reserve(static_cast<std::size_t>(n_layers));
  p.biases.reserve(static_cast<std::size_t>(n_layers));
  for (int l = 0; l < n_layers; ++l) {
    const int fan_in = spec.widths[static_cast<std::size_t>(l)];
    const int fan_out = spec.widths[static_cast<std::size_t>(l) + 1];
    Eigen::MatrixXd w(fan_out, fan_in);
    Eigen::VectorXd b(fan_out);
    if (spec.activation == Activation::kSin) {
      const double bound =
          l == 0 ? 1.0 / fan_in : std::sqrt(6.0 / fan_in) / spec.omega0;
      for (Eigen::Index r = 0; r < w.rows(); ++r)
        for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = rng.uniform(-bound, bound);
      const double b_bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
      for (Eigen::Index r = 0; r < b.size(); ++r) b(r) = rng.uniform(-b_bound, b_bound);
    } else {
      const double bound = std::sqrt(6.0 / (fan_in + fan_out));
      for (Eigen::Index r = 0; r < w.rows(); ++r)
        for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = rng.uniform(-bound, bound);
      b.setZero();
    }
    p.weights.push_back(std::move(w));
    p.biases.push_back(std::move(b));
  }
  return p;
}

/// Evaluates u-hat for a batch of physical coordinates. Accumulation order
/// per neuron matches the tape's dot kernel, so the result is bit-identical
/// to the order-0 jet output.
inline Eigen::ArrayXd predict(const Network& net,
                              const Eigen::Ref<const Eigen::ArrayXd>& x,
                              const Eigen::Ref<const Eigen::ArrayXd>& t) {
  if (x.size() != t.size()) throw ShapeError("predict: x/t size mismatch");
  const Eigen::Index n = x.size();
  const auto& spec = net.spec;
  const auto& p = net.params;
  std::vector<Eigen::ArrayXd> act;
  act.emplace_back(net.input_map.x_scale * x + net.input_map.x_offset);
  act.emplace_back(net.input_map.t_scale * t + net.input_map.t_offset);
  const int n_layers = spec.layer_count();
  std::vector<Eigen::ArrayXd> next;
  for (int l = 0; l < n_layers; ++l) {
    const auto& w = p.weights[static_cast<std::size_t>(l)];
    const auto& b = p.biases[static_cast<std::size_t>(l)];
    next.assign(static_cast<std::size_t>(w.rows()), Eigen::ArrayXd(n));
    const bool last = l == n_layers - 1;
    for (Eigen::Index o = 0; o < w.rows(); ++o) {
      Eigen::ArrayXd& z = next[static_cast<std::size_t>(o)];
      z.setConstant(b(o));
      for (Eigen::Index i = 0; i < w.cols(); ++i) z += w(o, i) * act[static_cast<std::size_t>(i)];
      if (!last) {
        if (spec.activation == Activation::kSin) {
          for (Eigen::Index k = 0; k < n; ++k) z(k) = std::sin(spec.omega0 * z(k));
        } else {
          for (Eigen::Index k = 0; k < n; ++k) z(k) = std::tanh(z(k));
        }
      }
    }
    act.swap(next);
  }
  return act[0];
}

/// Graph handles for one batch: u-hat, its spatial derivatives up to the
/// requested order, and u-hat_t, each a lane node on the tape.
struct SurrogateJets {
  NodeId u = kNoNode;
  std::vector<NodeId> du_dx;  // du_dx[k-1] = d^k u / dx^k
  NodeId du_dt = kNoNode;
};

namespace detail {

inline std::vector<std::vector<NodeId>> build_param_leaves(Tape& tape, const NetworkParams& p) {
  std::vector<std::vector<NodeId>> nodes(p.weights.size() + p.biases.size());
  int id = 0;
  std::vector<std::vector<NodeId>> out(p.weights.size());
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    const auto& w = p.weights[l];
    const auto& b = p.biases[l];
    auto& layer = out[l];
    layer.reserve(static_cast<std::size_t>(w.size() + b.size()));
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) layer.push_back(tape.leaf(w(r, c), id++));
    for (Eigen::Index r = 0; r < b.size(); ++r) layer.push_back(tape.leaf(b(r), id++));
  }
  return out;
}

/// One forward pass propagating jets of a fixed order through every layer.
inline Jet forward_jets(Tape& tape, const NetworkSpec& spec,
                        const std::vector<std::vector<NodeId>>& leaves, Jet in_x, Jet in_t) {
  const int order = in_x.order();
  std::vector<Jet> act{std::move(in_x), std::move(in_t)};
  std::vector<std::pair<NodeId, NodeId>> pairs;
  const int n_layers = spec.layer_count();
  for (int l = 0; l < n_layers; ++l) {
    const int fan_in = spec.widths[static_cast<std::size_t>(l)];
    const int fan_out = spec.widths[static_cast<std::size_t>(l) + 1];
    const auto& layer = leaves[static_cast<std::size_t>(l)];
    const bool last = l == n_layers - 1;
    std::vector<Jet> next(static_cast<std::size_t>(fan_out));
    for (int o = 0; o < fan_out; ++o) {
      Jet z;
      z.c.resize(static_cast<std::size_t>(order) + 1);
      const NodeId bias = layer[static_cast<std::size_t>(fan_out * fan_in + o)];
      for (int k = 0; k <= order; ++k) {
        pairs.clear();
        for (int i = 0; i < fan_in; ++i)
          pairs.emplace_back(layer[static_cast<std::size_t>(o * fan_in + i)],
                             act[static_cast<std::size_t>(i)].c[static_cast<std::size_t>(k)]);
        z.c[static_cast<std::size_t>(k)] = tape.dot(pairs, k == 0 ? bias : kNoNode);
      }
      if (last) {
        next[static_cast<std::size_t>(o)] = std::move(z);  // linear output layer
      } else if (spec.activation == Activation::kSin) {
        for (auto& c : z.c) c = tape.scale(spec.omega0, c);
        next[static_cast<std::size_t>(o)] = jet_compose(tape, z, Activation::kSin);
      } else {
        next[static_cast<std::size_t>(o)] = jet_compose(tape, z, Activation::kTanh);
      }
    }
    act.swap(next);
  }
  return act[0];
}

}  // namespace detail

/// Builds the full jet forward (one order-K pass seeded in x, one order-1
/// pass seeded in t) for a batch of physical coordinates. The tape must
/// have lanes == batch size. Derivatives are with respect to physical
/// coordinates: the input map's chain factors are folded into the seeds.
inline SurrogateJets build_surrogate_jets(Tape& tape, const Network& net,
                                          const Eigen::Ref<const Eigen::ArrayXd>& x,
                                          const Eigen::Ref<const Eigen::ArrayXd>& t,
                                          int deriv_order) {
  if (deriv_order < 1 || deriv_order > kMaxJetOrder)
    throw CapabilityError("derivative order must be in 1..4");
  if (x.size() != tape.lanes() || t.size() != tape.lanes())
    throw ShapeError("coordinate batch size != tape lanes");
  net.spec.validate();

  const auto leaves = detail::build_param_leaves(tape, net.params);
  const Eigen::ArrayXd xn = net.input_map.x_scale * x + net.input_map.x_offset;
  const Eigen::ArrayXd tn = net.input_map.t_scale * t + net.input_map.t_offset;

  SurrogateJets out;
  {
    Jet jx = seed_jet(tape, xn, net.input_map.x_scale, deriv_order);
    Jet jt = constant_jet(tape, tn, deriv_order);
    Jet u = detail::forward_jets(tape, net.spec, leaves, std::move(jx), std::move(jt));
    out.u = u.c[0];
    out.du_dx.assign(u.c.begin() + 1, u.c.end());
  }
  {
    Jet jx = constant_jet(tape, xn, 1);
    Jet jt = seed_jet(tape, tn, net.input_map.t_scale, 1);
    Jet u = detail::forward_jets(tape, net.spec, leaves, std::move(jx), std::move(jt));
    out.du_dt = u.c[1];
  }
  return out;
}

/// Numeric convenience wrapper: one row per point with columns
/// (u, u_t, u_x, ..., d^K u/dx^K). Evaluation is chunked internally.
inline Eigen::MatrixXd predict_with_derivatives(const Network& net,
                                                const Eigen::Ref<const Eigen::ArrayXd>& x,
                                                const Eigen::Ref<const Eigen::ArrayXd>& t,
                                                int deriv_order, Eigen::Index chunk = 1024) {
  if (x.size() != t.size()) throw ShapeError("predict_with_derivatives: x/t size mismatch");
  const Eigen::Index n = x.size();
  Eigen::MatrixXd out(n, deriv_order + 2);
  for (Eigen::Index start = 0; start < n; start += chunk) {
    const Eigen::Index len = std::min(chunk, n - start);
    Tape tape(len);
    const auto jets = build_surrogate_jets(tape, net, x.segment(start, len),
                                           t.segment(start, len), deriv_order);
    out.col(0).segment(start, len) = tape.lane_values(jets.u);
    out.col(1).segment(start, len) = tape.lane_values(jets.du_dt);
    for (int k = 0; k < deriv_order; ++k)
      out.col(2 + k).segment(start, len) =
          tape.lane_values(jets.du_dx[static_cast<std::size_t>(k)]);
  }
  return out;
}

// ---- model file I/O ---------------------------------------------------------

/// Versioned text format: header line, architecture, input map, then one
/// row-major weight block and one bias row per layer at f64 round-trip
/// precision.
inline void save_network(const Network& net, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ArgumentError("cannot open model file for writing: " + path);
  f << "pdedisc-model v1\n";
  f << "activation " << to_string(net.spec.activation) << "\n";
  f << "omega0 " << fmt17(net.spec.omega0) << "\n";
  f << "seed " << net.spec.seed << "\n";
  f << "widths";
  for (const int w : net.spec.widths) f << ' ' << w;
  f << "\n";
  f << "input_map " << fmt17(net.input_map.x_scale) << ' ' << fmt17(net.input_map.x_offset)
    << ' ' << fmt17(net.input_map.t_scale) << ' ' << fmt17(net.input_map.t_offset) << "\n";
  for (std::size_t l = 0; l < net.params.weights.size(); ++l) {
    const auto& w = net.params.weights[l];
    f << "layer " << l << "\n";
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) f << (c ? " " : "") << fmt17(w(r, c));
      f << "\n";
    }
    const auto& b = net.params.biases[l];
    for (Eigen::Index r = 0; r < b.size(); ++r) f << (r ? " " : "") << fmt17(b(r));
    f << "\n";
  }
  if (!f) throw ArgumentError("failed writing model file: " + path);
}

inline Network load_network(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ArgumentError("cannot open model file: " + path);
  std::string line;
  std::getline(f, line);
  if (line != "pdedisc-model v1") throw ConfigError("unrecognized model file header: " + line);
  Network net;
  std::string key, act;
  f >> key >> act;
  if (key != "activation") throw ConfigError("model file: expected activation");
  if (act == "tanh")
    net.spec.activation = Activation::kTanh;
  else if (act == "sin")
    net.spec.activation = Activation::kSin;
  else
    throw ConfigError("model file: unknown activation " + act);
  f >> key >> net.spec.omega0;
  if (key != "omega0") throw ConfigError("model file: expected omega0");
  f >> key >> net.spec.seed;
  if (key != "seed") throw ConfigError("model file: expected seed");
  f >> key;
  if (key != "widths") throw ConfigError("model file: expected widths");
  {
    std::getline(f, line);
    std::istringstream ss(line);
    int w;
    while (ss >> w) net.spec.widths.push_back(w);
  }
  f >> key >> net.input_map.x_scale >> net.input_map.x_offset >> net.input_map.t_scale >>
      net.input_map.t_offset;
  if (key != "input_map") throw ConfigError("model file: expected input_map");
  net.spec.validate();
  for (int l = 0; l < net.spec.layer_count(); ++l) {
    std::size_t idx;
    f >> key >> idx;
    if (key != "layer" || idx != static_cast<std::size_t>(l))
      throw ConfigError("model file: bad layer block");
    const int fan_in = net.spec.widths[static_cast<std::size_t>(l)];
    const int fan_out = net.spec.widths[static_cast<std::size_t>(l) + 1];
    Eigen::MatrixXd w(fan_out, fan_in);
    Eigen::VectorXd b(fan_out);
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c)
        if (!(f >> w(r, c))) throw ConfigError("model file: truncated weights");
    for (Eigen::Index r = 0; r < b.size(); ++r)
      if (!(f >> b(r))) throw ConfigError("model file: truncated biases");
    net.params.weights.push_back(std::move(w));
    net.params.biases.push_back(std::move(b));
  }
  return net;
}

}  // namespace pdedisc
