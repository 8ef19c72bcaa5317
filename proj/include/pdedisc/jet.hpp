#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "pdedisc/errors.hpp"
#include "pdedisc/tape.hpp"

namespace pdedisc {

enum class Activation { kTanh, kSin, kIdentity };

inline std::string to_string(Activation a) {
  switch (a) {
    case Activation::kTanh:
      return "tanh";
    case Activation::kSin:
      return "sin";
    case Activation::kIdentity:
      return "identity";
  }
  return "?";
}

/// Truncated jet of a scalar quantity: c[k] is the k-th derivative with
/// respect to one chosen input, as a graph node. c.size() == order + 1.
struct Jet {
  std::vector<NodeId> c;

  int order() const { return static_cast<int>(c.size()) - 1; }
};

inline constexpr int kMaxJetOrder = 4;
inline constexpr std::array<double, kMaxJetOrder + 1> kFactorial = {1.0, 1.0, 2.0, 6.0, 24.0};

/// Jet of the seed coordinate itself: value varies per lane, first
/// derivative is the (constant) chain-rule factor of the input map.
inline Jet seed_jet(Tape& tape, const Eigen::Ref<const Eigen::ArrayXd>& values,
                    double chain_factor, int order) {
  Jet j;
  j.c.push_back(tape.constant_lanes(values));
  j.c.push_back(tape.constant(chain_factor));
  for (int k = 2; k <= order; ++k) j.c.push_back(tape.constant(0.0));
  return j;
}

/// Jet of a quantity held constant w.r.t. the seed coordinate.
inline Jet constant_jet(Tape& tape, const Eigen::Ref<const Eigen::ArrayXd>& values, int order) {
  Jet j;
  j.c.push_back(tape.constant_lanes(values));
  for (int k = 1; k <= order; ++k) j.c.push_back(tape.constant(0.0));
  return j;
}

namespace detail {

inline NodeId scaled(Tape& tape, double f, NodeId x) {
  return f == 1.0 ? x : tape.scale(f, x);
}

}  // namespace detail

// Composes an activation through a jet by propagating truncated Taylor
// series. Internally works on Taylor coefficients u_k = c_k / k!; the
// elementary recurrences follow from v' = (1 - v^2) u' for tanh and the
// coupled pair s' = c u', c' = -s u' for sine. Every output coefficient is
// a graph node, so reverse-mode sweeps can traverse the composition.
inline Jet jet_compose(Tape& tape, const Jet& input, Activation activation) {
  const int order = input.order();
  if (order < 1) throw ShapeError("jet_compose requires order >= 1");
  if (order > kMaxJetOrder)
    throw CapabilityError("jet order " + std::to_string(order) + " exceeds supported maximum " +
                          std::to_string(kMaxJetOrder));
  if (activation != Activation::kTanh && activation != Activation::kSin &&
      activation != Activation::kIdentity)
    throw ConfigError("unsupported activation kind");
  if (activation == Activation::kIdentity) return input;

  // Derivative values -> Taylor coefficients.
  std::vector<NodeId> u(static_cast<std::size_t>(order) + 1);
  for (int k = 0; k <= order; ++k)
    u[static_cast<std::size_t>(k)] = detail::scaled(tape, 1.0 / kFactorial[static_cast<std::size_t>(k)], input.c[static_cast<std::size_t>(k)]);

  // j * u_j, reused across output orders.
  std::vector<NodeId> ju(static_cast<std::size_t>(order) + 1, kNoNode);
  for (int j = 1; j <= order; ++j)
    ju[static_cast<std::size_t>(j)] = detail::scaled(tape, static_cast<double>(j), u[static_cast<std::size_t>(j)]);

  std::vector<NodeId> out(static_cast<std::size_t>(order) + 1);
  std::vector<std::pair<NodeId, NodeId>> pairs;

  if (activation == Activation::kTanh) {
    std::vector<NodeId> v(static_cast<std::size_t>(order) + 1);
    std::vector<NodeId> e(static_cast<std::size_t>(order) + 1);  // Taylor of 1 - v^2
    v[0] = tape.tanh_of(u[0]);
    {
      const NodeId w0 = tape.mul(v[0], v[0]);
      e[0] = tape.add(tape.constant(1.0), tape.neg(w0));
    }
    for (int k = 1; k <= order; ++k) {
      pairs.clear();
      for (int j = 1; j <= k; ++j)
        pairs.emplace_back(ju[static_cast<std::size_t>(j)], e[static_cast<std::size_t>(k - j)]);
      v[static_cast<std::size_t>(k)] = detail::scaled(tape, 1.0 / k, tape.dot(pairs));
      if (k < order) {
        pairs.clear();
        for (int i = 0; i <= k; ++i)
          pairs.emplace_back(v[static_cast<std::size_t>(i)], v[static_cast<std::size_t>(k - i)]);
        e[static_cast<std::size_t>(k)] = tape.neg(tape.dot(pairs));
      }
    }
    for (int k = 0; k <= order; ++k)
      out[static_cast<std::size_t>(k)] =
          detail::scaled(tape, kFactorial[static_cast<std::size_t>(k)], v[static_cast<std::size_t>(k)]);
  } else {  // sine
    std::vector<NodeId> s(static_cast<std::size_t>(order) + 1);
    std::vector<NodeId> c(static_cast<std::size_t>(order) + 1);
    s[0] = tape.sin_of(u[0]);
    c[0] = tape.cos_of(u[0]);
    for (int k = 1; k <= order; ++k) {
      pairs.clear();
      for (int j = 1; j <= k; ++j)
        pairs.emplace_back(ju[static_cast<std::size_t>(j)], c[static_cast<std::size_t>(k - j)]);
      s[static_cast<std::size_t>(k)] = detail::scaled(tape, 1.0 / k, tape.dot(pairs));
      pairs.clear();
      for (int j = 1; j <= k; ++j)
        pairs.emplace_back(ju[static_cast<std::size_t>(j)], s[static_cast<std::size_t>(k - j)]);
      c[static_cast<std::size_t>(k)] = detail::scaled(tape, -1.0 / k, tape.dot(pairs));
    }
    for (int k = 0; k <= order; ++k)
      out[static_cast<std::size_t>(k)] =
          detail::scaled(tape, kFactorial[static_cast<std::size_t>(k)], s[static_cast<std::size_t>(k)]);
  }
  return Jet{std::move(out)};
}

}  // namespace pdedisc
