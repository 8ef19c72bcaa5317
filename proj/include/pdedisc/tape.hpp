#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "pdedisc/errors.hpp"

namespace pdedisc {

using NodeId = std::int32_t;
inline constexpr NodeId kNoNode = -1;

enum class OpKind : std::uint8_t {
  kConst,
  kLeaf,
  kAdd,
  kMul,
  kNeg,
  kScale,
  kTanh,
  kSin,
  kDot,  // fused weighted sum: bias + sum_i p_i * q_i
  kSum,  // lane reduction to a scalar
};

/// Reverse-mode gradient w.r.t. trainable leaves. Leaves never reached by
/// the backward sweep read as zero and report contains() == false.
class Gradient {
 public:
  Gradient() = default;
  explicit Gradient(std::size_t n_params) : val_(n_params, 0.0), present_(n_params, 0) {}

  double operator[](int param_id) const {
    if (param_id < 0 || static_cast<std::size_t>(param_id) >= val_.size()) return 0.0;
    return val_[static_cast<std::size_t>(param_id)];
  }
  bool contains(int param_id) const {
    return param_id >= 0 && static_cast<std::size_t>(param_id) < present_.size() &&
           present_[static_cast<std::size_t>(param_id)] != 0;
  }
  std::size_t size() const { return val_.size(); }

  void set(int param_id, double g) {
    val_[static_cast<std::size_t>(param_id)] = g;
    present_[static_cast<std::size_t>(param_id)] = 1;
  }

  /// Accumulate another gradient (used for fixed-order chunk merges).
  void add_in_place(const Gradient& other) {
    if (val_.size() < other.val_.size()) {
      val_.resize(other.val_.size(), 0.0);
      present_.resize(other.present_.size(), 0);
    }
    for (std::size_t i = 0; i < other.val_.size(); ++i) {
      if (other.present_[i]) {
        val_[i] += other.val_[i];
        present_[i] = 1;
      }
    }
  }

  const std::vector<double>& values() const { return val_; }

 private:
  std::vector<double> val_;
  std::vector<std::uint8_t> present_;
};

// Scalar-graph tape with lane-batched values. A node holds either one
// scalar (parameters, reductions) or one value per lane (per-sample
// quantities); elementwise ops broadcast scalars across lanes. The graph
// is acyclic by construction: parents always have smaller indices.
//
// kDot and kSum are fused forms of mul/add trees kept for throughput;
// their semantics (and gradients) are exactly those of the expanded tree.
class Tape {
 public:
  explicit Tape(Eigen::Index lanes = 1) : lanes_(lanes) {
    if (lanes < 1) throw ArgumentError("Tape lane count must be >= 1");
  }

  Eigen::Index lanes() const { return lanes_; }
  std::size_t size() const { return kind_.size(); }
  std::size_t param_count() const { return leaf_param_of_.size(); }

  /// Drop all nodes but keep allocated buffers.
  void clear() {
    kind_.clear();
    a_.clear();
    b_.clear();
    aux_.clear();
    slot_.clear();
    is_lane_.clear();
    dot_offset_.clear();
    dot_count_.clear();
    pairs_.clear();
    leaf_node_.clear();
    leaf_param_of_.clear();
    stamp_.clear();
    n_lane_cols_ = 0;
    n_scalars_ = 0;
    max_param_id_ = -1;
  }

  NodeId constant(double v) {
    const NodeId id = push(OpKind::kConst, kNoNode, kNoNode, 0.0, false);
    scalar_at(id) = v;
    return id;
  }

  /// Per-lane constant (sample coordinates, observed values).
  NodeId constant_lanes(const Eigen::Ref<const Eigen::ArrayXd>& v) {
    if (v.size() != lanes_) throw ShapeError("constant_lanes size != tape lanes");
    const NodeId id = push(OpKind::kConst, kNoNode, kNoNode, 0.0, true);
    col(id) = v;
    return id;
  }

  /// Trainable scalar leaf identified by param_id.
  NodeId leaf(double v, int param_id) {
    if (param_id < 0) throw ArgumentError("param_id must be >= 0");
    const NodeId id = push(OpKind::kLeaf, kNoNode, kNoNode, 0.0, false);
    scalar_at(id) = v;
    leaf_node_.push_back(id);
    leaf_param_of_.push_back(param_id);
    max_param_id_ = std::max(max_param_id_, param_id);
    return id;
  }

  NodeId add(NodeId x, NodeId y) {
    const bool lane = is_lane_[x] || is_lane_[y];
    const NodeId id = push(OpKind::kAdd, x, y, 0.0, lane);
    eval_add(id);
    return id;
  }

  NodeId mul(NodeId x, NodeId y) {
    const bool lane = is_lane_[x] || is_lane_[y];
    const NodeId id = push(OpKind::kMul, x, y, 0.0, lane);
    eval_mul(id);
    return id;
  }

  NodeId neg(NodeId x) {
    const NodeId id = push(OpKind::kNeg, x, kNoNode, 0.0, is_lane_[x]);
    eval_neg(id);
    return id;
  }

  NodeId scale(double c, NodeId x) {
    const NodeId id = push(OpKind::kScale, x, kNoNode, c, is_lane_[x]);
    eval_scale(id);
    return id;
  }

  NodeId sub(NodeId x, NodeId y) { return add(x, neg(y)); }

  NodeId tanh_of(NodeId x) {
    const NodeId id = push(OpKind::kTanh, x, kNoNode, 0.0, is_lane_[x]);
    eval_tanh(id);
    return id;
  }

  NodeId sin_of(NodeId x) {
    const NodeId id = push(OpKind::kSin, x, kNoNode, 0.0, is_lane_[x]);
    eval_sin(id);
    return id;
  }

  NodeId cos_of(NodeId x) { return sin_of(add(x, constant(std::numbers::pi / 2))); }

  /// bias + sum_i pairs[i].first * pairs[i].second, accumulated in pair order.
  NodeId dot(std::span<const std::pair<NodeId, NodeId>> pairs, NodeId bias = kNoNode) {
    bool lane = false;
    for (const auto& [p, q] : pairs) lane = lane || is_lane_[p] || is_lane_[q];
    if (bias != kNoNode && is_lane_[bias]) lane = true;
    const auto offset = static_cast<std::int32_t>(pairs_.size());
    for (const auto& [p, q] : pairs) {
      pairs_.push_back(p);
      pairs_.push_back(q);
    }
    const NodeId id = push(OpKind::kDot, bias, kNoNode, 0.0, lane);
    dot_offset_[static_cast<std::size_t>(id)] = offset;
    dot_count_[static_cast<std::size_t>(id)] = static_cast<std::int32_t>(pairs.size());
    eval_dot(id);
    return id;
  }

  /// Sum of a lane node over its lanes; the result is a scalar node.
  NodeId lane_sum(NodeId x) {
    if (!is_lane_[x]) throw ShapeError("lane_sum requires a lane node");
    const NodeId id = push(OpKind::kSum, x, kNoNode, 0.0, false);
    eval_sum(id);
    return id;
  }

  bool is_lane(NodeId id) const { return is_lane_[id]; }
  OpKind kind(NodeId id) const { return kind_[static_cast<std::size_t>(id)]; }

  /// Scalar value; for lane nodes this requires a single-lane tape.
  double value(NodeId id) const {
    if (!is_lane_[id]) return scalar_vals_[slot_[static_cast<std::size_t>(id)]];
    if (lanes_ != 1) throw ShapeError("value() on a lane node of a multi-lane tape");
    return lane_vals_(0, slot_[static_cast<std::size_t>(id)]);
  }

  /// Per-lane values (scalars are broadcast).
  Eigen::ArrayXd lane_values(NodeId id) const {
    if (is_lane_[id]) return lane_vals_.col(slot_[static_cast<std::size_t>(id)]);
    return Eigen::ArrayXd::Constant(lanes_, scalar_vals_[slot_[static_cast<std::size_t>(id)]]);
  }

  /// Re-evaluate every non-leaf node from its parents in topological order.
  /// Idempotent on an untouched tape.
  void recompute_values() {
    for (NodeId id = 0; id < static_cast<NodeId>(kind_.size()); ++id) {
      switch (kind_[static_cast<std::size_t>(id)]) {
        case OpKind::kConst:
        case OpKind::kLeaf:
          break;
        case OpKind::kAdd:
          eval_add(id);
          break;
        case OpKind::kMul:
          eval_mul(id);
          break;
        case OpKind::kNeg:
          eval_neg(id);
          break;
        case OpKind::kScale:
          eval_scale(id);
          break;
        case OpKind::kTanh:
          eval_tanh(id);
          break;
        case OpKind::kSin:
          eval_sin(id);
          break;
        case OpKind::kDot:
          eval_dot(id);
          break;
        case OpKind::kSum:
          eval_sum(id);
          break;
      }
    }
  }

  /// Reverse sweep from a scalar-valued node. Returns the exact gradient of
  /// that value w.r.t. every trainable leaf it reaches. Throws NumericError
  /// (with the offending node index) if the sweep produced non-finite values.
  Gradient backward(NodeId loss) {
    if (is_lane_[loss] && lanes_ != 1)
      throw ShapeError("backward requires a scalar loss node; reduce with lane_sum first");
    prepare_adjoints();
    seed(loss, 1.0);

    for (NodeId id = loss; id >= 0; --id) {
      const auto i = static_cast<std::size_t>(id);
      if (stamp_[i] != sweep_) continue;  // unreached
      switch (kind_[i]) {
        case OpKind::kConst:
        case OpKind::kLeaf:
          break;
        case OpKind::kAdd:
          propagate_identity(id, a_[i]);
          propagate_identity(id, b_[i]);
          break;
        case OpKind::kMul:
          propagate_product(id, a_[i], b_[i]);
          propagate_product(id, b_[i], a_[i]);
          break;
        case OpKind::kNeg:
          propagate_scaled(id, a_[i], -1.0);
          break;
        case OpKind::kScale:
          propagate_scaled(id, a_[i], aux_[i]);
          break;
        case OpKind::kTanh:
          propagate_tanh(id, a_[i]);
          break;
        case OpKind::kSin:
          propagate_sin(id, a_[i]);
          break;
        case OpKind::kDot: {
          const std::int32_t off = dot_offset_[i];
          const std::int32_t cnt = dot_count_[i];
          if (a_[i] != kNoNode) propagate_identity(id, a_[i]);
          for (std::int32_t k = 0; k < cnt; ++k) {
            const NodeId p = pairs_[static_cast<std::size_t>(off + 2 * k)];
            const NodeId q = pairs_[static_cast<std::size_t>(off + 2 * k + 1)];
            propagate_product(id, p, q);
            propagate_product(id, q, p);
          }
          break;
        }
        case OpKind::kSum:
          propagate_identity(id, a_[i]);
          break;
      }
    }

    Gradient grad(static_cast<std::size_t>(max_param_id_ + 1));
    bool bad_grad = false;
    for (std::size_t k = 0; k < leaf_node_.size(); ++k) {
      const auto node = static_cast<std::size_t>(leaf_node_[k]);
      if (stamp_[node] != sweep_) continue;
      const double g = scalar_adj_[slot_[node]];
      if (!std::isfinite(g)) bad_grad = true;
      grad.set(leaf_param_of_[k], g);
    }
    if (bad_grad || !all_finite(loss)) throw_first_nonfinite();
    return grad;
  }

  /// Index of the first node with a non-finite value, or -1.
  NodeId first_nonfinite_value() const {
    for (NodeId id = 0; id < static_cast<NodeId>(kind_.size()); ++id) {
      const auto i = static_cast<std::size_t>(id);
      if (is_lane_[i]) {
        if (!lane_vals_.col(slot_[i]).isFinite().all()) return id;
      } else if (!std::isfinite(scalar_vals_[slot_[i]])) {
        return id;
      }
    }
    return kNoNode;
  }

 private:
  NodeId push(OpKind k, NodeId a, NodeId b, double aux, bool lane) {
    const NodeId id = static_cast<NodeId>(kind_.size());
    kind_.push_back(k);
    a_.push_back(a);
    b_.push_back(b);
    aux_.push_back(aux);
    is_lane_.push_back(lane);
    if (lane) {
      slot_.push_back(n_lane_cols_++);
      if (lane_vals_.cols() < n_lane_cols_) grow_lane_storage();
    } else {
      slot_.push_back(n_scalars_++);
      if (scalar_vals_.size() < static_cast<std::size_t>(n_scalars_)) {
        scalar_vals_.resize(std::max<std::size_t>(64, scalar_vals_.size() * 2));
      }
    }
    dot_offset_.push_back(0);  // filled by dot() for kDot nodes
    dot_count_.push_back(0);
    return id;
  }

  void grow_lane_storage() {
    const Eigen::Index want = std::max<Eigen::Index>(256, 2 * lane_vals_.cols());
    lane_vals_.conservativeResize(lanes_, std::max<Eigen::Index>(want, n_lane_cols_));
  }

  double& scalar_at(NodeId id) { return scalar_vals_[slot_[static_cast<std::size_t>(id)]]; }
  auto col(NodeId id) { return lane_vals_.col(slot_[static_cast<std::size_t>(id)]); }
  auto col(NodeId id) const { return lane_vals_.col(slot_[static_cast<std::size_t>(id)]); }

  // ---- forward kernels -----------------------------------------------------

  void eval_add(NodeId id) {
    const auto i = static_cast<std::size_t>(id);
    const NodeId x = a_[i], y = b_[i];
    if (!is_lane_[i]) {
      scalar_at(id) = scalar_vals_[slot_[static_cast<std::size_t>(x)]] +
                      scalar_vals_[slot_[static_cast<std::size_t>(y)]];
    } else if (is_lane_[x] && is_lane_[y]) {
      col(id) = col(x) + col(y);
    } else if (is_lane_[x]) {
      col(id) = col(x) + scalar_vals_[slot_[static_cast<std::size_t>(y)]];
    } else {
      col(id) = scalar_vals_[slot_[static_cast<std::size_t>(x)]] + col(y);
    }
  }

  void eval_mul(NodeId id) {
    const auto i = static_cast<std::size_t>(id);
    const NodeId x = a_[i], y = b_[i];
    if (!is_lane_[i]) {
      scalar_at(id) = scalar_vals_[slot_[static_cast<std::size_t>(x)]] *
                      scalar_vals_[slot_[static_cast<std::size_t>(y)]];
    } else if (is_lane_[x] && is_lane_[y]) {
      col(id) = col(x) * col(y);
    } else if (is_lane_[x]) {
      col(id) = col(x) * scalar_vals_[slot_[static_cast<std::size_t>(y)]];
    } else {
      col(id) = scalar_vals_[slot_[static_cast<std::size_t>(x)]] * col(y);
    }
  }

  void eval_neg(NodeId id) {
    const auto i = static_cast<std::size_t>(id);
    if (is_lane_[i]) {
      col(id) = -col(a_[i]);
    } else {
      scalar_at(id) = -scalar_vals_[slot_[static_cast<std::size_t>(a_[i])]];
    }
  }

  void eval_scale(NodeId id) {
    const auto i = static_cast<std::size_t>(id);
    if (is_lane_[i]) {
      col(id) = aux_[i] * col(a_[i]);
    } else {
      scalar_at(id) = aux_[i] * scalar_vals_[slot_[static_cast<std::size_t>(a_[i])]];
    }
  }

  void eval_tanh(NodeId id) {
    const auto i = static_cast<std::size_t>(id);
    if (is_lane_[i]) {
      const auto src = col(a_[i]);
      auto dst = col(id);
      for (Eigen::Index l = 0; l < lanes_; ++l) dst(l) = std::tanh(src(l));
    } else {
      scalar_at(id) = std::tanh(scalar_vals_[slot_[static_cast<std::size_t>(a_[i])]]);
    }
  }

  void eval_sin(NodeId id) {
    const auto i = static_cast<std::size_t>(id);
    if (is_lane_[i]) {
      const auto src = col(a_[i]);
      auto dst = col(id);
      for (Eigen::Index l = 0; l < lanes_; ++l) dst(l) = std::sin(src(l));
    } else {
      scalar_at(id) = std::sin(scalar_vals_[slot_[static_cast<std::size_t>(a_[i])]]);
    }
  }

  void eval_dot(NodeId id) {
    const auto i = static_cast<std::size_t>(id);
    const std::int32_t off = dot_offset_[i];
    const std::int32_t cnt = dot_count_[i];
    const NodeId bias = a_[i];
    if (is_lane_[i]) {
      auto dst = col(id);
      if (bias != kNoNode) {
        if (is_lane_[bias])
          dst = col(bias);
        else
          dst.setConstant(scalar_vals_[slot_[static_cast<std::size_t>(bias)]]);
      } else {
        dst.setZero();
      }
      for (std::int32_t k = 0; k < cnt; ++k) {
        const NodeId p = pairs_[static_cast<std::size_t>(off + 2 * k)];
        const NodeId q = pairs_[static_cast<std::size_t>(off + 2 * k + 1)];
        if (is_lane_[p] && is_lane_[q]) {
          dst += col(p) * col(q);
        } else if (is_lane_[p]) {
          dst += col(p) * scalar_vals_[slot_[static_cast<std::size_t>(q)]];
        } else if (is_lane_[q]) {
          dst += scalar_vals_[slot_[static_cast<std::size_t>(p)]] * col(q);
        } else {
          dst += scalar_vals_[slot_[static_cast<std::size_t>(p)]] *
                 scalar_vals_[slot_[static_cast<std::size_t>(q)]];
        }
      }
    } else {
      double acc = bias != kNoNode ? scalar_vals_[slot_[static_cast<std::size_t>(bias)]] : 0.0;
      for (std::int32_t k = 0; k < cnt; ++k) {
        const NodeId p = pairs_[static_cast<std::size_t>(off + 2 * k)];
        const NodeId q = pairs_[static_cast<std::size_t>(off + 2 * k + 1)];
        acc += scalar_vals_[slot_[static_cast<std::size_t>(p)]] *
               scalar_vals_[slot_[static_cast<std::size_t>(q)]];
      }
      scalar_at(id) = acc;
    }
  }

  void eval_sum(NodeId id) {
    scalar_at(id) = col(a_[static_cast<std::size_t>(id)]).sum();
  }

  // ---- backward ------------------------------------------------------------

  void prepare_adjoints() {
    if (lane_adj_.cols() < lane_vals_.cols() || lane_adj_.rows() != lanes_)
      lane_adj_.resize(lanes_, lane_vals_.cols());
    if (scalar_adj_.size() < scalar_vals_.size()) scalar_adj_.resize(scalar_vals_.size());
    if (stamp_.size() < kind_.size()) stamp_.resize(kind_.size(), 0);
    ++sweep_;
    if (sweep_ == 0) {  // wrapped; reset stamps
      std::fill(stamp_.begin(), stamp_.end(), 0);
      sweep_ = 1;
    }
  }

  auto adj_col(NodeId id) { return lane_adj_.col(slot_[static_cast<std::size_t>(id)]); }

  void seed(NodeId id, double v) {
    const auto i = static_cast<std::size_t>(id);
    stamp_[i] = sweep_;
    if (is_lane_[i])
      adj_col(id).setConstant(v);  // single-lane tape only (checked by caller)
    else
      scalar_adj_[slot_[i]] = v;
  }

  bool fresh(NodeId id) {
    const auto i = static_cast<std::size_t>(id);
    if (stamp_[i] == sweep_) return false;
    stamp_[i] = sweep_;
    return true;
  }

  // child adjoint flows unchanged into parent
  void propagate_identity(NodeId child, NodeId parent) {
    if (parent == kNoNode) return;
    const auto c = static_cast<std::size_t>(child);
    const auto p = static_cast<std::size_t>(parent);
    const bool first = fresh(parent);
    if (is_lane_[p]) {
      if (is_lane_[c]) {
        if (first)
          adj_col(parent) = adj_col(child);
        else
          adj_col(parent) += adj_col(child);
      } else {  // kSum: scalar adjoint broadcast to lanes
        if (first)
          adj_col(parent).setConstant(scalar_adj_[slot_[c]]);
        else
          adj_col(parent) += scalar_adj_[slot_[c]];
      }
    } else {
      const double contrib = is_lane_[c] ? adj_col(child).sum() : scalar_adj_[slot_[c]];
      if (first)
        scalar_adj_[slot_[p]] = contrib;
      else
        scalar_adj_[slot_[p]] += contrib;
    }
  }

  // parent <- child adjoint * value(other)
  void propagate_product(NodeId child, NodeId parent, NodeId other) {
    const auto c = static_cast<std::size_t>(child);
    const auto p = static_cast<std::size_t>(parent);
    const auto o = static_cast<std::size_t>(other);
    const bool first = fresh(parent);
    if (is_lane_[p]) {
      if (is_lane_[o]) {
        if (first)
          adj_col(parent) = adj_col(child) * col(other);
        else
          adj_col(parent) += adj_col(child) * col(other);
      } else {
        const double ov = scalar_vals_[slot_[o]];
        if (first)
          adj_col(parent) = adj_col(child) * ov;
        else
          adj_col(parent) += adj_col(child) * ov;
      }
    } else {
      double contrib;
      if (is_lane_[c]) {
        contrib = is_lane_[o] ? (adj_col(child) * col(other)).sum()
                              : adj_col(child).sum() * scalar_vals_[slot_[o]];
      } else {
        contrib = scalar_adj_[slot_[c]] * (is_lane_[o] ? col(other).sum()  // not expected
                                                       : scalar_vals_[slot_[o]]);
      }
      if (first)
        scalar_adj_[slot_[p]] = contrib;
      else
        scalar_adj_[slot_[p]] += contrib;
    }
  }

  void propagate_scaled(NodeId child, NodeId parent, double factor) {
    const auto c = static_cast<std::size_t>(child);
    const auto p = static_cast<std::size_t>(parent);
    const bool first = fresh(parent);
    if (is_lane_[p]) {
      if (first)
        adj_col(parent) = factor * adj_col(child);
      else
        adj_col(parent) += factor * adj_col(child);
    } else {
      const double contrib =
          factor * (is_lane_[c] ? adj_col(child).sum() : scalar_adj_[slot_[c]]);
      if (first)
        scalar_adj_[slot_[p]] = contrib;
      else
        scalar_adj_[slot_[p]] += contrib;
    }
  }

  void propagate_tanh(NodeId child, NodeId parent) {
    const auto c = static_cast<std::size_t>(child);
    const auto p = static_cast<std::size_t>(parent);
    const bool first = fresh(parent);
    if (is_lane_[p]) {
      const auto v = col(child);  // tanh value
      if (first)
        adj_col(parent) = adj_col(child) * (1.0 - v * v);
      else
        adj_col(parent) += adj_col(child) * (1.0 - v * v);
    } else {
      const double v = scalar_vals_[slot_[c]];
      const double contrib = scalar_adj_[slot_[c]] * (1.0 - v * v);
      if (first)
        scalar_adj_[slot_[p]] = contrib;
      else
        scalar_adj_[slot_[p]] += contrib;
    }
  }

  void propagate_sin(NodeId child, NodeId parent) {
    const auto c = static_cast<std::size_t>(child);
    const auto p = static_cast<std::size_t>(parent);
    const bool first = fresh(parent);
    if (is_lane_[p]) {
      const auto x = col(parent);
      auto dst = adj_col(parent);
      const auto ca = adj_col(child);
      if (first) {
        for (Eigen::Index l = 0; l < lanes_; ++l) dst(l) = ca(l) * std::cos(x(l));
      } else {
        for (Eigen::Index l = 0; l < lanes_; ++l) dst(l) += ca(l) * std::cos(x(l));
      }
    } else {
      const double x = scalar_vals_[slot_[p]];
      const double contrib = scalar_adj_[slot_[c]] * std::cos(x);
      if (first)
        scalar_adj_[slot_[p]] = contrib;
      else
        scalar_adj_[slot_[p]] += contrib;
    }
  }

  bool all_finite(NodeId loss) const {
    const auto i = static_cast<std::size_t>(loss);
    if (is_lane_[i]) return lane_vals_.col(slot_[i]).isFinite().all();
    return std::isfinite(scalar_vals_[slot_[i]]);
  }

  [[noreturn]] void throw_first_nonfinite() {
    NodeId bad = first_nonfinite_value();
    if (bad == kNoNode) {
      // Values fine, so an adjoint overflowed: locate it.
      for (NodeId id = static_cast<NodeId>(kind_.size()) - 1; id >= 0; --id) {
        const auto i = static_cast<std::size_t>(id);
        if (stamp_[i] != sweep_) continue;
        const bool ok = is_lane_[i] ? lane_adj_.col(slot_[i]).isFinite().all()
                                    : std::isfinite(scalar_adj_[slot_[i]]);
        if (!ok) bad = id;
      }
    }
    throw NumericError("non-finite value in backward sweep", bad);
  }

  Eigen::Index lanes_;
  std::vector<OpKind> kind_;
  std::vector<NodeId> a_, b_;
  std::vector<double> aux_;
  std::vector<std::int32_t> slot_;
  std::vector<std::uint8_t> is_lane_;
  std::vector<std::int32_t> dot_offset_, dot_count_;
  std::vector<NodeId> pairs_;
  std::vector<NodeId> leaf_node_;
  std::vector<int> leaf_param_of_;
  int max_param_id_ = -1;

  Eigen::Index n_lane_cols_ = 0;
  std::int32_t n_scalars_ = 0;
  Eigen::ArrayXXd lane_vals_;
  std::vector<double> scalar_vals_;

  Eigen::ArrayXXd lane_adj_;
  std::vector<double> scalar_adj_;
  std::vector<std::uint32_t> stamp_;
  std::uint32_t sweep_ = 0;
};

/// Central-difference gradient estimate, (f(p + h e_i) - f(p - h e_i)) / 2h.
inline Eigen::VectorXd finite_difference_gradient(
    const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& point,
    double h) {
  if (!(h > 0.0)) throw ArgumentError("finite_difference_gradient requires h > 0");
  Eigen::VectorXd g(point.size());
  Eigen::VectorXd p = point;
  for (Eigen::Index i = 0; i < point.size(); ++i) {
    p(i) = point(i) + h;
    const double fp = f(p);
    p(i) = point(i) - h;
    const double fm = f(p);
    p(i) = point(i);
    if (!std::isfinite(fp) || !std::isfinite(fm))
      throw NumericError("non-finite function value in finite differences");
    g(i) = (fp - fm) / (2.0 * h);
  }
  return g;
}

}  // namespace pdedisc
