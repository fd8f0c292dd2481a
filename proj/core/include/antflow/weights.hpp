#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "antflow/graph.hpp"

namespace antflow {

/// Per-edge nonnegative weights, indexed by EdgeIndex of the graph they
/// belong to. Holds either raw counts W_e(n) or normalized values.
class WeightVector {
 public:
  WeightVector() = default;
  explicit WeightVector(std::vector<double> values) : values_(std::move(values)) {}
  WeightVector(std::initializer_list<double> values) : values_(values) {}

  static WeightVector filled(std::size_t edges, double value) {
    return WeightVector(std::vector<double>(edges, value));
  }
  static WeightVector ones(const MarkedGraph& g) { return filled(g.edge_count(), 1.0); }

  std::size_t size() const noexcept { return values_.size(); }
  double& operator[](EdgeIndex e) { return values_[e]; }
  double operator[](EdgeIndex e) const { return values_[e]; }
  double at(EdgeIndex e) const { return values_.at(e); }

  std::span<const double> values() const noexcept { return values_; }
  std::vector<double>& raw() noexcept { return values_; }
  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }

  /// Every entry lies in [0, 1].
  bool is_normalized() const noexcept;

  WeightVector scaled(double factor) const;

  friend bool operator==(const WeightVector&, const WeightVector&) = default;

 private:
  std::vector<double> values_;
};

/// Throws GraphError when `w` does not have one finite nonnegative entry per edge.
void validate(const MarkedGraph& g, const WeightVector& w);

double sup_distance(std::span<const double> a, std::span<const double> b);

/// pi(x) per node.
using NodeMeasure = std::vector<double>;

}  // namespace antflow
