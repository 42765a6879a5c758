// SPDX-License-Identifier: Apache-2.0
//
// Uniform hash grid over 3-D points for fixed-radius neighbor queries.

#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <unordered_map>
#include <vector>

#include "ppiref/error.hpp"

namespace ppiref {

class SpatialGrid {
 public:
  SpatialGrid(std::span<const Eigen::Vector3d> points, double cell_size)
      : points_(points.begin(), points.end()), cell_(cell_size) {
    if (!(cell_size > 0.0)) fail(ErrorCode::InvalidArgument, "grid cell size must be positive");
    order_.resize(points_.size());
    std::iota(order_.begin(), order_.end(), std::uint32_t{0});
    std::vector<std::uint64_t> keys(points_.size());
    for (std::size_t i = 0; i < points_.size(); ++i) keys[i] = key(cell_of(points_[i]));
    std::stable_sort(order_.begin(), order_.end(), [&](std::uint32_t a, std::uint32_t b) { return keys[a] < keys[b]; });
    for (std::size_t k = 0; k < order_.size();) {
      std::size_t e = k;
      while (e < order_.size() && keys[order_[e]] == keys[order_[k]]) ++e;
      ranges_.emplace(keys[order_[k]], Range{static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(e)});
      k = e;
    }
  }

  std::size_t size() const { return points_.size(); }
  const Eigen::Vector3d& point(std::size_t i) const { return points_[i]; }

  /// Calls visit(index, squared_distance) for every point with
  /// |point - query| <= radius. Visiting order is unspecified.
  template <typename Visitor>
  void for_each_within(const Eigen::Vector3d& query, double radius, Visitor&& visit) const {
    const double r2 = radius * radius;
    const auto reach = static_cast<std::int64_t>(std::ceil(radius / cell_));
    const Cell c = cell_of(query);
    for (std::int64_t dx = -reach; dx <= reach; ++dx)
      for (std::int64_t dy = -reach; dy <= reach; ++dy)
        for (std::int64_t dz = -reach; dz <= reach; ++dz) {
          auto it = ranges_.find(key({c[0] + dx, c[1] + dy, c[2] + dz}));
          if (it == ranges_.end()) continue;
          for (std::uint32_t k = it->second.begin; k < it->second.end; ++k) {
            const std::uint32_t j = order_[k];
            const double d2 = (points_[j] - query).squaredNorm();
            if (d2 <= r2) visit(static_cast<std::size_t>(j), d2);
          }
        }
  }

 private:
  using Cell = std::array<std::int64_t, 3>;
  struct Range {
    std::uint32_t begin, end;
  };

  Cell cell_of(const Eigen::Vector3d& p) const {
    return {static_cast<std::int64_t>(std::floor(p.x() / cell_)), static_cast<std::int64_t>(std::floor(p.y() / cell_)),
            static_cast<std::int64_t>(std::floor(p.z() / cell_))};
  }

  // 21 bits per axis; collisions only merge buckets, queries stay exact
  // because every candidate is distance-checked.
  static std::uint64_t key(const Cell& c) {
    constexpr std::uint64_t mask = (1u << 21) - 1;
    return ((static_cast<std::uint64_t>(c[0]) & mask) << 42) | ((static_cast<std::uint64_t>(c[1]) & mask) << 21) |
           (static_cast<std::uint64_t>(c[2]) & mask);
  }

  std::vector<Eigen::Vector3d> points_;
  double cell_;
  std::vector<std::uint32_t> order_;
  std::unordered_map<std::uint64_t, Range> ranges_;
};

}  // namespace ppiref
