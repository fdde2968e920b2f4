#pragma once

#include "harmonet/common.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <vector>

namespace harmonet {

// Uniform bucket grid over a point set with per-axis cell sizes. Queries
// return candidate ids inside an axis-aligned window; callers filter by the
// actual metric. Ids come back sorted so downstream loops are deterministic.
class GridIndex {
 public:
  GridIndex() = default;

  GridIndex(Vec origin, Vec cell_sizes) : origin_(std::move(origin)), cell_(std::move(cell_sizes)) {}

  int dim() const { return static_cast<int>(cell_.size()); }
  bool empty() const { return count_ == 0; }
  std::size_t size() const { return count_; }

  void insert(const Point& p, int id) {
    buckets_[key_of(p)].push_back(id);
    ++count_;
  }

  // All ids whose point could lie within |halfwidths| of center per axis.
  void query_box(const Point& center, const Vec& halfwidths, std::vector<int>& out) const {
    out.clear();
    if (count_ == 0) return;
    const int d = dim();
    std::int64_t lo[kMaxDim], hi[kMaxDim], cur[kMaxDim];
    for (int a = 0; a < d; ++a) {
      lo[a] = cell_index(center[a] - halfwidths[a], a);
      hi[a] = cell_index(center[a] + halfwidths[a], a);
      cur[a] = lo[a];
    }
    while (true) {
      auto it = buckets_.find(pack(cur, d));
      if (it != buckets_.end()) out.insert(out.end(), it->second.begin(), it->second.end());
      int a = 0;
      for (; a < d; ++a) {
        if (++cur[a] <= hi[a]) break;
        cur[a] = lo[a];
      }
      if (a == d) break;
    }
    std::sort(out.begin(), out.end());
  }

 private:
  static constexpr int kMaxDim = 8;

  std::int64_t cell_index(double x, int axis) const {
    return static_cast<std::int64_t>(std::floor((x - origin_[axis]) / cell_[axis]));
  }

  std::uint64_t key_of(const Point& p) const {
    std::int64_t idx[kMaxDim];
    for (int a = 0; a < dim(); ++a) idx[a] = cell_index(p[a], a);
    return pack(idx, dim());
  }

  std::uint64_t pack(const std::int64_t* idx, int d) const {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (int a = 0; a < d; ++a) h = hash_mix(h, static_cast<std::uint64_t>(idx[a]));
    return h;
  }

  Vec origin_;
  Vec cell_;
  std::unordered_map<std::uint64_t, std::vector<int>> buckets_;
  std::size_t count_ = 0;
};

}  // namespace harmonet
