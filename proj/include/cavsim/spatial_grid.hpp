// Copyright 2026 cavsim contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "cavsim/vec2.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

namespace cavsim
{

/// Uniform grid over the plane for radius queries on moving point payloads.
/// The query walks every cell intersecting the disc's bounding square, so it
/// is sound for any radius regardless of cell size; the cell size only tunes
/// how much is scanned.
template <typename Id>
class UniformGrid
{
public:
  explicit UniformGrid(double cell_size) : cell_(cell_size) {}

  void insert(Id id, const Vec2 & pos) { cells_[key_of(pos)].push_back(id); }

  void remove(Id id, const Vec2 & pos)
  {
    auto it = cells_.find(key_of(pos));
    if (it == cells_.end()) return;
    auto & v = it->second;
    v.erase(std::remove(v.begin(), v.end(), id), v.end());
    if (v.empty()) cells_.erase(it);
  }

  void move(Id id, const Vec2 & from, const Vec2 & to)
  {
    const auto kf = key_of(from);
    const auto kt = key_of(to);
    if (kf == kt) return;
    remove(id, from);
    cells_[kt].push_back(id);
  }

  /// Ids in all cells intersecting the square circumscribing the query disc.
  /// Callers do the exact distance filtering.
  std::vector<Id> query(const Vec2 & center, double radius) const
  {
    std::vector<Id> out;
    const auto lo_x = coord(center.x - radius);
    const auto hi_x = coord(center.x + radius);
    const auto lo_y = coord(center.y - radius);
    const auto hi_y = coord(center.y + radius);
    for (std::int64_t cx = lo_x; cx <= hi_x; ++cx) {
      for (std::int64_t cy = lo_y; cy <= hi_y; ++cy) {
        auto it = cells_.find(pack(cx, cy));
        if (it == cells_.end()) continue;
        out.insert(out.end(), it->second.begin(), it->second.end());
      }
    }
    return out;
  }

  void clear() { cells_.clear(); }

private:
  std::int64_t coord(double v) const { return static_cast<std::int64_t>(std::floor(v / cell_)); }

  static std::uint64_t pack(std::int64_t x, std::int64_t y)
  {
    return (static_cast<std::uint64_t>(x) << 32) ^ static_cast<std::uint64_t>(y & 0xffffffff);
  }

  std::uint64_t key_of(const Vec2 & p) const { return pack(coord(p.x), coord(p.y)); }

  double cell_;
  std::unordered_map<std::uint64_t, std::vector<Id>> cells_;
};

}  // namespace cavsim
