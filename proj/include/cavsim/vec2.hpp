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

#include <cmath>

namespace cavsim
{

/// Plain 2D vector. Units depend on use (m, m/s or m/s^2); no normalization
/// is ever performed implicitly.
struct Vec2
{
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(const Vec2 & o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(const Vec2 & o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 & operator+=(const Vec2 & o)
  {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr bool operator==(const Vec2 & o) const = default;

  constexpr double dot(const Vec2 & o) const { return x * o.x + y * o.y; }
  constexpr double cross(const Vec2 & o) const { return x * o.y - y * o.x; }
  constexpr double norm2() const { return x * x + y * y; }
  double norm() const { return std::hypot(x, y); }

  Vec2 rotated(double angle) const
  {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return {c * x - s * y, s * x + c * y};
  }

  bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

constexpr Vec2 operator*(double s, const Vec2 & v) { return v * s; }

inline double distance(const Vec2 & a, const Vec2 & b) { return (a - b).norm(); }

}  // namespace cavsim
