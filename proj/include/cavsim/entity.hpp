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

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace cavsim
{

using EntityId = std::uint64_t;

enum class EntityClass { kVehicle, kPedestrian };

/// Collision/alert pair category. Pedestrian-with-pedestrian pairs are never
/// analyzed, so there is no kPedPed.
enum class PairKind { kVehVeh, kVehPed };

inline PairKind pair_kind_of(EntityClass a, EntityClass b)
{
  if (a == EntityClass::kPedestrian && b == EntityClass::kPedestrian) {
    throw std::logic_error{"pedestrian-with-pedestrian pairs are not analyzed"};
  }
  return (a == EntityClass::kPedestrian || b == EntityClass::kPedestrian) ? PairKind::kVehPed
                                                                          : PairKind::kVehVeh;
}

/// Unordered entity pair; (a, b) and (b, a) compare equal.
struct PairKey
{
  EntityId a = 0;
  EntityId b = 0;

  PairKey() = default;
  PairKey(EntityId x, EntityId y) : a(x < y ? x : y), b(x < y ? y : x) {}

  auto operator<=>(const PairKey &) const = default;

  bool contains(EntityId id) const { return id == a || id == b; }
};

inline std::string to_string(EntityClass c)
{
  return c == EntityClass::kVehicle ? "vehicle" : "pedestrian";
}

inline std::string to_string(PairKind k) { return k == PairKind::kVehVeh ? "veh_veh" : "veh_ped"; }

inline EntityClass entity_class_from_string(const std::string & s)
{
  if (s == "vehicle") return EntityClass::kVehicle;
  if (s == "pedestrian") return EntityClass::kPedestrian;
  throw std::invalid_argument{"unknown entity class: " + s};
}

inline PairKind pair_kind_from_string(const std::string & s)
{
  if (s == "veh_veh") return PairKind::kVehVeh;
  if (s == "veh_ped") return PairKind::kVehPed;
  throw std::invalid_argument{"unknown pair kind: " + s};
}

}  // namespace cavsim
