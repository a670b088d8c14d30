#include "dronesafe/geometry.hpp"

#include <numbers>

namespace dronesafe {

std::string_view sector_name(Sector s) {
  switch (s) {
    case Sector::kEast:
      return "EAST";
    case Sector::kNorth:
      return "NORTH";
    case Sector::kWest:
      return "WEST";
    case Sector::kSouth:
      return "SOUTH";
  }
  return "UNKNOWN";
}

std::optional<Sector> parse_sector(std::string_view name) {
  for (Sector s : kAllSectors) {
    if (sector_name(s) == name) return s;
  }
  return std::nullopt;
}

std::optional<Sector> sector_of(Vec2 p, Vec2 origin) {
  const Vec2 d = p - origin;
  if (d.x == 0.0 && d.y == 0.0) return std::nullopt;
  // Rotate by 45 degrees so each wedge becomes a quadrant.
  const double u = d.x + d.y;
  const double w = d.x - d.y;
  if (u > 0.0 && w >= 0.0) return Sector::kEast;
  if (u >= 0.0 && w < 0.0) return Sector::kNorth;
  if (u < 0.0 && w <= 0.0) return Sector::kWest;
  return Sector::kSouth;
}

Vec2 sector_axis(Sector s) {
  switch (s) {
    case Sector::kEast:
      return {1.0, 0.0};
    case Sector::kNorth:
      return {0.0, 1.0};
    case Sector::kWest:
      return {-1.0, 0.0};
    case Sector::kSouth:
      return {0.0, -1.0};
  }
  return {};
}

}  // namespace dronesafe
