#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string_view>

namespace dronesafe {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2 a, Vec2 b) = default;

  double norm() const { return std::hypot(x, y); }
};

inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

// Four 90-degree wedges centred on the coordinate axes.
enum class Sector : std::uint8_t { kEast = 0, kNorth = 1, kWest = 2, kSouth = 3 };

inline constexpr std::array<Sector, 4> kAllSectors = {Sector::kEast, Sector::kNorth,
                                                      Sector::kWest, Sector::kSouth};
inline constexpr int kSectorCount = 4;

constexpr int index_of(Sector s) { return static_cast<int>(s); }

std::string_view sector_name(Sector s);
std::optional<Sector> parse_sector(std::string_view name);

// Wedge containing `p` relative to `origin`. Boundary rays belong to the
// wedge reached counter-clockwise; the origin itself has no sector.
std::optional<Sector> sector_of(Vec2 p, Vec2 origin = {});

// Unit vector along the wedge's centre line.
Vec2 sector_axis(Sector s);

}  // namespace dronesafe
