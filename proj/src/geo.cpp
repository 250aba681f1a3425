#include "ecodispatch/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ecodispatch/errors.hpp"

namespace ecodispatch::geo {

namespace {

constexpr double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }

}  // namespace

bool is_valid(const GeoPoint& p) noexcept {
  return std::isfinite(p.lat) && std::isfinite(p.lon) && p.lat >= -90.0 &&
         p.lat <= 90.0 && p.lon >= -180.0 && p.lon <= 180.0;
}

void validate(const GeoPoint& p) {
  if (!is_valid(p)) {
    throw DomainError("invalid coordinate (" + std::to_string(p.lat) + ", " +
                      std::to_string(p.lon) + ")");
  }
}

double haversine_km(const GeoPoint& a, const GeoPoint& b) {
  validate(a);
  validate(b);
  const double dlat = deg2rad(b.lat - a.lat);
  const double dlon = deg2rad(b.lon - a.lon);
  const double u = std::sin(dlat / 2.0);
  const double v = std::sin(dlon / 2.0);
  double h = u * u + std::cos(deg2rad(a.lat)) * std::cos(deg2rad(b.lat)) * v * v;
  h = std::clamp(h, 0.0, 1.0);
  return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(h));
}

double road_distance_km(const GeoPoint& a, const GeoPoint& b, double detour_factor) {
  if (!(detour_factor >= 1.0) || !std::isfinite(detour_factor)) {
    throw DomainError("detour factor must be >= 1, got " + std::to_string(detour_factor));
  }
  return haversine_km(a, b) * detour_factor;
}

GeoPoint offset_km(const GeoPoint& origin, double north_km, double east_km) {
  const double lat = origin.lat + north_km / kEarthRadiusKm * 180.0 / std::numbers::pi;
  const double lon = origin.lon + east_km / (kEarthRadiusKm * std::cos(deg2rad(origin.lat))) *
                                      180.0 / std::numbers::pi;
  return GeoPoint{lat, lon};
}

}  // namespace ecodispatch::geo
