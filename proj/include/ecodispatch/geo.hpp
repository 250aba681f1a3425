#pragma once

namespace ecodispatch::geo {

inline constexpr double kEarthRadiusKm = 6371.0;
inline constexpr double kDefaultDetourFactor = 1.3;
inline constexpr double kKmPerMile = 1.60934;

struct GeoPoint {
  double lat = 0.0;  // degrees
  double lon = 0.0;  // degrees

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

bool is_valid(const GeoPoint& p) noexcept;

// Throws DomainError when p is outside [-90,90] x [-180,180] or not finite.
void validate(const GeoPoint& p);

// Great-circle distance on a sphere of radius kEarthRadiusKm.
double haversine_km(const GeoPoint& a, const GeoPoint& b);

// Great-circle distance scaled by a road detour factor (>= 1).
double road_distance_km(const GeoPoint& a, const GeoPoint& b,
                        double detour_factor = kDefaultDetourFactor);

// Point displaced from origin by north/east offsets in km (local tangent plane).
GeoPoint offset_km(const GeoPoint& origin, double north_km, double east_km);

}  // namespace ecodispatch::geo
