#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ecodispatch/fleet.hpp"
#include "ecodispatch/rng.hpp"

namespace ecodispatch::routing {

struct RouteOption {
  double distance_km = 0.0;
  double duration_s = 0.0;
  // Fuel-equivalent distance: trip emissions = unit_emission * emission_distance_km.
  double emission_distance_km = 0.0;

  friend bool operator==(const RouteOption&, const RouteOption&) = default;
};

enum class TripCategory { Short, Medium, Long };  // <1 mi, 1-10 mi, >10 mi
enum class RoutePolicy { Shortest, Fastest, FuelEfficient };

std::string_view to_string(TripCategory c);
std::string_view to_string(RoutePolicy p);
RoutePolicy parse_route_policy(std::string_view s);

TripCategory categorize(double shortest_distance_km);

struct RouteTriple {
  RouteOption shortest;
  RouteOption fastest;
  RouteOption fuel_efficient;
  TripCategory category = TripCategory::Short;

  const RouteOption& select(RoutePolicy p) const;
  friend bool operator==(const RouteTriple&, const RouteTriple&) = default;
};

// Empty when the triple is valid; otherwise one message per violated invariant.
std::vector<std::string> check_invariants(const RouteTriple& t);

// Zero-length trip: all options zero, category Short.
RouteTriple degenerate_triple();

// Upper bounds on the relative inflations drawn by synth_route_triple.
struct InflationCaps {
  double fastest_distance = 0.075;      // fastest vs shortest distance, (0, cap]
  double shortest_duration = 0.06;      // shortest vs fastest duration, (0, cap]
  double fastest_emission = 0.04;       // fastest vs fuel-efficient emission, (0, cap]
  double shortest_emission = 0.04;      // shortest vs fuel-efficient emission, (0, cap]
  double fuel_efficient_distance = 0.01;  // vs shortest distance, [0, cap)
  double fuel_efficient_duration = 0.025; // vs fastest duration, [0, cap)
};

struct SynthRouteConfig {
  // Indexed by TripCategory.
  InflationCaps caps[3];
};

RouteTriple synth_route_triple(double base_distance_km, double base_speed_kmh, Rng& rng,
                               const SynthRouteConfig& cfg = {});

double trip_emissions(const fleet::VehicleProfile& v, const RouteOption& r);

struct RouteTableLoad {
  std::map<std::string, RouteTriple> table;  // ride_id -> triple
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::vector<std::string> diagnostics;
};

RouteTableLoad load_route_triples(const std::filesystem::path& path);
RouteTableLoad read_route_triples(std::istream& in);
void write_route_triples(const std::map<std::string, RouteTriple>& table, std::ostream& out);

}  // namespace ecodispatch::routing
