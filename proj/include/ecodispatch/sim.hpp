#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ecodispatch/assign.hpp"
#include "ecodispatch/fleet.hpp"
#include "ecodispatch/ingest.hpp"
#include "ecodispatch/routing.hpp"

namespace ecodispatch::sim {

enum class Policy { Replay, Nearest, Tora, EraOffline };

std::string_view to_string(Policy p);
Policy parse_policy(std::string_view s);

struct SimConfig {
  Policy policy = Policy::Nearest;
  double phi = 1.0;  // TORA threshold
  double e0 = assign::kDefaultE0;
  // Converts deadhead distance into time; also the free-flow speed of
  // synthesized passenger routes.
  double deadhead_speed_kmh = 30.0;
  // Busy drivers finishing within this window are candidates.
  double availability_horizon_s = 600.0;
  routing::RoutePolicy routing_policy = routing::RoutePolicy::Shortest;
  // Also apply the routing policy to deadhead legs (emissions only).
  bool route_deadhead = false;
  double detour_factor = geo::kDefaultDetourFactor;
  std::uint64_t seed = 0;
  double max_queue_wait_s = 3600.0;
  double lev_threshold = fleet::kLevThreshold;
  double hev_threshold = fleet::kHevThreshold;
  // Optional imported route options keyed by ride_id; missing rides are synthesized.
  const std::map<std::string, routing::RouteTriple>* routes = nullptr;
  routing::SynthRouteConfig route_synth;
  assign::EraOptions era;

  // Throws ConfigError.
  void validate() const;
};

struct RideRecord {
  std::string ride_id;
  std::string driver_id;  // empty when dropped
  double request_ts = 0.0;
  double deadhead_km = 0.0;
  double deadhead_emission_g = 0.0;
  double trip_km = 0.0;
  double trip_emission_g = 0.0;
  double waiting_s = 0.0;
  double unit_emission = 0.0;
  fleet::EmissionClass vehicle_class = fleet::EmissionClass::Standard;
  bool dropped = false;
  // Interval during which the driver is committed to this ride.
  double start_ts = 0.0;    // begins driving towards the pickup
  double dropoff_ts = 0.0;
  // Closest candidate at decision time (empty id under Replay/EraOffline).
  std::string closest_driver_id;
  double closest_deadhead_km = 0.0;
  double closest_unit_emission = 0.0;
  std::size_t candidate_count = 0;
  std::string diagnostic;
};

struct SimResult {
  std::vector<RideRecord> rides;  // request order, dropped rides included
  double phi = 0.0;
  Policy policy = Policy::Nearest;
  bool era_frontier_capped = false;

  std::size_t served() const;
  std::size_t dropped() const;
};

// Route options per trip, in dataset order.
std::vector<routing::RouteTriple> route_triples(const ingest::Dataset& ds, const SimConfig& cfg);

// Driver start: explicit position, else first recorded pickup, else the
// centroid of all pickups.
std::map<std::string, geo::GeoPoint> driver_starts(const ingest::Dataset& ds);

assign::OfflineInstance offline_instance(const ingest::Dataset& ds, const SimConfig& cfg);

SimResult run(const ingest::Dataset& ds, const SimConfig& cfg);

// Independent runs, one per phi, assembled in input order. jobs <= 1 runs serially.
std::vector<std::pair<double, SimResult>> sweep_phi(const ingest::Dataset& ds,
                                                    const SimConfig& base,
                                                    const std::vector<double>& phis,
                                                    unsigned jobs = 1);

// Replay sanity check against recorded reached_ts.
struct ReplayDiagnostic {
  std::size_t compared = 0;
  double mean_abs_error_s = 0.0;
  double mean_recorded_wait_s = 0.0;
};

ReplayDiagnostic replay_wait_diagnostic(const ingest::Dataset& ds, const SimResult& r);

}  // namespace ecodispatch::sim

namespace ecodispatch::sim {

// Event log: ride_id,driver_id,phi,deadhead_km,deadhead_g,trip_g,waiting_s,class,dropped
void write_event_log(const SimResult& r, std::ostream& out);

}  // namespace ecodispatch::sim
