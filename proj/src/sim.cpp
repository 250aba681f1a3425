#include "ecodispatch/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <exception>
#include <limits>
#include <ostream>
#include <thread>

#include "ecodispatch/csv.hpp"
#include "ecodispatch/errors.hpp"
#include "ecodispatch/rng.hpp"

namespace ecodispatch::sim {

std::string_view to_string(Policy p) {
  switch (p) {
    case Policy::Replay: return "replay";
    case Policy::Nearest: return "nearest";
    case Policy::Tora: return "tora";
    case Policy::EraOffline: return "era";
  }
  return "nearest";
}

Policy parse_policy(std::string_view s) {
  if (s == "replay") return Policy::Replay;
  if (s == "nearest") return Policy::Nearest;
  if (s == "tora") return Policy::Tora;
  if (s == "era") return Policy::EraOffline;
  throw ConfigError("unknown policy '" + std::string(s) + "'");
}

void SimConfig::validate() const {
  if (!(phi >= 0.0)) throw ConfigError("phi must be >= 0");
  if (!(e0 > 0.0)) throw ConfigError("E0 must be > 0");
  if (!(deadhead_speed_kmh > 0.0)) throw ConfigError("speed must be > 0");
  if (!(availability_horizon_s >= 0.0)) throw ConfigError("horizon must be >= 0");
  if (!(detour_factor >= 1.0)) throw ConfigError("detour factor must be >= 1");
  if (!(max_queue_wait_s >= 0.0)) throw ConfigError("max queue wait must be >= 0");
  if (!(lev_threshold > 0.0) || !(hev_threshold > 0.0)) {
    throw ConfigError("classification thresholds must be positive");
  }
}

std::size_t SimResult::served() const {
  return static_cast<std::size_t>(
      std::count_if(rides.begin(), rides.end(), [](const RideRecord& r) { return !r.dropped; }));
}

std::size_t SimResult::dropped() const { return rides.size() - served(); }

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

double base_trip_km(const ingest::TripRecord& t, double detour) {
  return t.trip_distance_km ? *t.trip_distance_km
                            : geo::road_distance_km(t.pickup, t.dropoff, detour);
}

}  // namespace

std::vector<routing::RouteTriple> route_triples(const ingest::Dataset& ds, const SimConfig& cfg) {
  std::vector<routing::RouteTriple> out;
  out.reserve(ds.trips.size());
  for (const auto& t : ds.trips) {
    if (cfg.routes) {
      if (auto it = cfg.routes->find(t.ride_id); it != cfg.routes->end()) {
        out.push_back(it->second);
        continue;
      }
    }
    const double base = base_trip_km(t, cfg.detour_factor);
    if (base > 0.0) {
      Rng rng = Rng::derive(cfg.seed, fnv1a(t.ride_id));
      out.push_back(routing::synth_route_triple(base, cfg.deadhead_speed_kmh, rng, cfg.route_synth));
    } else {
      out.push_back(routing::degenerate_triple());
    }
  }
  return out;
}

std::map<std::string, geo::GeoPoint> driver_starts(const ingest::Dataset& ds) {
  std::map<std::string, geo::GeoPoint> starts;
  for (const auto& t : ds.trips) starts.emplace(t.driver_id, t.pickup);
  geo::GeoPoint centroid{30.2672, -97.7431};
  if (!ds.trips.empty()) {
    double lat = 0.0, lon = 0.0;
    for (const auto& t : ds.trips) {
      lat += t.pickup.lat;
      lon += t.pickup.lon;
    }
    centroid = {lat / static_cast<double>(ds.trips.size()),
                lon / static_cast<double>(ds.trips.size())};
  }
  std::map<std::string, geo::GeoPoint> out;
  for (const auto& [id, v] : ds.fleet) {
    if (auto it = ds.start_positions.find(id); it != ds.start_positions.end()) {
      out[id] = it->second;
    } else if (auto jt = starts.find(id); jt != starts.end()) {
      out[id] = jt->second;
    } else {
      out[id] = centroid;
    }
  }
  return out;
}

assign::OfflineInstance offline_instance(const ingest::Dataset& ds, const SimConfig& cfg) {
  assign::OfflineInstance inst;
  inst.detour_factor = cfg.detour_factor;
  inst.speed_kmh = cfg.deadhead_speed_kmh;
  const auto starts = driver_starts(ds);
  for (const auto& [id, v] : ds.fleet) {
    inst.drivers.push_back({id, starts.at(id), v.unit_emission});
  }
  const auto triples = route_triples(ds, cfg);
  for (std::size_t i = 0; i < ds.trips.size(); ++i) {
    const auto& t = ds.trips[i];
    inst.requests.push_back(
        {t.ride_id, t.pickup, t.dropoff, triples[i].select(cfg.routing_policy).emission_distance_km});
  }
  return inst;
}

namespace {

struct DriverSlot {
  fleet::DriverState state;
  const fleet::VehicleProfile* vehicle = nullptr;
  fleet::EmissionClass cls = fleet::EmissionClass::Standard;
};

class Simulator {
 public:
  Simulator(const ingest::Dataset& ds, const SimConfig& cfg) : ds_(ds), cfg_(cfg) {
    const auto starts = driver_starts(ds);
    for (const auto& [id, v] : ds.fleet) {
      DriverSlot slot;
      slot.state.driver_id = id;
      slot.state.vehicle_id = v.vehicle_id;
      slot.state.location = starts.at(id);
      slot.vehicle = &v;
      slot.cls = fleet::classify_vehicle(v, cfg.lev_threshold, cfg.hev_threshold);
      index_.emplace(id, drivers_.size());
      drivers_.push_back(std::move(slot));
    }
    triples_ = route_triples(ds, cfg);
    result_.phi = cfg.phi;
    result_.policy = cfg.policy;
    result_.rides.resize(ds.trips.size());
    for (std::size_t i = 0; i < ds.trips.size(); ++i) {
      result_.rides[i].ride_id = ds.trips[i].ride_id;
      result_.rides[i].request_ts = static_cast<double>(ds.trips[i].request_ts);
    }
    if (cfg.policy == Policy::EraOffline && !ds.trips.empty()) {
      const auto inst = offline_instance(ds, cfg);
      const auto plan = assign::era_assign(inst, cfg.era);
      result_.era_frontier_capped = plan.frontier_capped;
      for (const auto& r : plan.rides) fixed_.push_back(r.driver_id);
    }
  }

  SimResult run() {
    for (std::size_t i = 0; i < ds_.trips.size(); ++i) {
      const double now = static_cast<double>(ds_.trips[i].request_ts);
      drain_until(now);
      clock_ = std::max(clock_, now);
      serve_queue(now);
      if (queue_.empty()) {
        if (!try_serve(i, now)) queue_.push_back(i);
      } else {
        queue_.push_back(i);
      }
    }
    drain_until(std::numeric_limits<double>::infinity());
    for (std::size_t i : queue_) drop(i, clock_, "no driver became available");
    queue_.clear();
    return std::move(result_);
  }

 private:
  double travel_s(double km) const { return km / cfg_.deadhead_speed_kmh * 3600.0; }

  // Retry queued requests at each driver release up to time `until`.
  void drain_until(double until) {
    while (!queue_.empty()) {
      double next = std::numeric_limits<double>::infinity();
      for (const auto& d : drivers_) {
        if (d.state.status == fleet::DriverStatus::Busy && *d.state.busy_until > clock_) {
          next = std::min(next, *d.state.busy_until);
        }
      }
      if (!std::isfinite(next) || next > until) return;
      clock_ = next;
      serve_queue(next);
    }
  }

  void serve_queue(double now) {
    while (!queue_.empty()) {
      const std::size_t j = queue_.front();
      if (now - result_.rides[j].request_ts > cfg_.max_queue_wait_s) {
        drop(j, now, "queued longer than max_queue_wait_s");
        queue_.pop_front();
        continue;
      }
      if (!try_serve(j, now)) return;
      queue_.pop_front();
    }
  }

  void drop(std::size_t i, double now, const char* why) {
    RideRecord& r = result_.rides[i];
    r.dropped = true;
    r.waiting_s = std::max(0.0, now - r.request_ts);
    r.diagnostic = why;
  }

  assign::Candidate candidate_for(std::size_t d, const geo::GeoPoint& pickup, double now) const {
    const auto& s = drivers_[d].state;
    return assign::Candidate{s.driver_id,
                             geo::road_distance_km(s.next_location(), pickup, cfg_.detour_factor),
                             drivers_[d].vehicle->unit_emission, s.remaining_busy(now)};
  }

  bool try_serve(std::size_t i, double now) {
    const ingest::TripRecord& t = ds_.trips[i];
    for (auto& d : drivers_) d.state.release_if_done(now);
    RideRecord& rec = result_.rides[i];

    std::size_t chosen = 0;
    assign::Candidate pick;
    if (cfg_.policy == Policy::Replay || cfg_.policy == Policy::EraOffline) {
      const std::string id =
          cfg_.policy == Policy::Replay ? assign::replay_assign(t) : fixed_.at(i);
      const auto it = index_.find(id);
      if (it == index_.end()) throw RowError("ride " + t.ride_id + ": unknown driver " + id);
      chosen = it->second;
      pick = candidate_for(chosen, t.pickup, now);
      rec.candidate_count = 1;
    } else {
      std::vector<assign::Candidate> cands;
      std::vector<std::size_t> owners;
      for (std::size_t d = 0; d < drivers_.size(); ++d) {
        if (drivers_[d].state.remaining_busy(now) <= cfg_.availability_horizon_s) {
          cands.push_back(candidate_for(d, t.pickup, now));
          owners.push_back(d);
        }
      }
      if (cands.empty()) return false;
      std::size_t k;
      std::size_t closest;
      if (cfg_.policy == Policy::Nearest) {
        k = closest = assign::closest_index(cands);
      } else {
        const auto decision = assign::tora_decide(cands, cfg_.phi, cfg_.e0);
        k = decision.chosen;
        closest = decision.closest;
      }
      rec.closest_driver_id = cands[closest].driver_id;
      rec.closest_deadhead_km = cands[closest].deadhead_km;
      rec.closest_unit_emission = cands[closest].unit_emission;
      rec.candidate_count = cands.size();
      chosen = owners[k];
      pick = cands[k];
    }

    DriverSlot& slot = drivers_[chosen];
    const routing::RouteTriple& triple = triples_[i];
    const routing::RouteOption& option = triple.select(cfg_.routing_policy);

    double deadhead_emission_km = pick.deadhead_km;
    if (cfg_.route_deadhead && pick.deadhead_km > 0.0) {
      Rng rng = Rng::derive(cfg_.seed ^ 0xdeadbeefULL, fnv1a(t.ride_id));
      const auto dh = routing::synth_route_triple(pick.deadhead_km, cfg_.deadhead_speed_kmh, rng,
                                                  cfg_.route_synth);
      deadhead_emission_km = dh.select(cfg_.routing_policy).emission_distance_km;
    }

    const double start = now + pick.delay_s;
    const double pickup_ts = start + travel_s(pick.deadhead_km);
    const double dropoff_ts = pickup_ts + option.duration_s;
    slot.state.commit(now, dropoff_ts, t.dropoff);

    rec.driver_id = slot.state.driver_id;
    rec.deadhead_km = pick.deadhead_km;
    rec.deadhead_emission_g = slot.vehicle->unit_emission * deadhead_emission_km;
    rec.trip_km = option.distance_km;
    rec.trip_emission_g = routing::trip_emissions(*slot.vehicle, option);
    rec.waiting_s = pickup_ts - rec.request_ts;
    rec.unit_emission = slot.vehicle->unit_emission;
    rec.vehicle_class = slot.cls;
    rec.start_ts = start;
    rec.dropoff_ts = dropoff_ts;
    return true;
  }

  const ingest::Dataset& ds_;
  const SimConfig& cfg_;
  std::vector<DriverSlot> drivers_;
  std::map<std::string, std::size_t> index_;
  std::vector<routing::RouteTriple> triples_;
  std::vector<std::string> fixed_;
  std::deque<std::size_t> queue_;
  double clock_ = -std::numeric_limits<double>::infinity();
  SimResult result_;
};

}  // namespace

SimResult run(const ingest::Dataset& ds, const SimConfig& cfg) {
  cfg.validate();
  return Simulator(ds, cfg).run();
}

std::vector<std::pair<double, SimResult>> sweep_phi(const ingest::Dataset& ds,
                                                    const SimConfig& base,
                                                    const std::vector<double>& phis,
                                                    unsigned jobs) {
  if (phis.empty()) throw ConfigError("phi list is empty");
  std::vector<std::pair<double, SimResult>> out(phis.size());
  std::vector<std::exception_ptr> errors(phis.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < phis.size(); i = next++) {
      try {
        SimConfig cfg = base;
        cfg.phi = phis[i];
        out[i] = {phis[i], run(ds, cfg)};
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned n = std::clamp<unsigned>(jobs, 1, static_cast<unsigned>(phis.size()));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned k = 0; k < n; ++k) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

ReplayDiagnostic replay_wait_diagnostic(const ingest::Dataset& ds, const SimResult& r) {
  ReplayDiagnostic diag;
  double err = 0.0, recorded = 0.0;
  for (std::size_t i = 0; i < ds.trips.size() && i < r.rides.size(); ++i) {
    const auto& t = ds.trips[i];
    if (!t.reached_ts || r.rides[i].dropped) continue;
    const double w = static_cast<double>(*t.reached_ts - t.request_ts);
    err += std::abs(r.rides[i].waiting_s - w);
    recorded += w;
    ++diag.compared;
  }
  if (diag.compared) {
    diag.mean_abs_error_s = err / static_cast<double>(diag.compared);
    diag.mean_recorded_wait_s = recorded / static_cast<double>(diag.compared);
  }
  return diag;
}

}  // namespace ecodispatch::sim

namespace ecodispatch::sim {

void write_event_log(const SimResult& r, std::ostream& out) {
  out << "ride_id,driver_id,phi,deadhead_km,deadhead_g,trip_g,waiting_s,class,dropped\n";
  for (const RideRecord& x : r.rides) {
    out << csv::join({x.ride_id, x.driver_id, csv::format_double(r.phi),
                      csv::format_double(x.deadhead_km), csv::format_double(x.deadhead_emission_g),
                      csv::format_double(x.trip_emission_g), csv::format_double(x.waiting_s),
                      x.dropped ? "" : std::string(fleet::to_string(x.vehicle_class)),
                      x.dropped ? "1" : "0"})
        << '\n';
  }
}

}  // namespace ecodispatch::sim
