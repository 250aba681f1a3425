#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ecodispatch/geo.hpp"
#include "ecodispatch/ingest.hpp"
#include "ecodispatch/rng.hpp"

namespace ecodispatch::assign {

inline constexpr double kDefaultE0 = 63.35;  // g CO2eq / km, reference EV
inline constexpr double kTieEpsilon = 1e-9;  // relative

// One feasible driver for a request.
struct Candidate {
  std::string driver_id;
  double deadhead_km = 0.0;
  double unit_emission = 0.0;  // g / km
  double delay_s = 0.0;        // time until the driver can start towards the pickup
};

struct CandidateSet {
  std::string request_id;
  std::vector<Candidate> candidates;
};

double deadhead_emission(const Candidate& c);

// Deadhead-emission saving of m over c per extra km of deadhead. Requires
// m strictly farther than c; throws DomainError otherwise.
double e2d(const Candidate& m, const Candidate& c);

// Closest candidate: min deadhead, then lower unit emission, then lower id.
// Throws NoDriverError on an empty span.
std::size_t closest_index(std::span<const Candidate> cands);

struct ToraDecision {
  std::size_t chosen = 0;
  std::size_t closest = 0;
  // Index of the max-E2D strictly-farther candidate, if any.
  std::optional<std::size_t> best_e2d;
  double best_e2d_value = 0.0;
};

// Threshold rule: replace the closest driver c by the max-E2D driver m iff
// phi * e0 < E2D(m, c).
ToraDecision tora_decide(std::span<const Candidate> cands, double phi, double e0 = kDefaultE0);

std::string tora_assign(const CandidateSet& cs, double phi, double e0 = kDefaultE0);
std::string nearest_assign(const CandidateSet& cs);
// The driver recorded in the trip; RowError when absent.
std::string replay_assign(const ingest::TripRecord& t);

// ---------------------------------------------------------------------------
// Offline problem: every request is known up front and each driver serves its
// requests in arrival order, driving empty from its previous drop-off (or its
// start position) to the next pickup.

struct OfflineDriver {
  std::string id;
  geo::GeoPoint start;
  double unit_emission = 0.0;
};

struct OfflineRequest {
  std::string id;
  geo::GeoPoint pickup;
  geo::GeoPoint dropoff;
  double trip_emission_km = 0.0;  // fuel-equivalent distance of the passenger leg
};

struct OfflineInstance {
  std::vector<OfflineDriver> drivers;  // sorted by id
  std::vector<OfflineRequest> requests;  // arrival order
  double detour_factor = geo::kDefaultDetourFactor;
  double speed_kmh = 30.0;  // converts deadhead into waiting time
};

struct PlannedRide {
  std::string request_id;
  std::string driver_id;  // empty while unassigned
  double deadhead_km = 0.0;
  double deadhead_emission_g = 0.0;
  double trip_emission_g = 0.0;
  double waiting_s = 0.0;
};

struct AssignmentPlan {
  std::vector<PlannedRide> rides;  // one per request, arrival order
  // Driver index per request (into OfflineInstance::drivers).
  std::vector<std::size_t> driver_index;
  // ERA only: frontier was truncated at the cap at least once.
  bool frontier_capped = false;
  std::size_t max_frontier = 0;
};

// Sum of trip and deadhead emissions; ContractError if any ride is unassigned.
double erap_objective(const AssignmentPlan& plan);

// Precomputed distances for one instance.
class OfflineModel {
 public:
  explicit OfflineModel(const OfflineInstance& inst);

  const OfflineInstance& instance() const { return inst_; }
  std::size_t drivers() const { return inst_.drivers.size(); }
  std::size_t requests() const { return inst_.requests.size(); }

  // Deadhead from driver d's position to request n's pickup, given the index
  // of the last request d served (npos = still at start).
  double deadhead_km(std::size_t d, std::size_t last, std::size_t n) const;
  double trip_emission_g(std::size_t d, std::size_t n) const;
  // Admissible estimate of the emissions of requests [k, N) under any completion.
  double tail_lower_bound(std::size_t k) const { return tail_lb_[k]; }
  double request_lower_bound(std::size_t n) const { return lb_[n]; }

  AssignmentPlan evaluate(std::span<const std::size_t> assignment) const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  const OfflineInstance& inst_;
  std::vector<double> start_to_pickup_;    // drivers x requests
  std::vector<double> dropoff_to_pickup_;  // requests x requests
  std::vector<double> lb_;
  std::vector<double> tail_lb_;
  double min_emission_ = 0.0;
};

// Exact emissions of the assigned prefix plus, for every unassigned request n,
// e_min * (min distance from any start position or earlier drop-off to n's
// pickup + n's trip emission distance).
double emission_h(const OfflineInstance& inst, std::span<const std::size_t> partial);

struct EraOptions {
  double epsilon = kTieEpsilon;
  std::size_t frontier_cap = 10'000;
  bool strict_cap = false;  // throw ResourceError instead of truncating
  std::size_t max_children = 10'000'000;
  // Called for every generated child with its assignment prefix and emission_h.
  std::function<void(std::span<const std::size_t>, double)> on_child;
};

AssignmentPlan era_assign(const OfflineInstance& inst, const EraOptions& opts = {});

inline constexpr double kBruteForceLimit = 1e7;

// Exhaustive minimum of the objective; ties keep the lexicographically
// smallest driver sequence.
AssignmentPlan brute_force_optimal(const OfflineInstance& inst, double limit = kBruteForceLimit);

// Each request to the currently closest driver (nearest_assign tie-break).
AssignmentPlan nearest_sequence(const OfflineInstance& inst);

// Small random instance in a square service area around Austin: roughly a
// third of the drivers are reference EVs, the rest emit U[90, 330] g/km.
OfflineInstance random_instance(Rng& rng, std::size_t requests, std::size_t drivers,
                                double extent_km = 10.0);

}  // namespace ecodispatch::assign
