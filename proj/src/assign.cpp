#include "ecodispatch/assign.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ecodispatch/errors.hpp"

namespace ecodispatch::assign {

double deadhead_emission(const Candidate& c) { return c.unit_emission * c.deadhead_km; }

double e2d(const Candidate& m, const Candidate& c) {
  if (!(m.deadhead_km > c.deadhead_km)) {
    throw DomainError("E2D undefined: driver " + m.driver_id + " is not farther than " +
                      c.driver_id);
  }
  return (deadhead_emission(c) - deadhead_emission(m)) / (m.deadhead_km - c.deadhead_km);
}

std::size_t closest_index(std::span<const Candidate> cands) {
  if (cands.empty()) throw NoDriverError("no candidate drivers");
  std::size_t best = 0;
  for (std::size_t i = 1; i < cands.size(); ++i) {
    const Candidate& a = cands[i];
    const Candidate& b = cands[best];
    if (std::tie(a.deadhead_km, a.unit_emission, a.driver_id) <
        std::tie(b.deadhead_km, b.unit_emission, b.driver_id)) {
      best = i;
    }
  }
  return best;
}

ToraDecision tora_decide(std::span<const Candidate> cands, double phi, double e0) {
  if (!(phi >= 0.0)) throw DomainError("phi must be >= 0");
  if (!(e0 > 0.0)) throw DomainError("E0 must be > 0");
  ToraDecision d;
  d.closest = closest_index(cands);
  d.chosen = d.closest;
  const Candidate& c = cands[d.closest];
  for (std::size_t i = 0; i < cands.size(); ++i) {
    const Candidate& m = cands[i];
    if (!(m.deadhead_km > c.deadhead_km)) continue;
    const double r = e2d(m, c);
    if (!d.best_e2d) {
      d.best_e2d = i;
      d.best_e2d_value = r;
      continue;
    }
    const Candidate& b = cands[*d.best_e2d];
    // Larger E2D wins; ties go to the nearer driver, then the lower id.
    if (r > d.best_e2d_value ||
        (r == d.best_e2d_value &&
         std::tie(m.deadhead_km, m.driver_id) < std::tie(b.deadhead_km, b.driver_id))) {
      d.best_e2d = i;
      d.best_e2d_value = r;
    }
  }
  if (d.best_e2d && phi * e0 < d.best_e2d_value) d.chosen = *d.best_e2d;
  return d;
}

std::string tora_assign(const CandidateSet& cs, double phi, double e0) {
  return cs.candidates[tora_decide(cs.candidates, phi, e0).chosen].driver_id;
}

std::string nearest_assign(const CandidateSet& cs) {
  return cs.candidates[closest_index(cs.candidates)].driver_id;
}

std::string replay_assign(const ingest::TripRecord& t) {
  if (t.driver_id.empty()) throw RowError("ride " + t.ride_id + " has no recorded driver");
  return t.driver_id;
}

double erap_objective(const AssignmentPlan& plan) {
  double total = 0.0;
  for (const PlannedRide& r : plan.rides) {
    if (r.driver_id.empty()) {
      throw ContractError("request " + r.request_id + " is unassigned");
    }
    total += r.trip_emission_g + r.deadhead_emission_g;
  }
  return total;
}

OfflineModel::OfflineModel(const OfflineInstance& inst) : inst_(inst) {
  const std::size_t m = inst.drivers.size();
  const std::size_t n = inst.requests.size();
  start_to_pickup_.resize(m * n);
  dropoff_to_pickup_.resize(n * n);
  for (std::size_t d = 0; d < m; ++d) {
    for (std::size_t j = 0; j < n; ++j) {
      start_to_pickup_[d * n + j] =
          geo::road_distance_km(inst.drivers[d].start, inst.requests[j].pickup, inst.detour_factor);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      dropoff_to_pickup_[i * n + j] = geo::road_distance_km(
          inst.requests[i].dropoff, inst.requests[j].pickup, inst.detour_factor);
    }
  }
  min_emission_ = std::numeric_limits<double>::infinity();
  for (const auto& d : inst.drivers) min_emission_ = std::min(min_emission_, d.unit_emission);
  if (m == 0) min_emission_ = 0.0;

  lb_.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t d = 0; d < m; ++d) nearest = std::min(nearest, start_to_pickup_[d * n + j]);
    for (std::size_t i = 0; i < j; ++i) nearest = std::min(nearest, dropoff_to_pickup_[i * n + j]);
    if (m == 0 && j == 0) nearest = 0.0;
    lb_[j] = min_emission_ * (nearest + inst.requests[j].trip_emission_km);
  }
  tail_lb_.assign(n + 1, 0.0);
  for (std::size_t j = n; j-- > 0;) tail_lb_[j] = tail_lb_[j + 1] + lb_[j];
}

double OfflineModel::deadhead_km(std::size_t d, std::size_t last, std::size_t n) const {
  const std::size_t count = inst_.requests.size();
  return last == npos ? start_to_pickup_[d * count + n] : dropoff_to_pickup_[last * count + n];
}

double OfflineModel::trip_emission_g(std::size_t d, std::size_t n) const {
  return inst_.drivers[d].unit_emission * inst_.requests[n].trip_emission_km;
}

AssignmentPlan OfflineModel::evaluate(std::span<const std::size_t> assignment) const {
  AssignmentPlan plan;
  std::vector<std::size_t> last(drivers(), npos);
  for (std::size_t n = 0; n < requests(); ++n) {
    PlannedRide r;
    r.request_id = inst_.requests[n].id;
    if (n < assignment.size()) {
      const std::size_t d = assignment[n];
      r.driver_id = inst_.drivers[d].id;
      r.deadhead_km = deadhead_km(d, last[d], n);
      r.deadhead_emission_g = r.deadhead_km * inst_.drivers[d].unit_emission;
      r.trip_emission_g = trip_emission_g(d, n);
      r.waiting_s = r.deadhead_km / inst_.speed_kmh * 3600.0;
      last[d] = n;
    }
    plan.rides.push_back(std::move(r));
  }
  plan.driver_index.assign(assignment.begin(), assignment.end());
  return plan;
}

double emission_h(const OfflineInstance& inst, std::span<const std::size_t> partial) {
  const OfflineModel model(inst);
  if (partial.size() > model.requests()) throw ContractError("partial longer than request list");
  const AssignmentPlan plan = model.evaluate(partial);
  double exact = 0.0;
  for (std::size_t n = 0; n < partial.size(); ++n) {
    exact += plan.rides[n].deadhead_emission_g + plan.rides[n].trip_emission_g;
  }
  return exact + model.tail_lower_bound(partial.size());
}

namespace {

struct Node {
  std::vector<std::size_t> assignment;
  std::vector<std::size_t> last;  // per driver
  double exact = 0.0;
  double h = 0.0;
};

bool within(double value, double min, double eps) { return value <= min + eps * std::abs(min); }

}  // namespace

AssignmentPlan era_assign(const OfflineInstance& inst, const EraOptions& opts) {
  const OfflineModel model(inst);
  const std::size_t m = model.drivers();
  const std::size_t n_req = model.requests();
  if (n_req == 0) return AssignmentPlan{};
  if (m == 0) throw NoDriverError("offline assignment needs at least one driver");

  std::vector<Node> frontier(1);
  frontier[0].last.assign(m, OfflineModel::npos);
  frontier[0].h = model.tail_lower_bound(0);
  bool capped = false;
  std::size_t max_frontier = 1;

  for (std::size_t n = 0; n < n_req; ++n) {
    if (static_cast<double>(frontier.size()) * static_cast<double>(m) >
        static_cast<double>(opts.max_children)) {
      throw ResourceError("ERA frontier expansion exceeds " + std::to_string(opts.max_children) +
                          " children; use a smaller instance");
    }
    std::vector<Node> children;
    children.reserve(frontier.size() * m);
    for (const Node& a : frontier) {
      for (std::size_t d = 0; d < m; ++d) {
        Node child;
        child.assignment = a.assignment;
        child.assignment.push_back(d);
        child.last = a.last;
        const double dh = model.deadhead_km(d, a.last[d], n);
        child.exact = a.exact + dh * inst.drivers[d].unit_emission + model.trip_emission_g(d, n);
        child.last[d] = n;
        child.h = child.exact + model.tail_lower_bound(n + 1);
        if (opts.on_child) opts.on_child(child.assignment, child.h);
        children.push_back(std::move(child));
      }
    }
    double h_min = std::numeric_limits<double>::infinity();
    for (const Node& c : children) h_min = std::min(h_min, c.h);
    std::vector<Node> kept;
    for (Node& c : children) {
      if (within(c.h, h_min, opts.epsilon)) kept.push_back(std::move(c));
    }
    if (kept.size() > opts.frontier_cap) {
      if (opts.strict_cap) {
        throw ResourceError("ERA frontier of " + std::to_string(kept.size()) +
                            " nodes exceeds cap " + std::to_string(opts.frontier_cap) +
                            "; use a smaller instance");
      }
      std::sort(kept.begin(), kept.end(), [](const Node& a, const Node& b) {
        return std::tie(a.h, a.assignment) < std::tie(b.h, b.assignment);
      });
      kept.resize(opts.frontier_cap);
      capped = true;
    }
    max_frontier = std::max(max_frontier, kept.size());
    frontier = std::move(kept);
  }

  double best = std::numeric_limits<double>::infinity();
  for (const Node& a : frontier) best = std::min(best, a.exact);
  const Node* pick = nullptr;
  for (const Node& a : frontier) {
    if (within(a.exact, best, opts.epsilon) && (!pick || a.assignment < pick->assignment)) {
      pick = &a;
    }
  }
  AssignmentPlan plan = model.evaluate(pick->assignment);
  plan.frontier_capped = capped;
  plan.max_frontier = max_frontier;
  return plan;
}

AssignmentPlan brute_force_optimal(const OfflineInstance& inst, double limit) {
  const OfflineModel model(inst);
  const std::size_t m = model.drivers();
  const std::size_t n_req = model.requests();
  if (n_req == 0) return AssignmentPlan{};
  if (m == 0) throw NoDriverError("offline assignment needs at least one driver");
  if (std::pow(static_cast<double>(m), static_cast<double>(n_req)) > limit) {
    throw ResourceError("brute force over " + std::to_string(m) + "^" + std::to_string(n_req) +
                        " assignments exceeds the guard; use a smaller instance");
  }

  std::vector<std::size_t> current(n_req), best_assignment;
  std::vector<std::size_t> last(m, OfflineModel::npos);
  double best = std::numeric_limits<double>::infinity();

  // Depth-first in lexicographic order; only a strictly better objective
  // (beyond the tie tolerance) replaces the incumbent.
  auto dfs = [&](auto&& self, std::size_t n, double acc) -> void {
    if (n == n_req) {
      if (best_assignment.empty() || acc < best - kTieEpsilon * std::abs(best)) {
        best = acc;
        best_assignment = current;
      }
      return;
    }
    for (std::size_t d = 0; d < m; ++d) {
      const std::size_t prev = last[d];
      const double cost = model.deadhead_km(d, prev, n) * inst.drivers[d].unit_emission +
                          model.trip_emission_g(d, n);
      current[n] = d;
      last[d] = n;
      self(self, n + 1, acc + cost);
      last[d] = prev;
    }
  };
  dfs(dfs, 0, 0.0);
  return model.evaluate(best_assignment);
}

AssignmentPlan nearest_sequence(const OfflineInstance& inst) {
  const OfflineModel model(inst);
  const std::size_t m = model.drivers();
  if (model.requests() > 0 && m == 0) {
    throw NoDriverError("offline assignment needs at least one driver");
  }
  std::vector<std::size_t> last(m, OfflineModel::npos), assignment;
  std::vector<Candidate> cands(m);
  for (std::size_t n = 0; n < model.requests(); ++n) {
    for (std::size_t d = 0; d < m; ++d) {
      cands[d] = Candidate{inst.drivers[d].id, model.deadhead_km(d, last[d], n),
                           inst.drivers[d].unit_emission, 0.0};
    }
    const std::size_t d = closest_index(cands);
    assignment.push_back(d);
    last[d] = n;
  }
  return model.evaluate(assignment);
}

}  // namespace ecodispatch::assign

namespace ecodispatch::assign {

OfflineInstance random_instance(Rng& rng, std::size_t requests, std::size_t drivers,
                                double extent_km) {
  const geo::GeoPoint center{30.2672, -97.7431};
  const double half = extent_km / 2.0;
  auto point = [&] { return geo::offset_km(center, rng.uniform(-half, half), rng.uniform(-half, half)); };
  OfflineInstance inst;
  for (std::size_t d = 0; d < drivers; ++d) {
    OfflineDriver drv;
    drv.id = "D" + std::to_string(d + 1);
    drv.start = point();
    drv.unit_emission = rng.uniform() < 1.0 / 3.0 ? kDefaultE0 : rng.uniform(90.0, 330.0);
    inst.drivers.push_back(std::move(drv));
  }
  std::sort(inst.drivers.begin(), inst.drivers.end(),
            [](const OfflineDriver& a, const OfflineDriver& b) { return a.id < b.id; });
  for (std::size_t n = 0; n < requests; ++n) {
    OfflineRequest r;
    r.id = "R" + std::to_string(n + 1);
    r.pickup = point();
    r.dropoff = point();
    r.trip_emission_km = geo::road_distance_km(r.pickup, r.dropoff, inst.detour_factor);
    inst.requests.push_back(std::move(r));
  }
  return inst;
}

}  // namespace ecodispatch::assign
