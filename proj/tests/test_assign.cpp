#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "ecodispatch/assign.hpp"
#include "ecodispatch/errors.hpp"
#include "test_util.hpp"

using namespace ecodispatch;
using namespace ecodispatch::assign;
using testutil::kAustin;
using testutil::north_of;

namespace {

Candidate cand(std::string id, double km, double rate, double delay = 0.0) {
  return Candidate{std::move(id), km, rate, delay};
}

CandidateSet set_of(std::vector<Candidate> c) { return CandidateSet{"N", std::move(c)}; }

// D1 4 km away at 60 g/km, D2 1 km away at 240 g/km, zero-length trip.
OfflineInstance tie_instance() {
  OfflineInstance inst;
  inst.detour_factor = 1.0;
  inst.drivers = {{"D1", north_of(kAustin, 4.0), 60.0}, {"D2", north_of(kAustin, 1.0), 240.0}};
  inst.requests = {{"N1", kAustin, kAustin, 0.0}};
  return inst;
}

std::vector<Candidate> random_candidates(Rng& rng) {
  std::vector<Candidate> out;
  const std::size_t n = 1 + rng.below(12);
  for (std::size_t i = 0; i < n; ++i) {
    const double rate = rng.uniform() < 0.3 ? fleet::kEvUnitEmission : rng.uniform(80.0, 350.0);
    out.push_back(cand("D" + std::to_string(i), rng.uniform(0.0, 8.0), rate));
  }
  return out;
}

}  // namespace

TEST_CASE("deadhead_emission") {
  CHECK(deadhead_emission(cand("A", 0.0, 300)) == 0.0);
  CHECK(deadhead_emission(cand("A", 1.0, 200)) == 200.0);
  CHECK(deadhead_emission(cand("A", 2.0, 63.35)) == doctest::Approx(126.7));
}

TEST_CASE("e2d") {
  CHECK(e2d(cand("m", 2, 63.35), cand("c", 1, 200)) == doctest::Approx(73.3));
  CHECK(e2d(cand("m", 2, 200), cand("c", 1, 100)) == doctest::Approx(-300.0));
  CHECK_THROWS_AS(e2d(cand("m", 1, 50), cand("c", 1, 100)), DomainError);
  CHECK_THROWS_AS(e2d(cand("m", 0.5, 50), cand("c", 1, 100)), DomainError);
}

TEST_CASE("tora_assign threshold rule") {
  const auto cs = set_of({cand("c", 1, 200), cand("m", 2, 63.35)});
  CHECK(tora_assign(cs, 1.0, 63.35) == "m");
  CHECK(tora_assign(cs, 1.2, 63.35) == "c");
  // Scaling E0 up is the same as scaling phi up.
  CHECK(tora_assign(cs, 0.6, 126.7) == "c");
  CHECK(tora_assign(cs, 0.5, 126.7) == "m");

  const auto zero = set_of({cand("c", 0.0, 300), cand("m", 0.5, 63.35), cand("k", 3, 10)});
  CHECK(tora_assign(zero, 1e-6, 63.35) == "c");
  CHECK_THROWS_AS(tora_assign(set_of({}), 1.0), NoDriverError);
  CHECK_THROWS_AS(tora_assign(cs, -1.0), DomainError);
}

TEST_CASE("tora tie-breaks") {
  // Two farther drivers with identical E2D of 50: the nearer one wins.
  const auto cs = set_of({cand("c", 1, 400), cand("z", 2, 175), cand("a", 3, 100)});
  const auto d = tora_decide(cs.candidates, 0.0, 63.35);
  CHECK(cs.candidates[*d.best_e2d].driver_id == "z");
  CHECK(d.best_e2d_value == 50.0);
  // Equal-distance, lower-emission drivers win through the closest tie-break.
  CHECK(tora_assign(set_of({cand("x", 1, 200), cand("y", 1, 100)}), 1e9) == "y");
}

TEST_CASE("nearest_assign") {
  CHECK(nearest_assign(set_of({cand("A", 5, 100)})) == "A");
  CHECK(nearest_assign(set_of({cand("A", 2, 100), cand("B", 1, 100)})) == "B");
  CHECK(nearest_assign(set_of({cand("A", 1, 200), cand("B", 1, 100)})) == "B");
  CHECK(nearest_assign(set_of({cand("B", 1, 100), cand("A", 1, 100)})) == "A");
  CHECK_THROWS_AS(nearest_assign(set_of({})), NoDriverError);
}

TEST_CASE("replay_assign") {
  ingest::TripRecord t;
  t.ride_id = "R1";
  t.driver_id = "D17";
  CHECK(replay_assign(t) == "D17");
  t.driver_id.clear();
  CHECK_THROWS_AS(replay_assign(t), RowError);
}

TEST_CASE("property: TORA soundness, distance bound, extremes, monotonicity") {
  Rng rng(2024);
  const double e0 = fleet::kEvUnitEmission;
  for (int i = 0; i < 10000; ++i) {
    const auto cands = random_candidates(rng);
    const double phi = std::pow(10.0, rng.uniform(-3.0, 1.3));
    const auto d = tora_decide(cands, phi, e0);
    const Candidate& c = cands[d.closest];
    if (d.chosen != d.closest) {
      const Candidate& m = cands[d.chosen];
      CHECK(deadhead_emission(m) < deadhead_emission(c));
      if (c.deadhead_km > 0.0) {
        CHECK(m.deadhead_km / c.deadhead_km <
              (c.unit_emission / e0 + phi) / (m.unit_emission / e0 + phi));
      }
    }
    // Above every E2D / E0 the rule reduces to nearest.
    double max_ratio = 0.0;
    for (const auto& m : cands) {
      if (m.deadhead_km > c.deadhead_km) max_ratio = std::max(max_ratio, e2d(m, c) / e0);
    }
    CHECK(tora_decide(cands, max_ratio * 1.0001 + 1e-9, e0).chosen == closest_index(cands));
    // Lower phi never picks a dirtier deadhead.
    const auto low = tora_decide(cands, 0.1, e0);
    const auto high = tora_decide(cands, 7.5, e0);
    CHECK(deadhead_emission(cands[low.chosen]) <= deadhead_emission(cands[high.chosen]));
  }
}

TEST_CASE("erap_objective") {
  CHECK(erap_objective(AssignmentPlan{}) == 0.0);
  AssignmentPlan plan;
  plan.rides.push_back({"R1", "D1", 2.0, 2.0 * 150, 5.0 * 150, 240.0});
  CHECK(erap_objective(plan) == doctest::Approx(1050.0));
  plan.rides.push_back({"R2", "", 0, 0, 0, 0});
  CHECK_THROWS_AS(erap_objective(plan), ContractError);
}

TEST_CASE("emission_h examples") {
  const OfflineInstance inst = tie_instance();
  CHECK(emission_h(inst, {}) == doctest::Approx(60.0).epsilon(1e-9));
  const std::vector<std::size_t> all = {0};
  CHECK(emission_h(inst, all) == doctest::Approx(240.0).epsilon(1e-9));

  Rng rng(5);
  const OfflineInstance r = random_instance(rng, 4, 3);
  const std::vector<std::size_t> full = {2, 0, 1, 1};
  const OfflineModel model(r);
  CHECK(emission_h(r, full) == doctest::Approx(erap_objective(model.evaluate(full))));
}

TEST_CASE("era_assign and brute force on the tie fixture") {
  const OfflineInstance inst = tie_instance();
  const auto era = era_assign(inst);
  REQUIRE(era.rides.size() == 1);
  CHECK(era.rides[0].driver_id == "D1");
  CHECK(era.rides[0].deadhead_emission_g == doctest::Approx(240.0).epsilon(1e-9));
  CHECK(era.max_frontier == 2);
  const auto bf = brute_force_optimal(inst);
  CHECK(erap_objective(bf) == doctest::Approx(240.0).epsilon(1e-9));
  CHECK(bf.rides[0].driver_id == "D1");

  OfflineInstance none = inst;
  none.requests.clear();
  CHECK(era_assign(none).rides.empty());
  CHECK(brute_force_optimal(none).rides.empty());
}

TEST_CASE("greedy emission search can miss the optimum") {
  // Requests at 4 km then 0 km on a line; drivers at 0 and 10 km, equal rates.
  OfflineInstance inst;
  inst.detour_factor = 1.0;
  inst.drivers = {{"A", kAustin, 100.0}, {"B", north_of(kAustin, 10.0), 100.0}};
  const auto p4 = north_of(kAustin, 4.0);
  inst.requests = {{"N1", p4, p4, 0.0}, {"N2", kAustin, kAustin, 0.0}};
  const double era = erap_objective(era_assign(inst));
  const double opt = erap_objective(brute_force_optimal(inst));
  CHECK(era == doctest::Approx(800.0).epsilon(1e-9));
  CHECK(opt == doctest::Approx(600.0).epsilon(1e-9));
}

TEST_CASE("property: ERA never beats the exhaustive optimum; heuristic is admissible") {
  Rng rng(77);
  for (int k = 0; k < 60; ++k) {
    const std::size_t n = 3 + rng.below(3);
    const std::size_t m = 2 + rng.below(2);
    const OfflineInstance inst = random_instance(rng, n, m);
    const OfflineModel model(inst);

    // Best completion of a prefix by enumeration, independent of the ERA path.
    auto best_completion = [&](std::vector<std::size_t> prefix) {
      double best = INFINITY;
      auto rec = [&](auto&& self, std::vector<std::size_t>& a) -> void {
        if (a.size() == n) {
          best = std::min(best, erap_objective(model.evaluate(a)));
          return;
        }
        for (std::size_t d = 0; d < m; ++d) {
          a.push_back(d);
          self(self, a);
          a.pop_back();
        }
      };
      rec(rec, prefix);
      return best;
    };

    EraOptions opts;
    std::size_t checked = 0;
    opts.on_child = [&](std::span<const std::size_t> prefix, double h) {
      const std::vector<std::size_t> p(prefix.begin(), prefix.end());
      CHECK(h == doctest::Approx(emission_h(inst, p)).epsilon(1e-9));
      CHECK(h <= best_completion(p) * (1 + 1e-12));
      ++checked;
    };
    const auto era = era_assign(inst, opts);
    CHECK(checked >= n * m);
    const double era_obj = erap_objective(era);
    const double opt = erap_objective(brute_force_optimal(inst));
    CHECK(era_obj >= opt * (1 - 1e-12));
    CHECK(opt <= erap_objective(nearest_sequence(inst)) * (1 + 1e-12));
    CHECK(era.rides.size() == n);
    for (const auto& r : era.rides) CHECK_FALSE(r.driver_id.empty());
  }
}

TEST_CASE("frontier cap and size guards") {
  // Identical co-located drivers make every assignment tie.
  OfflineInstance inst;
  inst.detour_factor = 1.0;
  for (int d = 0; d < 4; ++d) inst.drivers.push_back({"D" + std::to_string(d), kAustin, 100.0});
  for (int n = 0; n < 4; ++n) inst.requests.push_back({"R" + std::to_string(n), kAustin, kAustin, 0.0});
  EraOptions opts;
  opts.frontier_cap = 5;
  const auto plan = era_assign(inst, opts);
  CHECK(plan.frontier_capped);
  CHECK(plan.max_frontier == 5);
  // Lexicographically smallest: everything on D0.
  for (const auto& r : plan.rides) CHECK(r.driver_id == "D0");
  opts.strict_cap = true;
  CHECK_THROWS_AS(era_assign(inst, opts), ResourceError);
  CHECK_FALSE(era_assign(inst).frontier_capped);

  CHECK_THROWS_AS(brute_force_optimal(inst, 100.0), ResourceError);
  CHECK_NOTHROW(brute_force_optimal(inst, 256.0));
}

TEST_CASE("nearest_sequence follows drivers across requests") {
  OfflineInstance inst;
  inst.detour_factor = 1.0;
  inst.drivers = {{"A", kAustin, 100.0}, {"B", north_of(kAustin, 10.0), 100.0}};
  const auto p4 = north_of(kAustin, 4.0);
  inst.requests = {{"N1", p4, p4, 0.0}, {"N2", kAustin, kAustin, 0.0}};
  const auto plan = nearest_sequence(inst);
  CHECK(plan.rides[0].driver_id == "A");
  CHECK(plan.rides[1].driver_id == "A");
  CHECK(plan.rides[1].deadhead_km == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(plan.rides[1].waiting_s == doctest::Approx(480.0).epsilon(1e-9));
}
