#include <algorithm>
#include <sstream>

#include "doctest.h"
#include "ecodispatch/errors.hpp"
#include "ecodispatch/ingest.hpp"
#include "ecodispatch/rng.hpp"
#include "test_util.hpp"

using namespace ecodispatch;
using namespace ecodispatch::ingest;

namespace {

const std::string kHeader =
    "ride_id,request_ts,pickup_lat,pickup_lon,dropoff_lat,dropoff_lon,driver_id,vehicle_make,"
    "vehicle_model,vehicle_year,trip_distance_km,reached_ts,completed_ts\n";

EmissionTable table_of(const std::string& csv_text) {
  std::istringstream in(csv_text);
  return read_vehicle_emissions(in).table;
}

const std::string kEmissions =
    "make,model,year,co2_g_per_km,fuel_l_per_100km\n"
    "toyota,prius,2015,100,4.3\n"
    "ford,f150,2014,300,13.0\n"
    "honda,civic,2016,160,7.0\n";

LoadResult read(const std::string& text, const EmissionTable* table = nullptr,
                ColumnMapping mapping = {}) {
  std::istringstream in(text);
  LoadOptions opts;
  opts.emissions = table;
  opts.mapping = std::move(mapping);
  return read_trips(in, opts);
}

}  // namespace

TEST_CASE("load_trips: empty file with header") {
  const auto r = read(kHeader);
  CHECK(r.dataset.trips.empty());
  CHECK(r.accepted == 0);
  CHECK(r.rejected == 0);
}

TEST_CASE("load_trips: invariant violations are rejected with line numbers") {
  const std::string text = kHeader +
                           "A,100,30.2,-97.7,30.3,-97.8,D1,Toyota,Prius,2015,,110,500\n"
                           "B,200,30.2,-97.7,30.3,-97.8,D1,Toyota,Prius,2015,,150,500\n"
                           "C,300,30.2,-97.7,30.3,-97.8,D2,Ford,F150,2014,4.5,,\n";
  const auto table = table_of(kEmissions);
  const auto r = read(text, &table);
  CHECK(r.accepted == 2);
  CHECK(r.rejected == 1);
  REQUIRE(r.diagnostics.size() == 1);
  CHECK(r.diagnostics[0].find("line 3") == 0);
  CHECK(r.diagnostics[0].find("reached_ts < request_ts") != std::string::npos);
  CHECK(r.dataset.trips[1].trip_distance_km == 4.5);
  CHECK_NOTHROW(validate(r.dataset));
}

TEST_CASE("load_trips: rows come back ordered by request time then ride id") {
  // request_ts values chosen out of order, with one tie.
  const int ts[10] = {50, 10, 90, 30, 30, 70, 20, 80, 60, 40};
  std::string text = kHeader;
  for (int i = 0; i < 10; ++i) {
    text += "R" + std::to_string(9 - i) + "," + std::to_string(ts[i]) +
            ",30.2,-97.7,30.3,-97.8,D1,Honda,Civic,2016,,,\n";
  }
  const auto table = table_of(kEmissions);
  const auto r = read(text, &table);
  REQUIRE(r.dataset.trips.size() == 10);
  const char* expected[10] = {"R8", "R3", "R5", "R6", "R0", "R9", "R1", "R4", "R2", "R7"};
  for (int i = 0; i < 10; ++i) CHECK(r.dataset.trips[i].ride_id == expected[i]);
}

TEST_CASE("load_trips: schema and row errors") {
  CHECK_THROWS_AS(read("ride_id,request_ts\n"), SchemaError);
  CHECK_THROWS_AS(read(""), SchemaError);
  const auto table = table_of(kEmissions);
  const auto r = read(kHeader +
                          "A,abc,30.2,-97.7,30.3,-97.8,D1,Toyota,Prius,2015,,,\n"
                          "B,100,95,-97.7,30.3,-97.8,D1,Toyota,Prius,2015,,,\n"
                          "C,100,30.2,-97.7,30.3,-97.8,,Toyota,Prius,2015,,,\n"
                          "D,100,30.2,-97.7\n"
                          "E,100,30.2,-97.7,30.3,-97.8,D1,Toyota,Prius,2015,-1,,\n"
                          "F,100,30.2,-97.7,30.3,-97.8,D1,Toyota,Prius,2015,,,\n"
                          "F,101,30.2,-97.7,30.3,-97.8,D1,Toyota,Prius,2015,,,\n",
                      &table);
  CHECK(r.accepted == 1);
  CHECK(r.rejected == 6);
}

TEST_CASE("load_trips: column mapping adapts foreign headers") {
  testutil::TempDir dir("mapping");
  testutil::write_file(dir / "map.txt",
                       "# source export names\nride_id = RIDE\nrequest_ts=created\n");
  const auto mapping = load_column_mapping(dir / "map.txt");
  CHECK(mapping.at("ride_id") == "RIDE");
  std::string text = kHeader;
  text.replace(0, 7, "RIDE");
  text.replace(text.find("request_ts"), 10, "created");
  text += "A,100,30.2,-97.7,30.3,-97.8,D1,Toyota,Prius,2015,,,\n";
  const auto table = table_of(kEmissions);
  const auto r = read(text, &table, mapping);
  CHECK(r.accepted == 1);
  CHECK(r.dataset.trips[0].ride_id == "A");
}

TEST_CASE("emission table lookups") {
  CHECK_FALSE(table_of("make,model,year,co2_g_per_km,fuel_l_per_100km\n")
                  .lookup("toyota", "corolla", 2015)
                  .has_value());

  const auto one = table_of("make,model,year,co2_g_per_km,fuel_l_per_100km\n"
                            "toyota,corolla,2015,152,6.5\n");
  const auto hit = one.lookup("Toyota", "COROLLA", 2015);
  REQUIRE(hit.has_value());
  CHECK(hit->co2_g_per_km == 152.0);
  CHECK(hit->fuel_l_per_100km == 6.5);
  CHECK_FALSE(one.lookup("Toyota", "Corolla", 2016).has_value());

  std::istringstream dup("make,model,year,co2_g_per_km,fuel_l_per_100km\n"
                         "ford,focus,2012,150,6.0\n"
                         "Ford,Focus,2012,154,7.0\n");
  auto loaded = read_vehicle_emissions(dup);
  CHECK(loaded.table.lookup("ford", "focus", 2012)->co2_g_per_km == 152.0);
  CHECK(loaded.table.lookup("ford", "focus", 2012)->fuel_l_per_100km == 6.5);
  CHECK(loaded.diagnostics.empty());

  std::istringstream wide("make,model,year,co2_g_per_km,fuel_l_per_100km\n"
                          "ford,focus,2012,100,6.0\n"
                          "ford,focus,2012,200,7.0\n");
  auto spread = read_vehicle_emissions(wide);
  CHECK(spread.table.lookup("ford", "focus", 2012)->co2_g_per_km == 150.0);
  REQUIRE(spread.diagnostics.size() == 1);
  CHECK(spread.diagnostics[0].find("20%") != std::string::npos);

  std::istringstream missing("make,model,year,co2\n");
  CHECK_THROWS_AS(read_vehicle_emissions(missing), SchemaError);
}

TEST_CASE("unknown vehicles fall back to the fleet median") {
  const auto table = table_of(kEmissions);
  const auto r = read(kHeader +
                          "A,100,30.2,-97.7,30.3,-97.8,D1,Toyota,Prius,2015,,,\n"
                          "B,110,30.2,-97.7,30.3,-97.8,D2,Ford,F150,2014,,,\n"
                          "C,120,30.2,-97.7,30.3,-97.8,D3,Lada,Niva,1990,,,\n",
                      &table);
  const auto& v = r.dataset.fleet.at("D3");
  CHECK(v.emission_imputed);
  CHECK(v.unit_emission == 200.0);
  CHECK_FALSE(r.dataset.fleet.at("D1").emission_imputed);
  CHECK(r.dataset.fleet.at("D2").fuel_consumption == 13.0);

  const auto empty = table_of("make,model,year,co2_g_per_km,fuel_l_per_100km\n");
  CHECK_THROWS_AS(read(kHeader + "A,100,30.2,-97.7,30.3,-97.8,D1,X,Y,2015,,,\n", &empty),
                  SchemaError);
}

namespace {

Dataset fleet_of(std::size_t lev, std::size_t non_lev) {
  Dataset ds;
  for (std::size_t i = 0; i < lev + non_lev; ++i) {
    fleet::VehicleProfile v;
    v.vehicle_id = "V" + std::to_string(i);
    v.unit_emission = i < lev ? 100.0 : 200.0 + static_cast<double>(i);
    v.fuel_consumption = v.unit_emission / 23.1;
    ds.fleet["D" + std::to_string(10000 + i)] = v;
  }
  TripRecord t;
  t.ride_id = "R1";
  t.driver_id = ds.fleet.begin()->first;
  t.pickup = {30.2, -97.7};
  t.dropoff = {30.3, -97.7};
  ds.trips.push_back(t);
  return ds;
}

std::size_t count_ev(const Dataset& ds) {
  return static_cast<std::size_t>(std::count_if(ds.fleet.begin(), ds.fleet.end(), [](const auto& kv) {
    return kv.second.powertrain == fleet::Powertrain::EV;
  }));
}

}  // namespace

TEST_CASE("inject_evs") {
  const Dataset base = fleet_of(20, 1000);
  CHECK(inject_evs(base, 0.0, 1) == base);

  const Dataset all = inject_evs(base, 1.0, 1);
  CHECK(count_ev(all) == 1000);
  for (const auto& [id, v] : all.fleet) {
    if (v.powertrain == fleet::Powertrain::EV) CHECK(v.unit_emission == 63.35);
    CHECK(fleet::classify_vehicle(v) == fleet::EmissionClass::LEV);
  }

  const Dataset five = inject_evs(base, 0.05, 7);
  CHECK(count_ev(five) == 50);
  CHECK(five.trips == base.trips);
  for (const auto& [id, v] : base.fleet) {
    if (fleet::classify_vehicle(v) == fleet::EmissionClass::LEV) CHECK(five.fleet.at(id) == v);
  }
  CHECK(inject_evs(base, 0.05, 7) == five);
  CHECK_FALSE(inject_evs(base, 0.05, 8) == five);
  CHECK_THROWS_AS(inject_evs(base, 1.5, 1), DomainError);
  CHECK(lev_share(all) == 1.0);
}

namespace {

std::string serialize(const Dataset& ds) {
  std::ostringstream out;
  write_trips(ds, out, {true});
  write_fleet(ds, out);
  return out.str();
}

}  // namespace

TEST_CASE("gen_synthetic") {
  SynthConfig cfg;
  cfg.drivers = 200;
  cfg.requests = 0;
  const Dataset empty = gen_synthetic(cfg, 1);
  CHECK(empty.trips.empty());
  CHECK(empty.fleet.size() == 200);

  cfg.requests = 5000;
  cfg.lev_fraction = 0.10;
  const Dataset a = gen_synthetic(cfg, 7);
  const Dataset b = gen_synthetic(cfg, 7);
  CHECK(serialize(a) == serialize(b));
  CHECK(a.trips.size() == 5000);
  CHECK_NOTHROW(validate(a));
  CHECK_FALSE(serialize(gen_synthetic(cfg, 8)) == serialize(a));

  cfg.requests = 10;
  cfg.lev_fraction = 0.25;
  for (std::size_t drivers : {7u, 40u, 201u}) {
    cfg.drivers = drivers;
    const double share = lev_share(gen_synthetic(cfg, 3));
    CHECK(share >= 0.25 - 1.0 / static_cast<double>(drivers));
    CHECK(share <= 0.25 + 1.0 / static_cast<double>(drivers));
  }

  cfg.lev_fraction = 1.2;
  CHECK_THROWS_AS(gen_synthetic(cfg, 1), ConfigError);
  cfg.lev_fraction = 0.1;
  cfg.drivers = 0;
  CHECK_THROWS_AS(gen_synthetic(cfg, 1), ConfigError);
}

TEST_CASE("property: synthetic datasets pass validation for 100 seeds") {
  SynthConfig cfg;
  cfg.drivers = 15;
  cfg.requests = 60;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Dataset ds = gen_synthetic(cfg, seed);
    CHECK_NOTHROW(validate(ds));
    CHECK(ds.trips.size() == 60);
  }
}

TEST_CASE("property: write then load reproduces the dataset") {
  SynthConfig cfg;
  cfg.drivers = 12;
  cfg.requests = 80;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Dataset ds = gen_synthetic(cfg, seed);
    ds = inject_evs(std::move(ds), 0.5, seed);
    // Exercise the optional fields.
    Rng rng(seed);
    for (auto& t : ds.trips) {
      if (rng.uniform() < 0.5) t.trip_distance_km = rng.uniform(0.0, 20.0);
      if (rng.uniform() < 0.5) {
        t.reached_ts = t.request_ts + static_cast<std::int64_t>(rng.below(600));
        t.completed_ts = *t.reached_ts + static_cast<std::int64_t>(rng.below(3600));
      }
    }
    std::ostringstream trips, fleet_text;
    write_trips(ds, trips);
    write_fleet(ds, fleet_text);
    std::istringstream trips_in(trips.str()), fleet_in(fleet_text.str());
    LoadResult loaded = read_trips(trips_in);
    read_fleet(fleet_in, loaded.dataset);
    CHECK(loaded.rejected == 0);
    CHECK(loaded.dataset == ds);

    // The augmented trips file alone carries the fleet rates of used drivers.
    std::ostringstream augmented;
    write_trips(ds, augmented, {true});
    std::istringstream aug_in(augmented.str());
    const LoadResult alone = read_trips(aug_in);
    CHECK(alone.dataset.trips == ds.trips);
    for (const auto& [id, v] : alone.dataset.fleet) {
      CHECK(v.unit_emission == ds.fleet.at(id).unit_emission);
      CHECK(v.powertrain == ds.fleet.at(id).powertrain);
    }
  }
}
