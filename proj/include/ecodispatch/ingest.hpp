#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ecodispatch/fleet.hpp"
#include "ecodispatch/geo.hpp"

namespace ecodispatch::ingest {

struct TripRecord {
  std::string ride_id;
  std::int64_t request_ts = 0;  // unix seconds
  geo::GeoPoint pickup;
  geo::GeoPoint dropoff;
  std::string driver_id;  // recorded (default) assignment
  std::string vehicle_make;
  std::string vehicle_model;
  int vehicle_year = 0;
  std::optional<double> trip_distance_km;
  std::optional<std::int64_t> reached_ts;
  std::optional<std::int64_t> completed_ts;

  friend bool operator==(const TripRecord&, const TripRecord&) = default;
};

// Throws RowError describing the first violated invariant.
void validate(const TripRecord& t);

struct Dataset {
  std::vector<TripRecord> trips;  // ordered by (request_ts, ride_id)
  std::map<std::string, fleet::VehicleProfile> fleet;  // driver_id -> vehicle
  // Optional driver start positions; the simulator falls back to the
  // pickup of each driver's first recorded trip.
  std::map<std::string, geo::GeoPoint> start_positions;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

// Throws RowError if trips are unordered, ride ids repeat, or a driver is
// missing from the fleet.
void validate(const Dataset& ds);

// Canonical column name -> source header name.
using ColumnMapping = std::map<std::string, std::string>;
ColumnMapping load_column_mapping(const std::filesystem::path& path);

struct EmissionEntry {
  double co2_g_per_km = 0.0;
  std::optional<double> fuel_l_per_100km;
};

// (make, model, year) lookup, case-insensitive on make and model.
class EmissionTable {
 public:
  void add(std::string_view make, std::string_view model, int year, EmissionEntry e);
  // Averages duplicate keys; returns diagnostics for keys whose spread exceeds 20%.
  std::vector<std::string> finalize();

  std::optional<EmissionEntry> lookup(std::string_view make, std::string_view model,
                                      int year) const;
  std::size_t size() const { return entries_.size(); }
  std::optional<double> median_co2() const;

 private:
  using Key = std::tuple<std::string, std::string, int>;
  std::map<Key, std::vector<EmissionEntry>> pending_;
  std::map<Key, EmissionEntry> entries_;
};

struct EmissionTableLoad {
  EmissionTable table;
  std::vector<std::string> diagnostics;
};

EmissionTableLoad load_vehicle_emissions(const std::filesystem::path& path);
EmissionTableLoad read_vehicle_emissions(std::istream& in);

struct LoadOptions {
  ColumnMapping mapping;
  // Vehicle source when no fleet file is given and the trips file has no
  // unit_emission_g_per_km column.
  const EmissionTable* emissions = nullptr;
};

struct LoadResult {
  Dataset dataset;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::vector<std::string> diagnostics;  // "line N: reason"
};

LoadResult load_trips(const std::filesystem::path& path, const LoadOptions& opts = {});
LoadResult read_trips(std::istream& in, const LoadOptions& opts = {});

// Replaces ds.fleet (and start positions) with the contents of a fleet file.
void load_fleet(const std::filesystem::path& path, Dataset& ds);
void read_fleet(std::istream& in, Dataset& ds);

struct WriteOptions {
  // Append powertrain, unit_emission_g_per_km and emission_class columns.
  bool augmented = false;
  double lev_threshold = fleet::kLevThreshold;
  double hev_threshold = fleet::kHevThreshold;
};

void write_trips(const Dataset& ds, std::ostream& out, const WriteOptions& opts = {});
void write_fleet(const Dataset& ds, std::ostream& out,
                 double lev_threshold = fleet::kLevThreshold,
                 double hev_threshold = fleet::kHevThreshold);

// Converts exactly round(fraction * |non-LEV|) non-LEV vehicles into the
// reference EV. Trip records are untouched.
Dataset inject_evs(Dataset ds, double fraction, std::uint64_t seed,
                   double lev_threshold = fleet::kLevThreshold);

// Fraction of fleet vehicles classified LEV (0 for an empty fleet).
double lev_share(const Dataset& ds, double lev_threshold = fleet::kLevThreshold);

struct SynthConfig {
  std::size_t drivers = 200;
  std::size_t requests = 5000;
  geo::GeoPoint center{30.2672, -97.7431};
  double extent_km = 20.0;  // side of the square service area
  std::int64_t start_ts = 1480550400;  // 2016-12-01T00:00:00Z
  double span_s = 86400.0;
  // Relative request rate per hour of day, cycled over the span.
  std::vector<double> hourly_weights = {2, 1.5, 1, 0.5, 0.5, 0.8, 1.5, 3, 4, 3, 2.5, 2.5,
                                        3, 2.5, 2.5, 3, 3.5, 4, 4, 3.5, 3, 3, 3, 2.5};
  double min_trip_km = 0.5;
  double max_trip_km = 15.0;
  double lev_fraction = 0.10;
  double lev_emission_min = 90.0;    // g/km
  double nonlev_emission_min = 135.0;
  double nonlev_emission_max = 330.0;

  // Throws ConfigError.
  void validate() const;
};

// Fuel figure implied by a gasoline CO2 rate (2310 g CO2 per litre).
double gasoline_l_per_100km(double co2_g_per_km);

Dataset gen_synthetic(const SynthConfig& cfg, std::uint64_t seed);

}  // namespace ecodispatch::ingest
