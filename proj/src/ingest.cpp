#include "ecodispatch/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "ecodispatch/csv.hpp"
#include "ecodispatch/errors.hpp"
#include "ecodispatch/rng.hpp"

namespace ecodispatch::ingest {

namespace {

const std::vector<std::string> kRequiredTripColumns = {
    "ride_id",     "request_ts",   "pickup_lat",    "pickup_lon",   "dropoff_lat",
    "dropoff_lon", "driver_id",    "vehicle_make",  "vehicle_model", "vehicle_year"};

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open " + path.string());
  return in;
}

std::optional<double> median(std::vector<double> v) {
  if (v.empty()) return std::nullopt;
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

std::string opt_str(const std::optional<double>& v) {
  return v ? csv::format_double(*v) : std::string();
}

std::string opt_str(const std::optional<std::int64_t>& v) {
  return v ? std::to_string(*v) : std::string();
}

// Column resolver honoring a canonical -> source mapping.
class Columns {
 public:
  Columns(const csv::Reader& reader, const ColumnMapping& mapping)
      : reader_(reader), mapping_(mapping) {}

  std::optional<std::size_t> find(const std::string& canonical) const {
    auto it = mapping_.find(canonical);
    return reader_.column(it == mapping_.end() ? canonical : it->second);
  }

  std::size_t require(const std::string& canonical) const {
    auto idx = find(canonical);
    if (!idx) throw SchemaError("missing required column '" + canonical + "'");
    return *idx;
  }

 private:
  const csv::Reader& reader_;
  const ColumnMapping& mapping_;
};

std::string_view field(const std::vector<std::string>& row, std::optional<std::size_t> idx) {
  if (!idx || *idx >= row.size()) return {};
  return row[*idx];
}

}  // namespace

void validate(const TripRecord& t) {
  if (t.ride_id.empty()) throw RowError("empty ride_id");
  if (!geo::is_valid(t.pickup)) throw RowError("invalid pickup coordinate");
  if (!geo::is_valid(t.dropoff)) throw RowError("invalid dropoff coordinate");
  if (t.trip_distance_km && !(*t.trip_distance_km >= 0.0)) {
    throw RowError("negative trip_distance_km");
  }
  if (t.reached_ts && *t.reached_ts < t.request_ts) throw RowError("reached_ts < request_ts");
  if (t.completed_ts && *t.completed_ts < t.request_ts) {
    throw RowError("completed_ts < request_ts");
  }
  if (t.reached_ts && t.completed_ts && *t.completed_ts < *t.reached_ts) {
    throw RowError("completed_ts < reached_ts");
  }
}

void validate(const Dataset& ds) {
  std::set<std::string> seen;
  for (std::size_t i = 0; i < ds.trips.size(); ++i) {
    const TripRecord& t = ds.trips[i];
    validate(t);
    if (!seen.insert(t.ride_id).second) throw RowError("duplicate ride_id " + t.ride_id);
    if (i > 0) {
      const TripRecord& p = ds.trips[i - 1];
      if (std::tie(p.request_ts, p.ride_id) >= std::tie(t.request_ts, t.ride_id)) {
        throw RowError("trips not ordered at ride " + t.ride_id);
      }
    }
    if (!ds.fleet.contains(t.driver_id)) {
      throw RowError("ride " + t.ride_id + ": driver '" + t.driver_id + "' not in fleet");
    }
  }
  for (const auto& [id, v] : ds.fleet) fleet::validate(v);
}

ColumnMapping load_column_mapping(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  ColumnMapping mapping;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    const std::string t = csv::trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw SchemaError(path.string() + ":" + std::to_string(n) + ": expected key=value");
    }
    mapping[csv::trim(t.substr(0, eq))] = csv::trim(t.substr(eq + 1));
  }
  return mapping;
}

void EmissionTable::add(std::string_view make, std::string_view model, int year,
                        EmissionEntry e) {
  pending_[{csv::lower(csv::trim(make)), csv::lower(csv::trim(model)), year}].push_back(e);
}

std::vector<std::string> EmissionTable::finalize() {
  std::vector<std::string> diagnostics;
  for (auto& [key, rows] : pending_) {
    double co2_sum = 0.0, co2_min = rows.front().co2_g_per_km, co2_max = co2_min;
    double fuel_sum = 0.0;
    std::size_t fuel_n = 0;
    for (const auto& r : rows) {
      co2_sum += r.co2_g_per_km;
      co2_min = std::min(co2_min, r.co2_g_per_km);
      co2_max = std::max(co2_max, r.co2_g_per_km);
      if (r.fuel_l_per_100km) {
        fuel_sum += *r.fuel_l_per_100km;
        ++fuel_n;
      }
    }
    EmissionEntry merged;
    merged.co2_g_per_km = co2_sum / static_cast<double>(rows.size());
    if (fuel_n) merged.fuel_l_per_100km = fuel_sum / static_cast<double>(fuel_n);
    if (rows.size() > 1 && merged.co2_g_per_km > 0.0 &&
        (co2_max - co2_min) / merged.co2_g_per_km > 0.2) {
      diagnostics.push_back("warning: " + std::get<0>(key) + "/" + std::get<1>(key) + "/" +
                            std::to_string(std::get<2>(key)) +
                            ": duplicate rows spread more than 20%, averaged");
    }
    entries_[key] = merged;
  }
  pending_.clear();
  return diagnostics;
}

std::optional<EmissionEntry> EmissionTable::lookup(std::string_view make, std::string_view model,
                                                   int year) const {
  auto it = entries_.find({csv::lower(csv::trim(make)), csv::lower(csv::trim(model)), year});
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::optional<double> EmissionTable::median_co2() const {
  std::vector<double> v;
  for (const auto& [k, e] : entries_) v.push_back(e.co2_g_per_km);
  return median(std::move(v));
}

EmissionTableLoad read_vehicle_emissions(std::istream& in) {
  csv::Reader reader(in);
  if (!reader.has_header()) throw SchemaError("emissions file has no header");
  auto col = [&](const char* name) {
    auto idx = reader.column(name);
    if (!idx) throw SchemaError(std::string("missing required column '") + name + "'");
    return *idx;
  };
  const std::size_t make = col("make"), model = col("model"), year = col("year"),
                    co2 = col("co2_g_per_km"), fuel = col("fuel_l_per_100km");

  EmissionTableLoad out;
  std::vector<std::string> row;
  while (reader.next(row)) {
    try {
      if (row.size() != reader.header().size()) throw RowError("wrong field count");
      EmissionEntry e;
      e.co2_g_per_km = csv::parse_double(row[co2], "co2_g_per_km");
      e.fuel_l_per_100km = csv::parse_optional_double(row[fuel], "fuel_l_per_100km");
      if (e.co2_g_per_km < 0.0) throw RowError("negative co2_g_per_km");
      out.table.add(row[make], row[model],
                    static_cast<int>(csv::parse_int(row[year], "year")), e);
    } catch (const RowError& err) {
      out.diagnostics.push_back("line " + std::to_string(reader.line_number()) + ": " +
                                err.what());
    }
  }
  auto merged = out.table.finalize();
  out.diagnostics.insert(out.diagnostics.end(), merged.begin(), merged.end());
  return out;
}

EmissionTableLoad load_vehicle_emissions(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  return read_vehicle_emissions(in);
}

LoadResult read_trips(std::istream& in, const LoadOptions& opts) {
  csv::Reader reader(in);
  if (!reader.has_header()) throw SchemaError("trips file has no header");
  const Columns cols(reader, opts.mapping);
  std::map<std::string, std::size_t> idx;
  for (const auto& name : kRequiredTripColumns) idx[name] = cols.require(name);
  const auto dist_col = cols.find("trip_distance_km");
  const auto reached_col = cols.find("reached_ts");
  const auto completed_col = cols.find("completed_ts");
  const auto powertrain_col = cols.find("powertrain");
  const auto unit_col = cols.find("unit_emission_g_per_km");
  const auto fuel_col = cols.find("fuel_l_per_100km");
  const auto energy_col = cols.find("energy_kwh_per_km");

  struct Parsed {
    TripRecord trip;
    std::optional<fleet::VehicleProfile> vehicle;  // from augmented columns
    std::size_t line;
  };

  LoadResult result;
  std::vector<Parsed> parsed;
  std::vector<std::string> row;
  while (reader.next(row)) {
    const std::size_t line = reader.line_number();
    try {
      if (row.size() != reader.header().size()) {
        throw RowError("expected " + std::to_string(reader.header().size()) + " fields, got " +
                       std::to_string(row.size()));
      }
      TripRecord t;
      t.ride_id = csv::trim(row[idx["ride_id"]]);
      t.request_ts = csv::parse_int(row[idx["request_ts"]], "request_ts");
      t.pickup = {csv::parse_double(row[idx["pickup_lat"]], "pickup_lat"),
                  csv::parse_double(row[idx["pickup_lon"]], "pickup_lon")};
      t.dropoff = {csv::parse_double(row[idx["dropoff_lat"]], "dropoff_lat"),
                   csv::parse_double(row[idx["dropoff_lon"]], "dropoff_lon")};
      t.driver_id = csv::trim(row[idx["driver_id"]]);
      t.vehicle_make = csv::trim(row[idx["vehicle_make"]]);
      t.vehicle_model = csv::trim(row[idx["vehicle_model"]]);
      t.vehicle_year = static_cast<int>(
          csv::parse_optional_int(row[idx["vehicle_year"]], "vehicle_year").value_or(0));
      t.trip_distance_km = csv::parse_optional_double(field(row, dist_col), "trip_distance_km");
      t.reached_ts = csv::parse_optional_int(field(row, reached_col), "reached_ts");
      t.completed_ts = csv::parse_optional_int(field(row, completed_col), "completed_ts");
      if (t.driver_id.empty()) throw RowError("missing driver_id");
      validate(t);

      Parsed p{std::move(t), std::nullopt, line};
      if (auto unit = csv::parse_optional_double(field(row, unit_col), "unit_emission_g_per_km")) {
        fleet::VehicleProfile v;
        v.vehicle_id = p.trip.driver_id;
        v.make = p.trip.vehicle_make;
        v.model = p.trip.vehicle_model;
        v.year = p.trip.vehicle_year;
        const std::string pt = csv::trim(field(row, powertrain_col));
        v.powertrain = pt.empty() ? fleet::Powertrain::ICE : fleet::parse_powertrain(pt);
        v.unit_emission = *unit;
        v.fuel_consumption = csv::parse_optional_double(field(row, fuel_col), "fuel_l_per_100km");
        v.energy_efficiency =
            csv::parse_optional_double(field(row, energy_col), "energy_kwh_per_km");
        try {
          fleet::validate(v);
        } catch (const DomainError& e) {
          throw RowError(e.what());
        }
        p.vehicle = std::move(v);
      }
      parsed.push_back(std::move(p));
    } catch (const RowError& err) {
      ++result.rejected;
      result.diagnostics.push_back("line " + std::to_string(line) + ": " + err.what());
    }
  }

  std::stable_sort(parsed.begin(), parsed.end(), [](const Parsed& a, const Parsed& b) {
    return std::tie(a.trip.request_ts, a.trip.ride_id) <
           std::tie(b.trip.request_ts, b.trip.ride_id);
  });

  Dataset& ds = result.dataset;
  std::set<std::string> seen;
  std::map<std::string, const Parsed*> first_trip;
  for (const Parsed& p : parsed) {
    if (!seen.insert(p.trip.ride_id).second) {
      ++result.rejected;
      result.diagnostics.push_back("line " + std::to_string(p.line) + ": duplicate ride_id " +
                                   p.trip.ride_id);
      continue;
    }
    first_trip.emplace(p.trip.driver_id, &p);
    ds.trips.push_back(p.trip);
  }
  result.accepted = ds.trips.size();

  // Fleet: augmented columns first, then the emission table, then the median fallback.
  std::vector<std::string> unresolved;
  std::vector<double> resolved_rates;
  for (const auto& [driver, p] : first_trip) {
    if (p->vehicle) {
      ds.fleet[driver] = *p->vehicle;
      resolved_rates.push_back(p->vehicle->unit_emission);
      continue;
    }
    if (!opts.emissions) continue;
    fleet::VehicleProfile v;
    v.vehicle_id = driver;
    v.make = p->trip.vehicle_make;
    v.model = p->trip.vehicle_model;
    v.year = p->trip.vehicle_year;
    if (auto e = opts.emissions->lookup(v.make, v.model, v.year)) {
      v.unit_emission = e->co2_g_per_km;
      v.fuel_consumption = e->fuel_l_per_100km;
      resolved_rates.push_back(v.unit_emission);
    } else {
      unresolved.push_back(driver);
    }
    ds.fleet[driver] = std::move(v);
  }
  if (!unresolved.empty()) {
    auto fallback = median(resolved_rates);
    if (!fallback) fallback = opts.emissions->median_co2();
    if (!fallback) throw SchemaError("emission table is empty; cannot impute vehicle emissions");
    for (const auto& driver : unresolved) {
      auto& v = ds.fleet[driver];
      v.unit_emission = *fallback;
      v.emission_imputed = true;
      result.diagnostics.push_back("driver " + driver + ": no emission entry for " + v.make +
                                   "/" + v.model + "/" + std::to_string(v.year) +
                                   ", using fleet median");
    }
  }
  return result;
}

LoadResult load_trips(const std::filesystem::path& path, const LoadOptions& opts) {
  std::ifstream in = open_input(path);
  return read_trips(in, opts);
}

void read_fleet(std::istream& in, Dataset& ds) {
  csv::Reader reader(in);
  if (!reader.has_header()) throw SchemaError("fleet file has no header");
  auto col = [&](const char* name) {
    auto idx = reader.column(name);
    if (!idx) throw SchemaError(std::string("missing required column '") + name + "'");
    return *idx;
  };
  const std::size_t driver = col("driver_id"), unit = col("unit_emission_g_per_km");
  const auto vehicle = reader.column("vehicle_id"), make = reader.column("make"),
             model = reader.column("model"), year = reader.column("year"),
             powertrain = reader.column("powertrain"), fuel = reader.column("fuel_l_per_100km"),
             energy = reader.column("energy_kwh_per_km"),
             imputed = reader.column("emission_imputed"), lat = reader.column("start_lat"),
             lon = reader.column("start_lon");

  ds.fleet.clear();
  ds.start_positions.clear();
  std::vector<std::string> row;
  while (reader.next(row)) {
    const std::string where = "fleet line " + std::to_string(reader.line_number()) + ": ";
    try {
      if (row.size() != reader.header().size()) throw RowError("wrong field count");
      fleet::VehicleProfile v;
      const std::string id = csv::trim(row[driver]);
      if (id.empty()) throw RowError("empty driver_id");
      v.vehicle_id = csv::trim(field(row, vehicle));
      if (v.vehicle_id.empty()) v.vehicle_id = id;
      v.make = csv::trim(field(row, make));
      v.model = csv::trim(field(row, model));
      v.year = static_cast<int>(csv::parse_optional_int(field(row, year), "year").value_or(0));
      const std::string pt = csv::trim(field(row, powertrain));
      v.powertrain = pt.empty() ? fleet::Powertrain::ICE : fleet::parse_powertrain(pt);
      v.unit_emission = csv::parse_double(row[unit], "unit_emission_g_per_km");
      v.fuel_consumption = csv::parse_optional_double(field(row, fuel), "fuel_l_per_100km");
      v.energy_efficiency = csv::parse_optional_double(field(row, energy), "energy_kwh_per_km");
      v.emission_imputed = csv::trim(field(row, imputed)) == "1";
      fleet::validate(v);
      auto slat = csv::parse_optional_double(field(row, lat), "start_lat");
      auto slon = csv::parse_optional_double(field(row, lon), "start_lon");
      if (slat && slon) {
        const geo::GeoPoint p{*slat, *slon};
        if (!geo::is_valid(p)) throw RowError("invalid start position");
        ds.start_positions[id] = p;
      }
      if (!ds.fleet.emplace(id, std::move(v)).second) throw RowError("duplicate driver " + id);
    } catch (const std::exception& e) {
      throw SchemaError(where + e.what());
    }
  }
}

void load_fleet(const std::filesystem::path& path, Dataset& ds) {
  std::ifstream in = open_input(path);
  read_fleet(in, ds);
}

void write_trips(const Dataset& ds, std::ostream& out, const WriteOptions& opts) {
  std::vector<std::string> header = {"ride_id",      "request_ts",    "pickup_lat",
                                     "pickup_lon",   "dropoff_lat",   "dropoff_lon",
                                     "driver_id",    "vehicle_make",  "vehicle_model",
                                     "vehicle_year", "trip_distance_km", "reached_ts",
                                     "completed_ts"};
  if (opts.augmented) {
    for (const char* extra : {"powertrain", "unit_emission_g_per_km", "fuel_l_per_100km",
                              "energy_kwh_per_km", "emission_class"}) {
      header.emplace_back(extra);
    }
  }
  out << csv::join(header) << '\n';
  for (const TripRecord& t : ds.trips) {
    std::vector<std::string> row = {t.ride_id,
                                    std::to_string(t.request_ts),
                                    csv::format_double(t.pickup.lat),
                                    csv::format_double(t.pickup.lon),
                                    csv::format_double(t.dropoff.lat),
                                    csv::format_double(t.dropoff.lon),
                                    t.driver_id,
                                    t.vehicle_make,
                                    t.vehicle_model,
                                    std::to_string(t.vehicle_year),
                                    opt_str(t.trip_distance_km),
                                    opt_str(t.reached_ts),
                                    opt_str(t.completed_ts)};
    if (opts.augmented) {
      const auto it = ds.fleet.find(t.driver_id);
      if (it == ds.fleet.end()) throw RowError("driver '" + t.driver_id + "' not in fleet");
      const fleet::VehicleProfile& v = it->second;
      row.emplace_back(fleet::to_string(v.powertrain));
      row.push_back(csv::format_double(v.unit_emission));
      row.push_back(opt_str(v.fuel_consumption));
      row.push_back(opt_str(v.energy_efficiency));
      row.emplace_back(
          fleet::to_string(fleet::classify_vehicle(v, opts.lev_threshold, opts.hev_threshold)));
    }
    out << csv::join(row) << '\n';
  }
}

void write_fleet(const Dataset& ds, std::ostream& out, double lev_threshold,
                 double hev_threshold) {
  out << "driver_id,vehicle_id,make,model,year,powertrain,unit_emission_g_per_km,"
         "fuel_l_per_100km,energy_kwh_per_km,emission_imputed,start_lat,start_lon,"
         "emission_class\n";
  for (const auto& [id, v] : ds.fleet) {
    const auto start = ds.start_positions.find(id);
    const bool has_start = start != ds.start_positions.end();
    out << csv::join({id, v.vehicle_id, v.make, v.model, std::to_string(v.year),
                      std::string(fleet::to_string(v.powertrain)),
                      csv::format_double(v.unit_emission), opt_str(v.fuel_consumption),
                      opt_str(v.energy_efficiency), v.emission_imputed ? "1" : "0",
                      has_start ? csv::format_double(start->second.lat) : "",
                      has_start ? csv::format_double(start->second.lon) : "",
                      std::string(fleet::to_string(
                          fleet::classify_vehicle(v, lev_threshold, hev_threshold)))})
        << '\n';
  }
}

Dataset inject_evs(Dataset ds, double fraction, std::uint64_t seed, double lev_threshold) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw DomainError("EV fraction must lie in [0, 1]");
  }
  std::vector<std::string> candidates;
  for (const auto& [id, v] : ds.fleet) {
    if (fleet::classify_vehicle(v, lev_threshold) != fleet::EmissionClass::LEV) {
      candidates.push_back(id);
    }
  }
  const auto k = static_cast<std::size_t>(
      std::llround(fraction * static_cast<double>(candidates.size())));
  Rng rng(seed);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + rng.below(candidates.size() - i);
    std::swap(candidates[i], candidates[j]);
    auto& v = ds.fleet[candidates[i]];
    v = fleet::convert_to_ev(std::move(v));
  }
  return ds;
}

double lev_share(const Dataset& ds, double lev_threshold) {
  if (ds.fleet.empty()) return 0.0;
  std::size_t n = 0;
  for (const auto& [id, v] : ds.fleet) {
    n += fleet::classify_vehicle(v, lev_threshold) == fleet::EmissionClass::LEV;
  }
  return static_cast<double>(n) / static_cast<double>(ds.fleet.size());
}

void SynthConfig::validate() const {
  if (!(lev_fraction >= 0.0 && lev_fraction <= 1.0)) {
    throw ConfigError("LEV fraction must lie in [0, 1]");
  }
  if (drivers == 0 && requests > 0) throw ConfigError("requests need at least one driver");
  if (!(extent_km > 0.0)) throw ConfigError("extent must be positive");
  if (!(span_s > 0.0)) throw ConfigError("time span must be positive");
  if (hourly_weights.empty() ||
      std::any_of(hourly_weights.begin(), hourly_weights.end(),
                  [](double w) { return !(w >= 0.0); }) ||
      std::accumulate(hourly_weights.begin(), hourly_weights.end(), 0.0) <= 0.0) {
    throw ConfigError("hourly weights must be non-negative with a positive sum");
  }
  if (!(min_trip_km > 0.0 && min_trip_km <= max_trip_km)) {
    throw ConfigError("trip length bounds must satisfy 0 < min <= max");
  }
  if (!(lev_emission_min >= 0.0 && lev_emission_min < fleet::kLevThreshold)) {
    throw ConfigError("LEV emission minimum must lie in [0, 135)");
  }
  if (!(nonlev_emission_min >= fleet::kLevThreshold &&
        nonlev_emission_min <= nonlev_emission_max)) {
    throw ConfigError("non-LEV emission range must start at >= 135 and be non-empty");
  }
}

double gasoline_l_per_100km(double co2_g_per_km) { return co2_g_per_km / 23.1; }

namespace {

std::string padded(char prefix, std::size_t i, std::size_t count) {
  const std::size_t width = std::to_string(count).size();
  std::string digits = std::to_string(i);
  return std::string(1, prefix) + std::string(width - digits.size(), '0') + digits;
}

}  // namespace

Dataset gen_synthetic(const SynthConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Rng rng(seed);
  Dataset ds;
  const double half = cfg.extent_km / 2.0;
  auto random_point = [&] {
    const double north = rng.uniform(-half, half);
    const double east = rng.uniform(-half, half);
    return geo::offset_km(cfg.center, north, east);
  };

  std::vector<std::size_t> order(cfg.drivers);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = 0; i + 1 < order.size(); ++i) {
    std::swap(order[i], order[i + 1 + rng.below(order.size() - i - 1)]);
  }
  const auto n_lev = static_cast<std::size_t>(
      std::llround(cfg.lev_fraction * static_cast<double>(cfg.drivers)));
  std::vector<bool> is_lev(cfg.drivers, false);
  for (std::size_t i = 0; i < n_lev; ++i) is_lev[order[i]] = true;

  std::vector<std::string> driver_ids;
  for (std::size_t i = 0; i < cfg.drivers; ++i) {
    const std::string id = padded('D', i + 1, cfg.drivers);
    driver_ids.push_back(id);
    fleet::VehicleProfile v;
    v.vehicle_id = padded('V', i + 1, cfg.drivers);
    v.make = "Synthetic";
    v.year = 2015;
    if (is_lev[i]) {
      v.model = "Hybrid";
      v.unit_emission = rng.uniform(cfg.lev_emission_min, fleet::kLevThreshold);
    } else {
      v.model = "Sedan";
      v.unit_emission = rng.uniform(cfg.nonlev_emission_min, cfg.nonlev_emission_max);
    }
    v.fuel_consumption = gasoline_l_per_100km(v.unit_emission);
    ds.fleet[id] = std::move(v);
    ds.start_positions[id] = random_point();
  }

  // Arrival times by inverse CDF of the piecewise-constant hourly rate.
  std::vector<double> bin_start, bin_cdf;
  double total = 0.0;
  for (double t = 0.0; t < cfg.span_s; t += 3600.0) {
    const auto hour = static_cast<std::size_t>(t / 3600.0) % cfg.hourly_weights.size();
    const double width = std::min(3600.0, cfg.span_s - t);
    bin_start.push_back(t);
    total += cfg.hourly_weights[hour] * width;
    bin_cdf.push_back(total);
  }
  std::vector<double> times(cfg.requests);
  for (double& t : times) {
    const double u = rng.uniform() * total;
    const auto b = static_cast<std::size_t>(
        std::upper_bound(bin_cdf.begin(), bin_cdf.end(), u) - bin_cdf.begin());
    const std::size_t bin = std::min(b, bin_cdf.size() - 1);
    const double lo = bin ? bin_cdf[bin - 1] : 0.0;
    const double width = std::min(3600.0, cfg.span_s - bin_start[bin]);
    const double frac = bin_cdf[bin] > lo ? (u - lo) / (bin_cdf[bin] - lo) : 0.0;
    t = bin_start[bin] + frac * width;
  }
  std::sort(times.begin(), times.end());

  for (std::size_t i = 0; i < cfg.requests; ++i) {
    TripRecord t;
    t.ride_id = padded('R', i + 1, cfg.requests);
    t.request_ts = cfg.start_ts + static_cast<std::int64_t>(std::floor(times[i]));
    const double north = rng.uniform(-half, half);
    const double east = rng.uniform(-half, half);
    t.pickup = geo::offset_km(cfg.center, north, east);
    const double length = rng.uniform(cfg.min_trip_km, cfg.max_trip_km);
    const double heading = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
    const double dn = std::clamp(north + length * std::cos(heading), -half, half);
    const double de = std::clamp(east + length * std::sin(heading), -half, half);
    t.dropoff = geo::offset_km(cfg.center, dn, de);
    t.driver_id = driver_ids[rng.below(driver_ids.size())];
    const auto& v = ds.fleet[t.driver_id];
    t.vehicle_make = v.make;
    t.vehicle_model = v.model;
    t.vehicle_year = v.year;
    ds.trips.push_back(std::move(t));
  }
  return ds;
}

}  // namespace ecodispatch::ingest
