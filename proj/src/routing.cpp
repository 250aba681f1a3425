#include "ecodispatch/routing.hpp"

#include <fstream>
#include <ostream>
#include <string>

#include "ecodispatch/csv.hpp"
#include "ecodispatch/errors.hpp"
#include "ecodispatch/geo.hpp"

namespace ecodispatch::routing {

std::string_view to_string(TripCategory c) {
  switch (c) {
    case TripCategory::Short: return "Short";
    case TripCategory::Medium: return "Medium";
    case TripCategory::Long: return "Long";
  }
  return "Short";
}

std::string_view to_string(RoutePolicy p) {
  switch (p) {
    case RoutePolicy::Shortest: return "shortest";
    case RoutePolicy::Fastest: return "fastest";
    case RoutePolicy::FuelEfficient: return "fuel";
  }
  return "shortest";
}

RoutePolicy parse_route_policy(std::string_view s) {
  if (s == "shortest" || s == "S") return RoutePolicy::Shortest;
  if (s == "fastest" || s == "F") return RoutePolicy::Fastest;
  if (s == "fuel" || s == "fuel-efficient" || s == "E") return RoutePolicy::FuelEfficient;
  throw ConfigError("unknown routing policy '" + std::string(s) + "'");
}

TripCategory categorize(double shortest_distance_km) {
  const double miles = shortest_distance_km / geo::kKmPerMile;
  if (miles < 1.0) return TripCategory::Short;
  if (miles <= 10.0) return TripCategory::Medium;
  return TripCategory::Long;
}

const RouteOption& RouteTriple::select(RoutePolicy p) const {
  switch (p) {
    case RoutePolicy::Shortest: return shortest;
    case RoutePolicy::Fastest: return fastest;
    case RoutePolicy::FuelEfficient: return fuel_efficient;
  }
  return shortest;
}

std::vector<std::string> check_invariants(const RouteTriple& t) {
  std::vector<std::string> out;
  const std::pair<const char*, const RouteOption*> options[] = {
      {"shortest", &t.shortest}, {"fastest", &t.fastest}, {"fuel_efficient", &t.fuel_efficient}};
  for (const auto& [name, o] : options) {
    if (!(o->distance_km >= 0.0 && o->duration_s >= 0.0 && o->emission_distance_km >= 0.0)) {
      out.push_back(std::string(name) + ": negative field");
    }
    if (o->emission_distance_km < 0.8 * o->distance_km ||
        o->emission_distance_km > 1.5 * o->distance_km) {
      out.push_back(std::string(name) + ": emission distance outside [0.8, 1.5] x distance");
    }
  }
  if (t.shortest.distance_km > t.fastest.distance_km ||
      t.shortest.distance_km > t.fuel_efficient.distance_km) {
    out.emplace_back("shortest route is not the shortest");
  }
  if (t.fastest.duration_s > t.shortest.duration_s ||
      t.fastest.duration_s > t.fuel_efficient.duration_s) {
    out.emplace_back("fastest route is not the fastest");
  }
  if (t.fuel_efficient.emission_distance_km > t.shortest.emission_distance_km ||
      t.fuel_efficient.emission_distance_km > t.fastest.emission_distance_km) {
    out.emplace_back("fuel-efficient route is not the most fuel-efficient");
  }
  if (t.category != categorize(t.shortest.distance_km)) {
    out.emplace_back("category does not match shortest distance");
  }
  return out;
}

RouteTriple degenerate_triple() { return RouteTriple{}; }

RouteTriple synth_route_triple(double base_distance_km, double base_speed_kmh, Rng& rng,
                               const SynthRouteConfig& cfg) {
  if (!(base_distance_km > 0.0) || !(base_speed_kmh > 0.0)) {
    throw DomainError("route synthesis needs positive base distance and speed");
  }
  RouteTriple t;
  t.category = categorize(base_distance_km);
  const InflationCaps& caps = cfg.caps[static_cast<int>(t.category)];

  const double fastest_duration = base_distance_km / base_speed_kmh * 3600.0;
  const double shortest_slowdown = caps.shortest_duration * rng.uniform_open_closed();
  const double fe_slowdown = std::min(caps.fuel_efficient_duration, shortest_slowdown) *
                             rng.uniform();
  const double fastest_emission_gap = caps.fastest_emission * rng.uniform_open_closed();
  const double shortest_emission_gap = caps.shortest_emission * rng.uniform_open_closed();

  // Fuel-equivalent distances are anchored at the shortest geometric length.
  const double fe_emission = base_distance_km;

  t.shortest.distance_km = base_distance_km;
  t.shortest.duration_s = fastest_duration * (1.0 + shortest_slowdown);
  t.shortest.emission_distance_km = fe_emission * (1.0 + shortest_emission_gap);

  t.fastest.distance_km = base_distance_km * (1.0 + caps.fastest_distance * rng.uniform_open_closed());
  t.fastest.duration_s = fastest_duration;
  t.fastest.emission_distance_km = fe_emission * (1.0 + fastest_emission_gap);

  t.fuel_efficient.distance_km =
      base_distance_km * (1.0 + caps.fuel_efficient_distance * rng.uniform());
  t.fuel_efficient.duration_s = fastest_duration * (1.0 + fe_slowdown);
  t.fuel_efficient.emission_distance_km = fe_emission;
  return t;
}

double trip_emissions(const fleet::VehicleProfile& v, const RouteOption& r) {
  return v.unit_emission * r.emission_distance_km;
}

RouteTableLoad read_route_triples(std::istream& in) {
  csv::Reader reader(in);
  if (!reader.has_header()) throw SchemaError("route file has no header");
  const char* names[] = {"ride_id",  "s_dist_km", "s_dur_s",   "s_em_km", "f_dist_km",
                         "f_dur_s",  "f_em_km",   "e_dist_km", "e_dur_s", "e_em_km"};
  std::size_t idx[10];
  for (int i = 0; i < 10; ++i) {
    auto c = reader.column(names[i]);
    if (!c) throw SchemaError(std::string("missing required column '") + names[i] + "'");
    idx[i] = *c;
  }
  RouteTableLoad out;
  std::vector<std::string> row;
  while (reader.next(row)) {
    try {
      if (row.size() != reader.header().size()) throw RowError("wrong field count");
      auto num = [&](int i) { return csv::parse_double(row[idx[i]], names[i]); };
      const std::string id = csv::trim(row[idx[0]]);
      if (id.empty()) throw RowError("empty ride_id");
      RouteTriple t;
      t.shortest = {num(1), num(2), num(3)};
      t.fastest = {num(4), num(5), num(6)};
      t.fuel_efficient = {num(7), num(8), num(9)};
      t.category = categorize(t.shortest.distance_km);
      const auto problems = check_invariants(t);
      if (!problems.empty()) throw RowError(problems.front());
      if (!out.table.emplace(id, t).second) throw RowError("duplicate ride_id " + id);
      ++out.accepted;
    } catch (const RowError& e) {
      ++out.rejected;
      out.diagnostics.push_back("line " + std::to_string(reader.line_number()) + ": " + e.what());
    }
  }
  return out;
}

RouteTableLoad load_route_triples(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open " + path.string());
  return read_route_triples(in);
}

void write_route_triples(const std::map<std::string, RouteTriple>& table, std::ostream& out) {
  out << "ride_id,s_dist_km,s_dur_s,s_em_km,f_dist_km,f_dur_s,f_em_km,e_dist_km,e_dur_s,e_em_km\n";
  for (const auto& [id, t] : table) {
    std::vector<std::string> row = {id};
    for (const RouteOption* o : {&t.shortest, &t.fastest, &t.fuel_efficient}) {
      row.push_back(csv::format_double(o->distance_km));
      row.push_back(csv::format_double(o->duration_s));
      row.push_back(csv::format_double(o->emission_distance_km));
    }
    out << csv::join(row) << '\n';
  }
}

}  // namespace ecodispatch::routing
