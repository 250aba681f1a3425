#include "ecodispatch/fleet.hpp"

#include <cmath>
#include <string>

#include "ecodispatch/errors.hpp"

namespace ecodispatch::fleet {

std::string_view to_string(Powertrain p) { return p == Powertrain::EV ? "EV" : "ICE"; }

std::string_view to_string(EmissionClass c) {
  switch (c) {
    case EmissionClass::LEV: return "LEV";
    case EmissionClass::HEV: return "HEV";
    case EmissionClass::Standard: return "Standard";
  }
  return "Standard";
}

Powertrain parse_powertrain(std::string_view s) {
  if (s == "EV" || s == "ev") return Powertrain::EV;
  if (s == "ICE" || s == "ice") return Powertrain::ICE;
  throw RowError("unknown powertrain '" + std::string(s) + "'");
}

EmissionClass parse_emission_class(std::string_view s) {
  if (s == "LEV") return EmissionClass::LEV;
  if (s == "HEV") return EmissionClass::HEV;
  if (s == "Standard") return EmissionClass::Standard;
  throw RowError("unknown emission class '" + std::string(s) + "'");
}

void validate(const VehicleProfile& v) {
  if (!(v.unit_emission >= 0.0) || !std::isfinite(v.unit_emission)) {
    throw DomainError("vehicle " + v.vehicle_id + ": unit emission must be >= 0");
  }
  if (v.fuel_consumption && !(*v.fuel_consumption >= 0.0)) {
    throw DomainError("vehicle " + v.vehicle_id + ": fuel consumption must be >= 0");
  }
  if (v.powertrain == Powertrain::EV && !v.energy_efficiency) {
    throw DomainError("vehicle " + v.vehicle_id + ": EV without energy efficiency");
  }
  if (v.energy_efficiency && !(*v.energy_efficiency >= 0.0)) {
    throw DomainError("vehicle " + v.vehicle_id + ": energy efficiency must be >= 0");
  }
}

double ev_unit_emission(double efficiency_kwh_per_km, double carbon_intensity_g_per_kwh) {
  if (!(efficiency_kwh_per_km >= 0.0) || !(carbon_intensity_g_per_kwh >= 0.0)) {
    throw DomainError("energy efficiency and carbon intensity must be >= 0");
  }
  return efficiency_kwh_per_km * carbon_intensity_g_per_kwh;
}

EmissionClass classify_vehicle(const VehicleProfile& v, double lev_threshold,
                               double hev_threshold) {
  if (!(lev_threshold > 0.0) || !(hev_threshold > 0.0)) {
    throw DomainError("classification thresholds must be positive");
  }
  if (v.unit_emission < lev_threshold) return EmissionClass::LEV;
  if (v.powertrain == Powertrain::ICE && v.fuel_consumption &&
      *v.fuel_consumption >= hev_threshold) {
    return EmissionClass::HEV;
  }
  return EmissionClass::Standard;
}

VehicleProfile convert_to_ev(VehicleProfile v) {
  v.powertrain = Powertrain::EV;
  v.unit_emission = kEvUnitEmission;
  v.energy_efficiency = kEvEnergyEfficiency;
  v.fuel_consumption.reset();
  v.emission_imputed = false;
  return v;
}

double DriverState::remaining_busy(double now) const {
  if (status == DriverStatus::Idle || !busy_until) return 0.0;
  return *busy_until > now ? *busy_until - now : 0.0;
}

void DriverState::commit(double now, double until, const geo::GeoPoint& dropoff) {
  if (until < now) throw ContractError("driver " + driver_id + " committed into the past");
  if (pending_dropoff) location = *pending_dropoff;
  status = DriverStatus::Busy;
  busy_until = until;
  pending_dropoff = dropoff;
}

void DriverState::release_if_done(double now) {
  if (status == DriverStatus::Busy && busy_until && *busy_until <= now) {
    location = *pending_dropoff;
    status = DriverStatus::Idle;
    busy_until.reset();
    pending_dropoff.reset();
  }
}

}  // namespace ecodispatch::fleet
