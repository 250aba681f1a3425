#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "ecodispatch/geo.hpp"

namespace ecodispatch::fleet {

// Reference EV (Tesla Model Y class) on the Austin grid average.
inline constexpr double kEvUnitEmission = 63.35;        // g CO2eq / km
inline constexpr double kEvEnergyEfficiency = 0.1553;   // kWh / km
inline constexpr double kDefaultCarbonIntensity = 408;  // g CO2eq / kWh
inline constexpr double kLevThreshold = 135.0;          // g CO2eq / km
inline constexpr double kHevThreshold = 11.7;           // L / 100 km (~20 mpg)

enum class Powertrain { ICE, EV };
enum class EmissionClass { LEV, HEV, Standard };

std::string_view to_string(Powertrain p);
std::string_view to_string(EmissionClass c);
Powertrain parse_powertrain(std::string_view s);
EmissionClass parse_emission_class(std::string_view s);

struct VehicleProfile {
  std::string vehicle_id;
  std::string make;
  std::string model;
  int year = 0;
  Powertrain powertrain = Powertrain::ICE;
  double unit_emission = 0.0;  // g CO2eq / km
  std::optional<double> fuel_consumption;   // L / 100 km, ICE only
  std::optional<double> energy_efficiency;  // kWh / km, EV only
  // Set when unit_emission came from the fleet-median fallback.
  bool emission_imputed = false;

  friend bool operator==(const VehicleProfile&, const VehicleProfile&) = default;
};

// Throws DomainError on negative rates or an EV without an efficiency figure.
void validate(const VehicleProfile& v);

double ev_unit_emission(double efficiency_kwh_per_km,
                        double carbon_intensity_g_per_kwh = kDefaultCarbonIntensity);

// LEV iff unit_emission < lev_threshold; HEV iff not LEV and the vehicle
// burns at least hev_threshold L/100km. Vehicles without a fuel figure can
// only be LEV or Standard.
EmissionClass classify_vehicle(const VehicleProfile& v, double lev_threshold = kLevThreshold,
                               double hev_threshold = kHevThreshold);

// Turns a vehicle into the reference EV, keeping identity fields.
VehicleProfile convert_to_ev(VehicleProfile v);

enum class DriverStatus { Idle, Busy };

// Live state of one driver inside the simulator.
struct DriverState {
  std::string driver_id;
  std::string vehicle_id;
  geo::GeoPoint location;
  DriverStatus status = DriverStatus::Idle;
  std::optional<double> busy_until;              // seconds, iff Busy
  std::optional<geo::GeoPoint> pending_dropoff;  // iff Busy

  // Where the driver will be once free.
  const geo::GeoPoint& next_location() const { return pending_dropoff ? *pending_dropoff : location; }
  double remaining_busy(double now) const;

  void commit(double now, double until, const geo::GeoPoint& dropoff);
  // Completes the pending ride if it ends at or before now.
  void release_if_done(double now);
};

}  // namespace ecodispatch::fleet
