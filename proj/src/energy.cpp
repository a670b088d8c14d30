#include "dronesafe/energy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dronesafe {
namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw std::invalid_argument(std::string("aircraft/battery parameter must be positive: ") + name);
  }
}

}  // namespace

void AircraftParams::validate() const {
  if (max_packages < 1) throw std::invalid_argument("max_packages must be >= 1");
  if (blade_count < 1) throw std::invalid_argument("blade_count must be >= 1");
  require_positive(cruise_speed, "cruise_speed");
  require_positive(mass, "mass");
  require_positive(weight, "weight");
  require_positive(rotor_radius, "rotor_radius");
  require_positive(disc_area, "disc_area");
  require_positive(solidity, "solidity");
  require_positive(blade_angular_velocity, "blade_angular_velocity");
  require_positive(tip_speed, "tip_speed");
  require_positive(air_density, "air_density");
  require_positive(fuselage_drag_ratio, "fuselage_drag_ratio");
  require_positive(hover_induced_velocity, "hover_induced_velocity");
  require_positive(profile_drag_coeff, "profile_drag_coeff");
  require_positive(induced_power_factor, "induced_power_factor");
}

void BatteryModel::validate() const {
  require_positive(capacity_kwh, "capacity_kwh");
  require_positive(max_charge_per_journey_kwh, "max_charge_per_journey_kwh");
  require_positive(charger_power_kw, "charger_power_kw");
  if (max_charge_per_journey_kwh > capacity_kwh) {
    throw std::invalid_argument("max_charge_per_journey_kwh exceeds capacity_kwh");
  }
  if (!(reserve_fraction >= 0.0 && reserve_fraction <= 1.0)) {
    throw std::invalid_argument("reserve_fraction must lie in [0, 1]");
  }
}

double BatteryModel::journey_duration_s() const {
  return max_charge_per_journey_kwh / charger_power_kw * 3600.0;
}

BatteryModel BatteryModel::desk_scale() {
  BatteryModel b;
  b.capacity_kwh = 2.0;
  b.max_charge_per_journey_kwh = 0.4;
  b.charger_power_kw = 72.0;
  b.reserve_fraction = 0.10;
  return b;
}

Soc::Soc(double fraction) : fraction_(std::clamp(fraction, 0.0, 1.0)) {}

PowerBreakdown hover_power_terms(const AircraftParams& p) {
  const double omega = p.blade_angular_velocity;
  const double r = p.rotor_radius;
  PowerBreakdown out;
  out.blade_profile = p.profile_drag_coeff / 8.0 * p.air_density * p.solidity * p.disc_area *
                      omega * omega * omega * r * r * r;
  out.induced = (1.0 + p.induced_power_factor) * std::pow(p.weight, 1.5) /
                std::sqrt(2.0 * p.air_density * p.disc_area);
  return out;
}

double hover_power(const AircraftParams& params) { return hover_power_terms(params).total(); }

PowerBreakdown propulsion_power_terms(double speed, const AircraftParams& p) {
  if (speed < 0.0 || !std::isfinite(speed)) {
    throw std::invalid_argument("propulsion speed must be a finite non-negative value");
  }
  const PowerBreakdown hover = hover_power_terms(p);
  const double v2 = speed * speed;
  const double v0_2 = p.hover_induced_velocity * p.hover_induced_velocity;
  // sqrt(1 + x^2) - x with x = v^2 / (2 v0^2); always in (0, 1].
  const double x = v2 / (2.0 * v0_2);
  const double inner = std::sqrt(1.0 + x * x) - x;

  PowerBreakdown out;
  out.induced = hover.induced * std::sqrt(inner);
  out.blade_profile = hover.blade_profile * (1.0 + 3.0 * v2 / (p.tip_speed * p.tip_speed));
  out.parasite = 0.5 * p.fuselage_drag_ratio * p.air_density * p.solidity * p.disc_area * v2 * speed;
  return out;
}

double propulsion_power(double speed, const AircraftParams& params) {
  return propulsion_power_terms(speed, params).total();
}

double energy_per_meter(const AircraftParams& params) {
  return propulsion_power(params.cruise_speed, params) / params.cruise_speed / kJoulesPerKwh;
}

double energy_for_leg(double distance, const AircraftParams& params) {
  if (distance < 0.0) throw std::invalid_argument("leg distance must be non-negative");
  return propulsion_power(params.cruise_speed, params) * (distance / params.cruise_speed) /
         kJoulesPerKwh;
}

double hover_energy(double duration, const AircraftParams& params) {
  return hover_power(params) * duration / kJoulesPerKwh;
}

Soc apply_charge(Soc soc, double duration, const BatteryModel& battery) {
  if (duration < 0.0) throw std::invalid_argument("charge duration must be non-negative");
  const double delivered_kwh =
      std::min(battery.charger_power_kw * duration / 3600.0, battery.max_charge_per_journey_kwh);
  return Soc(soc.fraction() + delivered_kwh / battery.capacity_kwh);
}

}  // namespace dronesafe
