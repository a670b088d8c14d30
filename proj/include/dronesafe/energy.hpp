#pragma once

namespace dronesafe {

inline constexpr double kJoulesPerKwh = 3.6e6;

// Rotorcraft constants. Defaults are the reference aircraft's tabulated
// values; the tabulated v0 and U_tip are used as-is rather than re-derived
// from R, W, s and A.
struct AircraftParams {
  int max_packages = 4;
  double cruise_speed = 73.762;             // m/s
  double mass = 1815.0;                     // kg
  double weight = 17799.0;                  // N
  double rotor_radius = 1.45;               // m
  double disc_area = 6.61;                  // m^2
  int blade_count = 5;
  double solidity = 0.2449;
  double blade_angular_velocity = 78.0;     // rad/s
  double tip_speed = 112.776;               // m/s
  double air_density = 1.225;               // kg/m^3
  double fuselage_drag_ratio = 0.01;
  double hover_induced_velocity = 26.45;    // m/s
  double profile_drag_coeff = 0.045;
  double induced_power_factor = 0.052;

  // Throws std::invalid_argument naming the first offending field.
  void validate() const;
};

struct BatteryModel {
  double capacity_kwh = 150.0;
  double max_charge_per_journey_kwh = 30.0;
  double charger_power_kw = 360.0;
  double reserve_fraction = 0.10;

  void validate() const;
  // Seconds needed to deliver one journey's worth of charge.
  double journey_duration_s() const;

  // 2 kWh pack with the same 20 % per-journey ratio, so a 300-step episode
  // on a 1 km grid drains a meaningful share of the battery.
  static BatteryModel desk_scale();
};

// State of charge, always within [0, 1].
class Soc {
 public:
  Soc() = default;
  explicit Soc(double fraction);
  double fraction() const { return fraction_; }
  friend bool operator==(Soc, Soc) = default;

 private:
  double fraction_ = 1.0;
};

struct PowerBreakdown {
  double induced = 0.0;
  double blade_profile = 0.0;
  double parasite = 0.0;

  double total() const { return induced + blade_profile + parasite; }
};

PowerBreakdown hover_power_terms(const AircraftParams& params);
double hover_power(const AircraftParams& params);  // W

PowerBreakdown propulsion_power_terms(double speed, const AircraftParams& params);
double propulsion_power(double speed, const AircraftParams& params);  // W

// kWh to fly `distance` metres at cruise speed.
double energy_for_leg(double distance, const AircraftParams& params);
double energy_per_meter(const AircraftParams& params);  // kWh/m
// kWh to hover for `duration` seconds.
double hover_energy(double duration, const AircraftParams& params);

Soc apply_charge(Soc soc, double duration, const BatteryModel& battery);

}  // namespace dronesafe
