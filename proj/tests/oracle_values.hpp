#pragma once

// Frozen output of tests/oracles/energy_oracle.py (40-digit arithmetic).
namespace oracle {
inline constexpr double kHoverBlade = 16137.515591349068;
inline constexpr double kHoverInduced = 620762.35560863113;
inline constexpr double kHoverTotal = 636899.8711999802;
inline constexpr double kCruiseBlade = 36847.984105485209;
inline constexpr double kCruiseInduced = 220807.59465345638;
inline constexpr double kCruiseParasite = 3979.187365199288;
inline constexpr double kCruiseTotal = 261634.76612414088;
inline constexpr double kKwhPerMeter = 0.00098528136334931897;
inline constexpr double kKwhPerCruiseSecond = 0.072676323923372466;
}  // namespace oracle
