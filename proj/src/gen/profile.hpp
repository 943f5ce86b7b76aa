#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "core/sample.hpp"

namespace ipd {

// Latent behavioral parameters of one simulated user. Every field is
// signature = base + sigma_sig * perturbation(seed), so sigma_sig = 0 makes
// all users identical and larger values spread them apart.
struct UserProfile {
  std::string user_id;
  double sigma_sig = 0.0;

  double tremor_hz = 0.0;       // hand-tremor frequency
  double tremor_amp = 0.0;      // tremor amplitude on accel/gyro
  std::array<double, 4> orientation_q{};  // baseline rotation vector (w,x,y,z)
  double cadence_scale = 1.0;   // multiplies template interaction rates
  double drain_ma = 0.0;        // battery-drain baseline (current channel)
  double mem_mb = 0.0;          // memory baseline
  std::array<double, kNumApps> dwell{};   // per-app dwell tendency (gap/excursion scale)

  // Per-channel baselines derived from the signature draw.
  std::array<double, kImuDim> imu_mean{};
  std::array<double, kSysDim> sys_mean{};

  // Flattened latent parameters, used for the pairwise-distance checks.
  std::vector<double> signature() const;
};

UserProfile generate_profile(uint64_t seed, double sigma_sig, std::string user_id = {});

}  // namespace ipd
