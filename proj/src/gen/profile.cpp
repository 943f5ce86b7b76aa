#include "gen/profile.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace ipd {

namespace {

// Population-level baselines for a phone held in the hand.
constexpr std::array<double, kImuDim> kImuBase = {
    0.5,  2.0,  9.5,    // accel xyz (m/s^2, tilted grip)
    0.0,  0.0,  0.0,    // gyro xyz (rad/s)
    0.0,  0.0,  0.0,    // linear accel xyz
    20.0, -10.0, 40.0,  // magnetometer xyz (uT)
    0.95, 0.20, 0.15, 0.10,  // rotation vector wxyz
    5.0,     // proximity (cm)
    1013.0,  // pressure (hPa)
    150.0,   // light (lux)
};

// How far one unit of sigma_sig shifts each channel baseline; roughly the
// same order as the channel's process noise so sigma_sig=2 is well separated.
constexpr std::array<double, kImuDim> kImuSigScale = {
    0.15, 0.15, 0.15, 0.02, 0.02, 0.02, 0.02, 0.02, 0.02,
    1.5,  1.5,  1.5,  0.015, 0.015, 0.015, 0.015, 0.3, 0.5, 25.0,
};

constexpr std::array<double, kSysDim> kSysBase = {
    2.0e3,   // upstream B/s
    2.0e4,   // downstream B/s
    180.0,   // current mA
    3900.0,  // voltage mV
    300.0,   // temperature 0.1 C
    2800.0,  // memory MB
    12.0,    // foreground-capable app count
};

constexpr std::array<double, kSysDim> kSysSigScale = {300.0, 3000.0, 25.0, 40.0, 6.0, 150.0, 1.2};

}  // namespace

std::vector<double> UserProfile::signature() const {
  std::vector<double> s;
  s.reserve(4 + 4 + kNumApps + kImuDim + kSysDim);
  s.push_back(tremor_hz);
  s.push_back(tremor_amp);
  s.push_back(cadence_scale);
  s.push_back(drain_ma);
  s.insert(s.end(), orientation_q.begin(), orientation_q.end());
  s.push_back(mem_mb);
  s.insert(s.end(), dwell.begin(), dwell.end());
  s.insert(s.end(), imu_mean.begin(), imu_mean.end());
  s.insert(s.end(), sys_mean.begin(), sys_mean.end());
  return s;
}

UserProfile generate_profile(uint64_t seed, double sigma_sig, std::string user_id) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);

  UserProfile p;
  p.user_id = std::move(user_id);
  p.sigma_sig = sigma_sig;

  p.tremor_hz = std::clamp(1.8 + 0.25 * sigma_sig * z(rng), 0.3, 4.0);
  p.tremor_amp = std::max(0.01, 0.05 * (1.0 + 0.3 * sigma_sig * z(rng)));
  p.cadence_scale = std::exp(0.15 * sigma_sig * z(rng));
  p.drain_ma = kSysBase[2] + kSysSigScale[2] * sigma_sig * z(rng);
  p.mem_mb = kSysBase[5] + kSysSigScale[5] * sigma_sig * z(rng);
  for (auto& d : p.dwell) d = std::exp(0.2 * sigma_sig * z(rng));

  for (int i = 0; i < kImuDim; ++i) {
    p.imu_mean[static_cast<size_t>(i)] =
        kImuBase[static_cast<size_t>(i)] + kImuSigScale[static_cast<size_t>(i)] * sigma_sig * z(rng);
  }
  // Rotation vector stays a unit quaternion.
  double norm = 0.0;
  for (int i = 12; i < 16; ++i) norm += p.imu_mean[static_cast<size_t>(i)] * p.imu_mean[static_cast<size_t>(i)];
  norm = std::sqrt(std::max(norm, 1e-9));
  for (int i = 12; i < 16; ++i) p.imu_mean[static_cast<size_t>(i)] /= norm;

  for (int i = 0; i < kSysDim; ++i) {
    p.sys_mean[static_cast<size_t>(i)] =
        kSysBase[static_cast<size_t>(i)] + kSysSigScale[static_cast<size_t>(i)] * sigma_sig * z(rng);
  }
  p.sys_mean[2] = p.drain_ma;
  p.sys_mean[5] = p.mem_mb;
  p.sys_mean[6] = std::max(2.0, p.sys_mean[6]);
  return p;
}

}  // namespace ipd
