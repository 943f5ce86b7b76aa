#include "gen/session.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace ipd {

namespace {

// Stationary noise scale per IMU channel (before activity scaling).
constexpr std::array<double, kImuDim> kImuSd = {
    0.12, 0.12, 0.12, 0.03, 0.03, 0.03, 0.05, 0.05, 0.05,
    0.8,  0.8,  0.8,  0.008, 0.008, 0.008, 0.008, 0.1, 0.2, 12.0,
};
// AR(1) coefficient per channel: fast for motion, slow for environment.
constexpr std::array<double, kImuDim> kImuRho = {
    0.90, 0.90, 0.90, 0.85, 0.85, 0.85, 0.80, 0.80, 0.80,
    0.98, 0.98, 0.98, 0.97, 0.97, 0.97, 0.97, 0.95, 0.99, 0.97,
};

struct PhasePlan {
  size_t begin = 0, end = 0;  // sample index range
  double lambda = 0.0;        // events/s after cadence scaling
  const Phase* phase = nullptr;
};

}  // namespace

SessionTrace generate_session(const UserProfile& profile, const TaskTemplate& tmpl,
                              double duration_s, uint64_t seed, const SessionGenOptions& opts) {
  const double lo = tmpl.dur_lo_s * opts.dur_scale;
  const double hi = tmpl.dur_hi_s * opts.dur_scale;
  if (duration_s < 0.4 * lo || duration_s > 1.1 * hi) {
    throw std::invalid_argument("generate_session: duration outside template range");
  }
  const auto n = static_cast<size_t>(std::lround(duration_s * opts.rate_hz));
  if (n == 0) throw std::invalid_argument("generate_session: zero-length session");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  // Phase layout and per-phase rates.
  std::vector<PhasePlan> plan;
  {
    size_t pos = 0;
    double acc = 0.0;
    for (size_t pi = 0; pi < tmpl.phases.size(); ++pi) {
      const Phase& ph = tmpl.phases[pi];
      acc += ph.frac;
      size_t end = pi + 1 == tmpl.phases.size() ? n : std::min(n, static_cast<size_t>(acc * n));
      PhasePlan pp;
      pp.begin = pos;
      pp.end = std::max(end, pos);
      pp.lambda = (ph.rate_lo + u01(rng) * (ph.rate_hi - ph.rate_lo)) * profile.cadence_scale;
      pp.phase = &ph;
      plan.push_back(pp);
      pos = pp.end;
    }
    plan.back().end = n;
  }

  // OTHER-app excursions (brief notification glances); none on OTHER-platform tasks.
  std::vector<std::pair<size_t, size_t>> excursions;
  if (tmpl.platform != App::Other) {
    const double dwell = profile.dwell[static_cast<size_t>(tmpl.platform)];
    std::poisson_distribution<int> pois(duration_s / 45.0 / std::max(0.25, dwell));
    int n_exc = std::min(3, pois(rng));
    for (int e = 0; e < n_exc; ++e) {
      const double start = u01(rng) * std::max(0.0, duration_s - 1.5);
      const double len = 0.3 + u01(rng) * 0.9;
      const auto a = static_cast<size_t>(start * opts.rate_hz);
      const auto b = std::min(n, a + std::max<size_t>(1, static_cast<size_t>(len * opts.rate_hz)));
      excursions.emplace_back(a, b);
    }
    std::sort(excursions.begin(), excursions.end());
  }

  // Tremor phases per accel/gyro axis.
  std::array<double, 6> tremor_phase{};
  for (auto& p : tremor_phase) p = u01(rng) * 2.0 * std::numbers::pi;

  SessionTrace trace;
  trace.user_id = profile.user_id;
  trace.session_id = opts.session_id;
  trace.subaction = tmpl.subaction;
  trace.platform = tmpl.platform;
  trace.rate_hz = opts.rate_hz;
  trace.samples.reserve(n);

  // AR(1) states start at their channel baselines.
  std::array<double, kImuDim> imu = profile.imu_mean;
  double up_noise = 0.0, down_noise = 0.0, cur_noise = 0.0, volt_noise = 0.0;
  double temp_noise = 0.0, mem_noise = 0.0, app_noise = 0.0;
  double act_ema = 0.3;   // thermal activity memory
  double rate_ema = plan.front().lambda;
  const double nl = opts.noise_level;
  const bool install_task = tmpl.subaction == Subaction::SoftwareInstallation;

  size_t plan_idx = 0, exc_idx = 0;
  for (size_t i = 0; i < n; ++i) {
    while (plan_idx + 1 < plan.size() && i >= plan[plan_idx].end) ++plan_idx;
    const PhasePlan& pp = plan[plan_idx];
    const Phase& ph = *pp.phase;
    const double t_rel = static_cast<double>(i) / opts.rate_hz;
    const double t_abs = opts.t0 + t_rel;

    // Interaction channel.
    while (exc_idx < excursions.size() && i >= excursions[exc_idx].second) ++exc_idx;
    const bool in_excursion =
        exc_idx < excursions.size() && i >= excursions[exc_idx].first && i < excursions[exc_idx].second;
    const bool exc_boundary = in_excursion && i == excursions[exc_idx].first;

    bool fire = u01(rng) < std::min(0.95, pp.lambda / opts.rate_hz);
    IntEvent ev = IntEvent::None;
    if (exc_boundary) {
      fire = true;
      ev = IntEvent::WindowChange;
    } else if (fire) {
      double r = u01(rng);
      double acc = 0.0, total = 0.0;
      for (double w : ph.mix) total += w;
      int kind = 5;
      for (int kidx = 0; kidx < 6; ++kidx) {
        acc += ph.mix[static_cast<size_t>(kidx)] / total;
        if (r <= acc) { kind = kidx; break; }
      }
      ev = static_cast<IntEvent>(kind);
    }
    rate_ema = 0.9 * rate_ema + 0.1 * (fire ? opts.rate_hz : 0.0);

    const double act = ph.activity;
    act_ema = 0.995 * act_ema + 0.005 * act;

    MultimodalSample s{};
    s.t = t_abs;
    s.int_event = ev;
    s.int_rate = static_cast<float>(std::max(0.0, rate_ema + 0.05 * nl * z(rng)));
    s.app = in_excursion ? App::Other : tmpl.platform;

    // IMU: AR(1) around the profile baseline + tremor on accel/gyro.
    for (int c = 0; c < kImuDim; ++c) {
      const auto ci = static_cast<size_t>(c);
      double sd = kImuSd[ci] * nl;
      if (c < 9) sd *= 1.0 + 1.5 * act;
      const double rho = kImuRho[ci];
      imu[ci] = profile.imu_mean[ci] + rho * (imu[ci] - profile.imu_mean[ci]) +
                sd * std::sqrt(1.0 - rho * rho) * z(rng);
      double v = imu[ci];
      if (c < 3) {
        v += profile.tremor_amp *
             std::sin(2.0 * std::numbers::pi * profile.tremor_hz * t_rel + tremor_phase[ci]);
      } else if (c < 6) {
        v += 0.4 * profile.tremor_amp *
             std::cos(2.0 * std::numbers::pi * profile.tremor_hz * t_rel + tremor_phase[ci]);
      }
      s.imu[ci] = static_cast<float>(v);
    }

    // SYS: baselines + task-coupled bursts + slow AR noise.
    auto ar = [&](double& state, double rho, double sd) {
      state = rho * state + sd * std::sqrt(1.0 - rho * rho) * z(rng);
      return state;
    };
    const double up_burst = ph.up_bw > 0 ? ph.up_bw * std::exp(0.25 * z(rng)) : 0.0;
    const double down_burst = ph.down_bw > 0 ? ph.down_bw * std::exp(0.25 * z(rng)) : 0.0;
    s.sys[0] = static_cast<float>(std::max(0.0, profile.sys_mean[0] + up_burst + ar(up_noise, 0.8, 150.0 * nl)));
    s.sys[1] = static_cast<float>(std::max(0.0, profile.sys_mean[1] + down_burst + ar(down_noise, 0.8, 1500.0 * nl)));
    s.sys[2] = static_cast<float>(std::max(10.0, profile.sys_mean[2] + 60.0 * act + ar(cur_noise, 0.9, 12.0 * nl)));
    s.sys[3] = static_cast<float>(profile.sys_mean[3] - 80.0 * (t_abs / 3600.0) + ar(volt_noise, 0.98, 8.0 * nl));
    s.sys[4] = static_cast<float>(profile.sys_mean[4] + 20.0 * act_ema + ar(temp_noise, 0.98, 2.0 * nl));
    double mem = profile.sys_mean[5] + ar(mem_noise, 0.97, 50.0 * nl);
    double appc = profile.sys_mean[6] + ar(app_noise, 0.995, 0.4 * nl);
    if (install_task && i >= plan.back().begin) {
      mem += 250.0;   // unpacking the installed package
      appc += 1.0;
    }
    s.sys[5] = static_cast<float>(std::max(100.0, mem));
    s.sys[6] = static_cast<float>(std::max(1.0, appc));

    trace.samples.push_back(s);
  }
  return trace;
}

}  // namespace ipd
