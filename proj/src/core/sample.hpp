#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "core/taxonomy.hpp"

namespace ipd {

// Foreground application channel. The six named apps are the ones the task
// templates run on; everything else is OTHER.
enum class App : uint8_t { Amazon = 0, Gmail, Instagram, Slack, Spotify, YouTube, Other };
inline constexpr int kNumApps = 7;

// Accessibility-style interaction event kinds, NONE when no event fired in
// the sampling interval.
enum class IntEvent : uint8_t {
  Click = 0, LongClick, Scroll, TextChanged, Focus, WindowChange, None
};
inline constexpr int kNumIntEvents = 7;

std::string_view name(App a);
std::string_view name(IntEvent e);
App app_from_name(std::string_view n);
IntEvent int_event_from_name(std::string_view n);

inline constexpr int kImuDim = 19;  // accel/gyro/lin-accel/mag xyz, rot-vec wxyz, prox, pressure, light
inline constexpr int kSysDim = 7;   // up/down bandwidth, current, voltage, temp, mem, app count

// One timestamped reading across the four modality groups.
struct MultimodalSample {
  double t = 0.0;  // seconds, strictly increasing within a session
  std::array<float, kImuDim> imu{};
  std::array<float, kSysDim> sys{};
  float int_rate = 0.0f;  // events/s
  IntEvent int_event = IntEvent::None;
  App app = App::Other;
};

// A contiguous single-task recording; samples lie on a uniform grid at rate_hz.
struct SessionTrace {
  std::string user_id;
  std::string session_id;
  Subaction subaction = Subaction::Nio;
  App platform = App::Other;
  double rate_hz = 0.0;
  std::vector<MultimodalSample> samples;

  double duration_s() const {
    return rate_hz > 0 ? static_cast<double>(samples.size()) / rate_hz : 0.0;
  }
};

}  // namespace ipd
