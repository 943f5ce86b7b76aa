#pragma once

#include <cstdint>
#include <string>

#include "core/sample.hpp"
#include "gen/profile.hpp"
#include "gen/templates.hpp"

namespace ipd {

struct SessionGenOptions {
  double rate_hz = 20.0;
  double t0 = 0.0;            // absolute start time on the user's timeline
  double dur_scale = 1.0;     // template duration ranges are scaled by this
  double noise_level = 1.0;
  std::string session_id;
};

// Synthesize one labeled task session. duration_s must lie within the
// template's (scaled) range. Deterministic in (profile, template, duration,
// seed, options).
SessionTrace generate_session(const UserProfile& profile, const TaskTemplate& tmpl,
                              double duration_s, uint64_t seed, const SessionGenOptions& opts);

}  // namespace ipd
