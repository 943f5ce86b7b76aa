#pragma once

#include <array>
#include <vector>

#include "core/sample.hpp"
#include "core/taxonomy.hpp"

namespace ipd {

// One phase of a task: a slice of the session with its own interaction-rate
// range, event-type mix, network coupling and motion/CPU activity level.
struct Phase {
  double frac = 1.0;           // fraction of session duration
  double rate_lo = 0.5;        // interaction events/s, sampled per phase
  double rate_hi = 1.5;
  std::array<double, 6> mix{}; // weights over {CLICK, LONG_CLICK, SCROLL, TEXT_CHANGED, FOCUS, WINDOW_CHANGE}
  double up_bw = 0.0;          // extra upstream B/s during the phase
  double down_bw = 0.0;        // extra downstream B/s during the phase
  double activity = 0.3;       // 0..1, scales motion noise / current / temperature
};

struct TaskTemplate {
  int task_id = 0;             // 1..44
  App platform = App::Other;
  Subaction subaction = Subaction::Nio;
  double dur_lo_s = 30.0;
  double dur_hi_s = 70.0;
  std::vector<Phase> phases;   // fracs sum to 1

  TaxonomyLabel label() const { return label_of(subaction); }
};

// The full 44-task protocol; index i holds task_id i+1. NIO tasks are 38..44.
const std::vector<TaskTemplate>& task_templates();
const TaskTemplate& task_template(int task_id);  // throws if not in 1..44
inline constexpr int kNumTasks = 44;
inline constexpr int kFirstNioTask = 38;

}  // namespace ipd
