#include "core/sample.hpp"

#include <stdexcept>

namespace ipd {

namespace {
constexpr std::array<std::string_view, kNumApps> kAppNames = {
    "Amazon", "Gmail", "Instagram", "Slack", "Spotify", "YouTube", "OTHER"};
constexpr std::array<std::string_view, kNumIntEvents> kEventNames = {
    "CLICK", "LONG_CLICK", "SCROLL", "TEXT_CHANGED", "FOCUS", "WINDOW_CHANGE", "NONE"};
}  // namespace

std::string_view name(App a) { return kAppNames[static_cast<size_t>(a)]; }
std::string_view name(IntEvent e) { return kEventNames[static_cast<size_t>(e)]; }

App app_from_name(std::string_view n) {
  for (size_t i = 0; i < kAppNames.size(); ++i)
    if (kAppNames[i] == n) return static_cast<App>(i);
  throw std::invalid_argument("unknown app name: " + std::string(n));
}

IntEvent int_event_from_name(std::string_view n) {
  for (size_t i = 0; i < kEventNames.size(); ++i)
    if (kEventNames[i] == n) return static_cast<IntEvent>(i);
  throw std::invalid_argument("unknown interaction event name: " + std::string(n));
}

}  // namespace ipd
