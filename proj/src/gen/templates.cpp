#include "gen/templates.hpp"

#include <stdexcept>

namespace ipd {

namespace {

// Event-mix shorthands over {CLICK, LONG_CLICK, SCROLL, TEXT_CHANGED, FOCUS, WINDOW_CHANGE}.
constexpr std::array<double, 6> kNav = {0.55, 0.05, 0.15, 0.00, 0.05, 0.20};
constexpr std::array<double, 6> kScrollRead = {0.15, 0.02, 0.70, 0.00, 0.03, 0.10};
constexpr std::array<double, 6> kTypeForm = {0.15, 0.02, 0.05, 0.60, 0.13, 0.05};
constexpr std::array<double, 6> kClickOps = {0.60, 0.15, 0.10, 0.00, 0.05, 0.10};
constexpr std::array<double, 6> kIdle = {0.20, 0.00, 0.40, 0.00, 0.10, 0.30};
constexpr std::array<double, 6> kSearch = {0.25, 0.02, 0.08, 0.50, 0.10, 0.05};
constexpr std::array<double, 6> kLike = {0.65, 0.05, 0.25, 0.00, 0.02, 0.03};

Phase nav(double frac) { return {frac, 1.0, 2.0, kNav, 0, 0, 0.5}; }
Phase read(double frac) { return {frac, 0.5, 1.2, kScrollRead, 0, 2e4, 0.3}; }
Phase scroll(double frac) { return {frac, 0.8, 2.0, kScrollRead, 0, 3e4, 0.4}; }
Phase form(double frac) { return {frac, 2.0, 4.0, kTypeForm, 0, 0, 0.9}; }
Phase compose(double frac) { return {frac, 2.5, 5.0, kTypeForm, 0, 0, 0.9}; }
Phase ops(double frac) { return {frac, 1.0, 2.5, kClickOps, 0, 0, 0.7}; }
Phase confirm(double frac) { return {frac, 0.8, 1.6, kNav, 0, 0, 0.5}; }
Phase idle(double frac, double down = 0.0) { return {frac, 0.05, 0.35, kIdle, 0, down, 0.1}; }
Phase watch(double frac) { return {frac, 0.1, 0.5, kIdle, 0, 2.5e5, 0.15}; }
Phase search(double frac) { return {frac, 1.5, 3.0, kSearch, 0, 1e4, 0.8}; }
Phase like(double frac) { return {frac, 1.0, 2.0, kLike, 0, 2e4, 0.5}; }
Phase upload(double frac, double up) { return {frac, 0.2, 0.6, kIdle, up, 0, 0.4}; }
Phase download(double frac, double down) { return {frac, 0.1, 0.4, kIdle, 0, down, 0.3}; }

TaskTemplate make(int id, App app, Subaction sub, double lo, double hi, std::vector<Phase> ph) {
  TaskTemplate t;
  t.task_id = id;
  t.platform = app;
  t.subaction = sub;
  t.dur_lo_s = lo;
  t.dur_hi_s = hi;
  t.phases = std::move(ph);
  double s = 0.0;
  for (auto& p : t.phases) s += p.frac;
  for (auto& p : t.phases) p.frac /= s;  // defensive normalization
  return t;
}

std::vector<TaskTemplate> build() {
  using S = Subaction;
  std::vector<TaskTemplate> v;
  v.reserve(kNumTasks);
  // Leakage: view content / view account
  v.push_back(make(1, App::Gmail, S::ViewEmails, 35, 70, {nav(0.15), read(0.70), confirm(0.15)}));
  v.push_back(make(2, App::Gmail, S::ViewAccountSettings, 30, 60, {nav(0.30), read(0.50), confirm(0.20)}));
  v.push_back(make(3, App::Spotify, S::ViewAccountSettings, 30, 60, {nav(0.30), read(0.50), confirm(0.20)}));
  v.push_back(make(4, App::Spotify, S::SubscriptionDetails, 30, 55, {nav(0.35), read(0.45), confirm(0.20)}));
  v.push_back(make(5, App::Amazon, S::InspectOrderHistory, 35, 70, {nav(0.20), scroll(0.65), confirm(0.15)}));
  v.push_back(make(6, App::Amazon, S::ViewBrowsingHistory, 35, 70, {nav(0.20), scroll(0.65), confirm(0.15)}));
  v.push_back(make(7, App::Amazon, S::ViewPaymentSettings, 30, 55, {nav(0.35), read(0.45), confirm(0.20)}));
  v.push_back(make(8, App::Instagram, S::SeePostHistory, 35, 70, {nav(0.15), scroll(0.70), confirm(0.15)}));
  v.push_back(make(9, App::Instagram, S::UploadPhoto, 40, 75, {nav(0.25), ops(0.30), upload(0.45, 4e5)}));
  v.push_back(make(10, App::Instagram, S::ViewAccountSettings, 30, 60, {nav(0.30), read(0.50), confirm(0.20)}));
  v.push_back(make(11, App::YouTube, S::WatchHistory, 35, 70, {nav(0.20), scroll(0.65), confirm(0.15)}));
  v.push_back(make(12, App::YouTube, S::UploadVideo, 45, 80, {nav(0.20), ops(0.25), upload(0.55, 8e5)}));
  v.push_back(make(13, App::YouTube, S::ViewAccountSettings, 30, 60, {nav(0.30), read(0.50), confirm(0.20)}));
  v.push_back(make(14, App::Slack, S::ViewMessages, 35, 70, {nav(0.15), read(0.70), confirm(0.15)}));
  v.push_back(make(15, App::Slack, S::InspectFiles, 35, 65, {nav(0.25), scroll(0.55), download(0.20, 2e5)}));
  v.push_back(make(16, App::Slack, S::ViewAccountSettings, 30, 60, {nav(0.30), read(0.50), confirm(0.20)}));
  // Modification: account settings / content / files
  v.push_back(make(17, App::Gmail, S::ChangeProfilePhoto, 35, 65, {nav(0.25), ops(0.35), upload(0.40, 2e5)}));
  v.push_back(make(18, App::Gmail, S::DeleteEmails, 30, 60, {nav(0.20), ops(0.60), confirm(0.20)}));
  v.push_back(make(19, App::Spotify, S::ChangeProfilePhoto, 35, 65, {nav(0.25), ops(0.35), upload(0.40, 2e5)}));
  v.push_back(make(20, App::Spotify, S::ChangeEmail, 35, 65, {nav(0.25), form(0.50), confirm(0.25)}));
  v.push_back(make(21, App::Spotify, S::ChangeUsername, 30, 60, {nav(0.25), form(0.50), confirm(0.25)}));
  v.push_back(make(22, App::Spotify, S::ModifyMusicList, 40, 75, {nav(0.20), ops(0.60), confirm(0.20)}));
  v.push_back(make(23, App::Amazon, S::ChangePassword, 35, 70, {nav(0.25), form(0.55), confirm(0.20)}));
  v.push_back(make(24, App::Amazon, S::ChangeAddress, 35, 70, {nav(0.25), form(0.55), confirm(0.20)}));
  v.push_back(make(25, App::Instagram, S::ChangeUsername, 30, 60, {nav(0.25), form(0.50), confirm(0.25)}));
  v.push_back(make(26, App::Instagram, S::ChangeProfilePhoto, 35, 65, {nav(0.25), ops(0.35), upload(0.40, 2e5)}));
  v.push_back(make(27, App::YouTube, S::ChangePassword, 35, 70, {nav(0.25), form(0.55), confirm(0.20)}));
  v.push_back(make(28, App::Slack, S::AddFile, 35, 65, {nav(0.25), ops(0.30), upload(0.45, 5e5)}));
  v.push_back(make(29, App::Slack, S::ModifyFile, 35, 65, {nav(0.25), ops(0.45), form(0.30)}));
  v.push_back(make(30, App::Slack, S::DeleteFile, 30, 55, {nav(0.30), ops(0.50), confirm(0.20)}));
  v.push_back(make(31, App::Slack, S::ChangePassword, 35, 70, {nav(0.25), form(0.55), confirm(0.20)}));
  // Impersonation: send content
  v.push_back(make(32, App::Gmail, S::SendEmails, 40, 75, {nav(0.15), compose(0.65), confirm(0.20)}));
  v.push_back(make(33, App::Amazon, S::SendReviews, 40, 75, {nav(0.20), compose(0.60), confirm(0.20)}));
  v.push_back(make(34, App::Instagram, S::SendMessages, 35, 70, {nav(0.15), compose(0.65), confirm(0.20)}));
  v.push_back(make(35, App::YouTube, S::Comment, 35, 70, {nav(0.20), compose(0.60), confirm(0.20)}));
  v.push_back(make(36, App::Slack, S::SendMessages, 30, 65, {nav(0.10), compose(0.70), confirm(0.20)}));
  // Software installation (Files app -> OTHER platform)
  v.push_back(make(37, App::Other, S::SoftwareInstallation, 40, 80,
                   {nav(0.25), download(0.40, 1.2e6), ops(0.35)}));
  // NIO
  v.push_back(make(38, App::Spotify, S::Nio, 60, 120, {nav(0.10), idle(0.90, 1.5e5)}));
  v.push_back(make(39, App::Amazon, S::Nio, 45, 90, {search(0.35), scroll(0.65)}));
  v.push_back(make(40, App::Amazon, S::Nio, 50, 100, {nav(0.10), read(0.75), idle(0.15)}));
  v.push_back(make(41, App::Instagram, S::Nio, 50, 110, {scroll(0.80), idle(0.20)}));
  v.push_back(make(42, App::Instagram, S::Nio, 45, 90, {like(0.75), idle(0.25)}));
  v.push_back(make(43, App::YouTube, S::Nio, 45, 90, {search(0.40), scroll(0.60)}));
  v.push_back(make(44, App::YouTube, S::Nio, 60, 120, {nav(0.10), watch(0.90)}));
  return v;
}

}  // namespace

const std::vector<TaskTemplate>& task_templates() {
  static const std::vector<TaskTemplate> v = build();
  return v;
}

const TaskTemplate& task_template(int task_id) {
  if (task_id < 1 || task_id > kNumTasks) {
    throw std::invalid_argument("task_template: task_id out of range 1..44");
  }
  return task_templates()[static_cast<size_t>(task_id - 1)];
}

}  // namespace ipd
