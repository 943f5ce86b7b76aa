#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace ipd {

// Three-level intent label system: 28 subactions -> 9 actions -> 5 categories.
// NIO (Non-IPI-Other) is the risk-neutral class and exists at every level.

enum class Category : uint8_t {
  Impersonation = 0,
  Leakage,
  Modification,
  SoftwareInstallation,
  Nio,
};
inline constexpr int kNumCategories = 5;

enum class Action : uint8_t {
  SendContent = 0,
  ViewAccount,
  ViewContent,
  UploadContent,
  AlterAccountSettings,
  ModifyContent,
  AlterFiles,
  SoftwareInstallation,
  Nio,
};
inline constexpr int kNumActions = 9;

enum class Subaction : uint8_t {
  SendReviews = 0,
  SendMessages,
  SendEmails,
  Comment,
  ViewAccountSettings,
  SubscriptionDetails,
  InspectOrderHistory,
  ViewBrowsingHistory,
  ViewPaymentSettings,
  ViewEmails,
  SeePostHistory,
  WatchHistory,
  ViewMessages,
  InspectFiles,
  UploadPhoto,
  UploadVideo,
  ChangeProfilePhoto,
  ChangeEmail,
  ChangeUsername,
  ChangePassword,
  ChangeAddress,
  DeleteEmails,
  ModifyMusicList,
  AddFile,
  DeleteFile,
  ModifyFile,
  SoftwareInstallation,
  Nio,
};
inline constexpr int kNumSubactions = 28;

struct TaxonomyLabel {
  Subaction subaction = Subaction::Nio;
  Action action = Action::Nio;
  Category category = Category::Nio;

  bool operator==(const TaxonomyLabel&) const = default;
  bool is_nio() const { return subaction == Subaction::Nio; }
};

Action action_of(Subaction s);
Category category_of(Action a);
TaxonomyLabel label_of(Subaction s);

std::string_view name(Category c);
std::string_view name(Action a);
std::string_view name(Subaction s);

// Throw std::invalid_argument on unknown names.
Subaction subaction_from_name(std::string_view n);
Action action_from_name(std::string_view n);
Category category_from_name(std::string_view n);

// Subaction name -> (action name, category name); throws on unknown subaction.
std::pair<std::string, std::string> taxonomy_lookup(std::string_view subaction_name);

enum class Granularity : uint8_t { Category = 0, Action, Subaction };

int class_count(Granularity g);
int class_index(const TaxonomyLabel& l, Granularity g);
int nio_class_index(Granularity g);
std::string_view class_name(Granularity g, int index);

}  // namespace ipd
