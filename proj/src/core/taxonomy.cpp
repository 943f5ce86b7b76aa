#include "core/taxonomy.hpp"

#include <stdexcept>
#include <unordered_map>

namespace ipd {

namespace {

constexpr std::array<std::string_view, kNumCategories> kCategoryNames = {
    "Impersonation", "Leakage", "Modification", "Software installation", "NIO"};

constexpr std::array<std::string_view, kNumActions> kActionNames = {
    "Send content",   "View account",   "View content",
    "Upload content", "Alter account settings", "Modify content",
    "Alter files",    "Software installation",  "NIO"};

constexpr std::array<std::string_view, kNumSubactions> kSubactionNames = {
    "Send reviews",
    "Send messages",
    "Send emails",
    "Comment",
    "View account settings",
    "Subscription details",
    "Inspect order history",
    "View browsing history",
    "View payment settings",
    "View emails",
    "See one's post history",
    "Watch history",
    "View messages",
    "Inspect files",
    "Upload photo",
    "Upload video",
    "Change profile photo",
    "Change email",
    "Change username",
    "Change password",
    "Change address",
    "Delete emails",
    "Modify music list",
    "Add a file",
    "Delete a file",
    "Modify a file",
    "Software installation",
    "NIO"};

constexpr std::array<Action, kNumSubactions> kSubactionParent = {
    Action::SendContent,          // Send reviews
    Action::SendContent,          // Send messages
    Action::SendContent,          // Send emails
    Action::SendContent,          // Comment
    Action::ViewAccount,          // View account settings
    Action::ViewAccount,          // Subscription details
    Action::ViewAccount,          // Inspect order history
    Action::ViewAccount,          // View browsing history
    Action::ViewAccount,          // View payment settings
    Action::ViewContent,          // View emails
    Action::ViewContent,          // See one's post history
    Action::ViewContent,          // Watch history
    Action::ViewContent,          // View messages
    Action::ViewContent,          // Inspect files
    Action::UploadContent,        // Upload photo
    Action::UploadContent,        // Upload video
    Action::AlterAccountSettings, // Change profile photo
    Action::AlterAccountSettings, // Change email
    Action::AlterAccountSettings, // Change username
    Action::AlterAccountSettings, // Change password
    Action::AlterAccountSettings, // Change address
    Action::ModifyContent,        // Delete emails
    Action::ModifyContent,        // Modify music list
    Action::AlterFiles,           // Add a file
    Action::AlterFiles,           // Delete a file
    Action::AlterFiles,           // Modify a file
    Action::SoftwareInstallation, // Software installation
    Action::Nio,                  // NIO
};

constexpr std::array<Category, kNumActions> kActionParent = {
    Category::Impersonation,        // Send content
    Category::Leakage,              // View account
    Category::Leakage,              // View content
    Category::Leakage,              // Upload content
    Category::Modification,         // Alter account settings
    Category::Modification,         // Modify content
    Category::Modification,         // Alter files
    Category::SoftwareInstallation, // Software installation
    Category::Nio,                  // NIO
};

template <typename E, size_t N>
E from_name(const std::array<std::string_view, N>& names, std::string_view n,
            const char* kind) {
  for (size_t i = 0; i < N; ++i)
    if (names[i] == n) return static_cast<E>(i);
  throw std::invalid_argument(std::string("unknown ") + kind + " name: " + std::string(n));
}

}  // namespace

Action action_of(Subaction s) { return kSubactionParent[static_cast<size_t>(s)]; }
Category category_of(Action a) { return kActionParent[static_cast<size_t>(a)]; }

TaxonomyLabel label_of(Subaction s) {
  const Action a = action_of(s);
  return TaxonomyLabel{s, a, category_of(a)};
}

std::string_view name(Category c) { return kCategoryNames[static_cast<size_t>(c)]; }
std::string_view name(Action a) { return kActionNames[static_cast<size_t>(a)]; }
std::string_view name(Subaction s) { return kSubactionNames[static_cast<size_t>(s)]; }

Subaction subaction_from_name(std::string_view n) {
  return from_name<Subaction>(kSubactionNames, n, "subaction");
}
Action action_from_name(std::string_view n) {
  return from_name<Action>(kActionNames, n, "action");
}
Category category_from_name(std::string_view n) {
  return from_name<Category>(kCategoryNames, n, "category");
}

std::pair<std::string, std::string> taxonomy_lookup(std::string_view subaction_name) {
  const Subaction s = subaction_from_name(subaction_name);
  const Action a = action_of(s);
  return {std::string(name(a)), std::string(name(category_of(a)))};
}

int class_count(Granularity g) {
  switch (g) {
    case Granularity::Category: return kNumCategories;
    case Granularity::Action: return kNumActions;
    case Granularity::Subaction: return kNumSubactions;
  }
  throw std::logic_error("bad granularity");
}

int class_index(const TaxonomyLabel& l, Granularity g) {
  switch (g) {
    case Granularity::Category: return static_cast<int>(l.category);
    case Granularity::Action: return static_cast<int>(l.action);
    case Granularity::Subaction: return static_cast<int>(l.subaction);
  }
  throw std::logic_error("bad granularity");
}

int nio_class_index(Granularity g) {
  switch (g) {
    case Granularity::Category: return static_cast<int>(Category::Nio);
    case Granularity::Action: return static_cast<int>(Action::Nio);
    case Granularity::Subaction: return static_cast<int>(Subaction::Nio);
  }
  throw std::logic_error("bad granularity");
}

std::string_view class_name(Granularity g, int index) {
  switch (g) {
    case Granularity::Category: return name(static_cast<Category>(index));
    case Granularity::Action: return name(static_cast<Action>(index));
    case Granularity::Subaction: return name(static_cast<Subaction>(index));
  }
  throw std::logic_error("bad granularity");
}

}  // namespace ipd
