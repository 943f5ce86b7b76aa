#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace ipd {

// FNV-1a 64-bit; used for artifact fingerprints and seed derivation.
uint64_t fnv1a64(const void* data, size_t len, uint64_t h = 14695981039346656037ull);
uint64_t fnv1a64(std::string_view s);
uint64_t hash_file(const std::string& path);  // throws if unreadable
std::string hex64(uint64_t h);

// Deterministic sub-seed derivation: mixes tag strings/ints into a base seed
// so parallel generation order never affects output.
uint64_t derive_seed(uint64_t base, std::string_view tag);
uint64_t derive_seed(uint64_t base, std::string_view tag, uint64_t n);

// Flat "key = value" config file ('#' comments, blank lines ignored).
class KeyValueConfig {
 public:
  KeyValueConfig() = default;
  static KeyValueConfig load(const std::string& path);  // throws on parse error
  void set(const std::string& key, const std::string& value);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key) const;                      // throws if absent
  std::string get_string(const std::string& key, const std::string& def) const;
  double get_double(const std::string& key, double def) const;
  int64_t get_int(const std::string& key, int64_t def) const;
  bool get_bool(const std::string& key, bool def) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

}  // namespace ipd
