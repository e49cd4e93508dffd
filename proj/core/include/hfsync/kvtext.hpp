#pragma once

#include <map>
#include <optional>
#include <string>

namespace hfsync {

/// Flat `key=value` text, one entry per line. `#` starts a comment.
/// Used for grid sidecars, CLI config files and run manifests.
class KeyValueText {
 public:
  static KeyValueText parse(const std::string& text, const std::string& origin = "<string>");
  static KeyValueText read(const std::string& path);

  void write(const std::string& path) const;
  std::string str() const;

  void set(const std::string& key, const std::string& value) { entries_[key] = value; }
  void set(const std::string& key, double value);
  void set(const std::string& key, long long value);
  void set(const std::string& key, int value) { set(key, static_cast<long long>(value)); }
  void set(const std::string& key, bool value) { set(key, std::string(value ? "true" : "false")); }
  void set(const std::string& key, const char* value) { set(key, std::string(value)); }

  bool contains(const std::string& key) const { return entries_.count(key) != 0; }
  std::optional<std::string> get(const std::string& key) const;

  /// Typed lookups throw InvalidInput if the key is missing or malformed.
  std::string require(const std::string& key) const;
  double require_double(const std::string& key) const;
  long long require_int(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

/// Shortest round-trippable decimal representation of a double.
std::string format_double(double value);

}  // namespace hfsync
