#include "hfsync/kvtext.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hfsync/csv.hpp"
#include "hfsync/error.hpp"

namespace hfsync {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

KeyValueText KeyValueText::parse(const std::string& text, const std::string& origin) {
  KeyValueText kv;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(origin, line_no, "expected key=value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ParseError(origin, line_no, "empty key");
    kv.entries_[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

KeyValueText KeyValueText::read(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

std::string KeyValueText::str() const {
  std::string out;
  for (const auto& [k, v] : entries_) out += k + "=" + v + "\n";
  return out;
}

void KeyValueText::write(const std::string& path) const { csv::write_text(path, str()); }

void KeyValueText::set(const std::string& key, double value) { entries_[key] = format_double(value); }

void KeyValueText::set(const std::string& key, long long value) { entries_[key] = std::to_string(value); }

std::optional<std::string> KeyValueText::get(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::string KeyValueText::require(const std::string& key) const {
  auto v = get(key);
  if (!v) throw InvalidInput("missing key '" + key + "'");
  return *v;
}

double KeyValueText::require_double(const std::string& key) const {
  const std::string v = require(key);
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw InvalidInput("key '" + key + "' is not a number: " + v);
  }
}

long long KeyValueText::require_int(const std::string& key) const {
  const std::string v = require(key);
  long long out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw InvalidInput("key '" + key + "' is not an integer: " + v);
  return out;
}

}  // namespace hfsync
