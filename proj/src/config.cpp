#include "fracosc/config.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fracosc/errors.hpp"

namespace fracosc {

namespace {

std::size_t skip_space(const std::string& s, std::size_t i) {
  while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  return i;
}

std::string rtrim(std::string s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  return s;
}

bool valid_key(const std::string& k) {
  if (k.empty()) return false;
  for (char c : k)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-')) return false;
  return true;
}

}  // namespace

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

RunConfig RunConfig::parse(const std::string& text) {
  RunConfig cfg;
  cfg.hash_ = fnv1a64(text);
  std::istringstream in(text);
  std::string raw, section;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    const std::size_t hash = raw.find('#');
    const std::string body = rtrim(hash == std::string::npos ? raw : raw.substr(0, hash));
    const std::size_t b = skip_space(body, 0);
    if (b == body.size()) continue;
    if (body[b] == '[') {
      if (body.back() != ']') throw ConfigError("line " + std::to_string(line) + ": unterminated section header", line);
      section = rtrim(body.substr(b + 1, body.size() - b - 2));
      section.erase(0, skip_space(section, 0));
      if (!section.empty() && !valid_key(section))
        throw ConfigError("line " + std::to_string(line) + ": bad section name '" + section + "'", line);
      continue;
    }
    const std::size_t eq = body.find('=', b);
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line) + ": expected key = value", line);
    const std::string key = rtrim(body.substr(b, eq - b));
    if (!valid_key(key)) throw ConfigError("line " + std::to_string(line) + ": bad key '" + key + "'", line);
    const std::size_t v = skip_space(body, eq + 1);
    const std::string full = section.empty() ? key : section + "." + key;
    if (cfg.entries_.count(full)) throw ConfigError("line " + std::to_string(line) + ": duplicate key '" + full + "'", line);
    cfg.entries_[full] = Entry{body.substr(v), line, v + 1};
  }
  return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open config '" + path + "'", 0);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

std::size_t RunConfig::line_of(const std::string& key) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? 0 : it->second.line;
}

std::string RunConfig::get(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError("missing config key '" + key + "'", 0);
  return it->second.value;
}

std::string RunConfig::get_or(const std::string& key, const std::string& fallback) const {
  return has(key) ? get(key) : fallback;
}

double RunConfig::number(const std::string& key) const {
  const std::string v = get(key);
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError("line " + std::to_string(line_of(key)) + ": '" + key + "' is not a number", line_of(key));
  return out;
}

double RunConfig::number_or(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

int RunConfig::integer_or(const std::string& key, int fallback) const {
  if (!has(key)) return fallback;
  const std::string v = get(key);
  int out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError("line " + std::to_string(line_of(key)) + ": '" + key + "' is not an integer", line_of(key));
  return out;
}

Expr RunConfig::expr(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError("missing config key '" + key + "'", 0);
  try {
    return Expr::parse(it->second.value);
  } catch (const SyntaxError& e) {
    const std::size_t col = it->second.value_column + e.column() - 1;
    // Drop the position relative to the value; report it relative to the file.
    std::string msg = e.what();
    if (const std::size_t c = msg.find(": "); c != std::string::npos) msg = msg.substr(c + 2);
    throw SyntaxError("line " + std::to_string(it->second.line) + ", column " + std::to_string(col) + " ('" + key +
                          "'): " + msg,
                      it->second.line, col, e.expected());
  }
}

double RunConfig::alpha() const {
  const double a = number("alpha");
  if (!(a > 0.0 && a <= 1.0)) throw ConfigError("alpha must lie in (0, 1]", line_of("alpha"));
  return a;
}

int RunConfig::n() const {
  const int v = integer_or("n", 0);
  if (v < 1) throw ConfigError("n must be a positive integer", line_of("n"));
  return v;
}

int RunConfig::k() const {
  const int v = integer_or("k", 1);
  if (v < 1) throw ConfigError("k must be a positive integer", line_of("k"));
  return v;
}

std::string RunConfig::hash_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash_));
  return buf;
}

}  // namespace fracosc
