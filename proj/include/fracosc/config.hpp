#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracosc/expr.hpp"

namespace fracosc {

/// Malformed config text or a missing/invalid key. CLI exit code 1.
class ConfigError : public std::runtime_error {
public:
  ConfigError(const std::string& what, std::size_t line) : std::runtime_error(what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// Flat key = value config. `[name]` starts a section whose keys read as name.key;
/// `#` starts a comment. Grammar in docs/config-format.md.
class RunConfig {
public:
  static RunConfig parse(const std::string& text);
  static RunConfig load(const std::string& path);

  bool empty() const { return entries_.empty(); }
  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  std::size_t line_of(const std::string& key) const;

  std::string get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;
  double number(const std::string& key) const;
  double number_or(const std::string& key, double fallback) const;
  int integer_or(const std::string& key, int fallback) const;
  /// Parse errors are re-thrown as SyntaxError with the config line and the column in the file.
  Expr expr(const std::string& key) const;

  /// alpha in (0, 1], n >= 1, k >= 1 (k defaults to 1).
  double alpha() const;
  int n() const;
  int k() const;

  /// FNV-1a 64 of the raw text.
  std::uint64_t hash() const { return hash_; }
  std::string hash_hex() const;

private:
  struct Entry {
    std::string value;
    std::size_t line = 0;
    std::size_t value_column = 0;
  };
  std::map<std::string, Entry> entries_;
  std::uint64_t hash_ = 0;
};

std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace fracosc
