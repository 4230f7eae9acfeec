#pragma once

// Scenario configuration files.
//
//   # comment
//   [scenario-name]
//   key = value
//   list_key = 1, 5, 10
//
// Keys are typed by the schema of the command that reads the section; every
// error names the source and line.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wfc::config {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Entry {
    std::string value;
    int line;
};

class Section {
public:
    Section(std::string source, std::string name, int line);

    const std::string& name() const noexcept { return name_; }
    int line() const noexcept { return line_; }
    const std::map<std::string, Entry>& entries() const noexcept { return entries_; }

    void add(const std::string& key, Entry entry);
    bool has(const std::string& key) const { return entries_.count(key) != 0; }

    std::string get_string(const std::string& key) const;
    double get_double(const std::string& key) const;
    std::int64_t get_int(const std::string& key) const;
    bool get_bool(const std::string& key) const;
    std::vector<double> get_double_list(const std::string& key) const;
    std::vector<std::string> get_string_list(const std::string& key, char separator = ',') const;

    std::optional<double> find_double(const std::string& key) const;
    std::optional<std::int64_t> find_int(const std::string& key) const;
    std::optional<std::string> find_string(const std::string& key) const;

    /// Throws for keys outside `allowed`.
    void check_keys(const std::vector<std::string>& allowed, const std::string& command) const;

    /// "source:line: " prefix for messages about `key` (the section header
    /// line when the key is absent).
    std::string where(const std::string& key = "") const;
    [[noreturn]] void fail(const std::string& key, const std::string& message) const;

private:
    const Entry& require(const std::string& key) const;

    std::string source_;
    std::string name_;
    int line_;
    std::map<std::string, Entry> entries_;
};

std::vector<Section> parse(std::string_view text, const std::string& source);
std::vector<Section> parse_file(const std::string& path);

/// Strict numeric parse of a whole token.
std::optional<double> parse_double(std::string_view token);

}  // namespace wfc::config
