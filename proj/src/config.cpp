#include "wfc/config.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace wfc::config {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

bool valid_name(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
    });
}

}  // namespace

std::optional<double> parse_double(std::string_view token) {
    const std::string s = trim(token);
    if (s.empty()) return std::nullopt;
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE || std::isnan(v)) return std::nullopt;
    return v;
}

Section::Section(std::string source, std::string name, int line)
    : source_(std::move(source)), name_(std::move(name)), line_(line) {}

void Section::add(const std::string& key, Entry entry) {
    if (has(key)) {
        throw ConfigError(source_ + ":" + std::to_string(entry.line) + ": duplicate key '" + key + "' (first set on line " +
                          std::to_string(entries_.at(key).line) + ")");
    }
    entries_.emplace(key, std::move(entry));
}

std::string Section::where(const std::string& key) const {
    const auto it = entries_.find(key);
    const int line = it == entries_.end() ? line_ : it->second.line;
    return source_ + ":" + std::to_string(line) + ": ";
}

void Section::fail(const std::string& key, const std::string& message) const {
    throw ConfigError(where(key) + "[" + name_ + "] " + message);
}

const Entry& Section::require(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) fail(key, "missing required key '" + key + "'");
    return it->second;
}

std::string Section::get_string(const std::string& key) const { return require(key).value; }

double Section::get_double(const std::string& key) const {
    const auto v = parse_double(require(key).value);
    if (!v) fail(key, "'" + key + "' must be a number, got '" + require(key).value + "'");
    return *v;
}

std::int64_t Section::get_int(const std::string& key) const {
    const double v = get_double(key);
    if (v != std::floor(v) || std::abs(v) > 9.0e15) fail(key, "'" + key + "' must be an integer");
    return static_cast<std::int64_t>(v);
}

bool Section::get_bool(const std::string& key) const {
    const std::string v = require(key).value;
    if (v == "true") return true;
    if (v == "false") return false;
    fail(key, "'" + key + "' must be true or false, got '" + v + "'");
}

std::vector<std::string> Section::get_string_list(const std::string& key, char separator) const {
    std::vector<std::string> out;
    std::stringstream ss(require(key).value);
    std::string item;
    while (std::getline(ss, item, separator)) {
        item = trim(item);
        if (item.empty()) fail(key, "'" + key + "' has an empty list item");
        out.push_back(item);
    }
    if (out.empty()) fail(key, "'" + key + "' is empty");
    return out;
}

std::vector<double> Section::get_double_list(const std::string& key) const {
    std::vector<double> out;
    for (const auto& item : get_string_list(key)) {
        const auto v = parse_double(item);
        if (!v) fail(key, "'" + key + "' item '" + item + "' is not a number");
        out.push_back(*v);
    }
    return out;
}

std::optional<double> Section::find_double(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return get_double(key);
}

std::optional<std::int64_t> Section::find_int(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return get_int(key);
}

std::optional<std::string> Section::find_string(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return get_string(key);
}

void Section::check_keys(const std::vector<std::string>& allowed, const std::string& command) const {
    for (const auto& [key, entry] : entries_) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            fail(key, "key '" + key + "' is not valid for " + command);
        }
    }
}

std::vector<Section> parse(std::string_view text, const std::string& source) {
    std::vector<Section> sections;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string content = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (content.empty()) continue;
        const std::string at = source + ":" + std::to_string(line) + ": ";
        if (content.front() == '[') {
            if (content.back() != ']') throw ConfigError(at + "unterminated section header");
            const std::string name = trim(content.substr(1, content.size() - 2));
            if (!valid_name(name)) throw ConfigError(at + "invalid section name '" + name + "'");
            for (const auto& s : sections) {
                if (s.name() == name) {
                    throw ConfigError(at + "duplicate section [" + name + "] (first on line " +
                                      std::to_string(s.line()) + ")");
                }
            }
            sections.emplace_back(source, name, line);
            continue;
        }
        const auto eq = content.find('=');
        if (eq == std::string::npos) throw ConfigError(at + "expected 'key = value'");
        const std::string key = trim(content.substr(0, eq));
        const std::string value = trim(content.substr(eq + 1));
        if (!valid_name(key)) throw ConfigError(at + "invalid key '" + key + "'");
        if (value.empty()) throw ConfigError(at + "key '" + key + "' has no value");
        if (sections.empty()) throw ConfigError(at + "key '" + key + "' appears before any [section]");
        sections.back().add(key, {value, line});
    }
    if (sections.empty()) throw ConfigError(source + ": no [section] found");
    return sections;
}

std::vector<Section> parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path + ": cannot open");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

}  // namespace wfc::config
