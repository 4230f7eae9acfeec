#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace wfc::csv {

/// Shortest text that reads back as a number equal to x to 15 significant
/// digits; "inf"/"-inf" for infinities and an empty field for NaN.
std::string format_number(double x);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string str() const;
};

/// Writes through a temporary file in the same directory and renames it into
/// place, so readers never see a partial file.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace wfc::csv
