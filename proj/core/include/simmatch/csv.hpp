#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace simmatch::csv {

// Every float written by this library goes through here: 12 significant
// digits, "inf"/"-inf"/"nan" for non-finite values.
std::string format(double value);

std::string join(const std::vector<std::string>& fields);

// Splits one line on commas. No quoting: the files we write never need it.
std::vector<std::string> split(std::string_view line);

double parse_double(std::string_view field);

}  // namespace simmatch::csv
