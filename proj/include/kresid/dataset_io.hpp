#pragma once

#include "kresid/crossfit.hpp"

#include <iosfwd>
#include <string>

namespace kresid {

// Columnar text format: a header naming columns x_1.., w_1.., y_1.. followed by
// one comma-separated row per observation. Decimal point is always '.'.
// Without w columns, W is taken to be X.
void write_dataset(std::ostream& os, const Dataset& data);
Dataset read_dataset(std::istream& is);

void write_dataset_file(const std::string& path, const Dataset& data);
Dataset read_dataset_file(const std::string& path);

// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);
// Whole-string parse; throws on trailing garbage.
double parse_double(const std::string& text);

}  // namespace kresid
