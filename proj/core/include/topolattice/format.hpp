#pragma once

#include <string>

namespace topolattice {

// Fixed text form for all CSV artifacts: 9 significant digits, '.' decimal
// separator, no locale dependence. Identical inputs always produce identical
// bytes.
std::string format_double(double value);

std::string format_int(long long value);

// Appends one CSV row (fields already formatted) terminated by '\n'.
void csv_row(std::string& out, const std::string* fields, int n_fields);

}  // namespace topolattice
