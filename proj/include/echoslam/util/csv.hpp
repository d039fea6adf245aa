#pragma once

#include <string>
#include <vector>

namespace echoslam::util {

// Writes one header line plus one line per row, cells formatted with %.10g.
// Integer-valued cells therefore print without a decimal point.
void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::vector<double>>& rows);

}  // namespace echoslam::util
