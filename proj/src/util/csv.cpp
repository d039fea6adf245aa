#include "echoslam/util/csv.hpp"

#include <cstdio>
#include <fstream>

#include "echoslam/errors.hpp"

namespace echoslam::util {

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path + " for writing");
  out << header << "\n";
  char buf[64];
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.10g", row[i]);
      if (i) out << ",";
      out << buf;
    }
    out << "\n";
  }
  if (!out) throw DataError("failed writing " + path);
}

}  // namespace echoslam::util
