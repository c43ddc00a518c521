#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "satoff/scenario.hpp"

namespace satoff {

// Shortest decimal that round-trips through strtod; "inf"/"-inf"/"nan" for
// the specials. Keeps CSV cells byte-stable across reruns.
std::string format_double(double x);

std::string format_u64_hex(std::uint64_t x);  // zero-padded, 0x prefix

// Comma-separated writer with '#' comment lines. Cells must not contain
// commas, newlines, or '#' at the start; nothing here quotes or escapes.
// The stream is opened in binary mode so output bytes are platform-stable.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);  // throws on open failure
  void comment(const std::string& line);
  void row(const std::vector<std::string>& cells);

 private:
  std::ofstream out_;
};

// Standard provenance block: artifact version, scenario identity, seeds, and
// the command line that produced the file.
void write_provenance(CsvWriter& w, const ScenarioConfig& cfg, const std::string& seeds,
                      const std::string& command);

}  // namespace satoff
