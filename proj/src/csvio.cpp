#include "satoff/csvio.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

#include "satoff/version.hpp"

namespace satoff {

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string format_u64_hex(std::uint64_t x) {
  char buf[16];
  for (int i = 15; i >= 0; --i) {
    buf[i] = "0123456789abcdef"[x & 0xf];
    x >>= 4;
  }
  return "0x" + std::string(buf, 16);
}

CsvWriter::CsvWriter(const std::string& path) : out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw std::runtime_error("csv: cannot open " + path);
}

void CsvWriter::comment(const std::string& line) { out_ << "# " << line << "\n"; }

void CsvWriter::row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    out_ << cells[i];
  }
  out_ << "\n";
}

void write_provenance(CsvWriter& w, const ScenarioConfig& cfg, const std::string& seeds,
                      const std::string& command) {
  w.comment(std::string("artifact_version: ") + kArtifactVersion);
  w.comment("scenario: " + cfg.name);
  w.comment("scenario_hash: " + format_u64_hex(scenario_hash(cfg)));
  w.comment("seeds: " + seeds);
  w.comment("command: " + command);
}

}  // namespace satoff
