#include "baroatt/csv.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace baroatt {

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return os;
}

void write_fields(std::ostream& os, std::initializer_list<double> fields) {
  bool first = true;
  for (double v : fields) {
    if (!first) os << ',';
    os << format_double(v);
    first = false;
  }
  os << '\n';
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::string run_csv_name(std::size_t index) {
  char name[32];
  std::snprintf(name, sizeof(name), "run_%03zu.csv", index);
  return name;
}

void write_run_csv(std::ostream& os, const RunResult& run) {
  os << kRunCsvHeader << '\n';
  for (const TickRecord& r : run.ticks) {
    write_fields(os, {r.t, r.h, r.hdot, r.h_hat, r.hdot_hat, r.z.x(), r.z.y(), r.z.z(), r.zhat.x(), r.zhat.y(),
                      r.zhat.z(), r.euler.roll, r.euler.pitch, r.euler.yaw, r.euler_hat.roll, r.euler_hat.pitch,
                      r.euler_hat.yaw, r.tilt_err, r.att_err});
  }
}

void write_run_csv(const std::filesystem::path& path, const RunResult& run) {
  std::ofstream os = open_for_write(path);
  write_run_csv(os, run);
}

void write_summary_csv(std::ostream& os, const CampaignSummary& s) {
  os << kSummaryCsvHeader << '\n';
  for (std::size_t k = 0; k < s.t.size(); ++k) {
    write_fields(os, {s.t[k], s.tilt_q05[k], s.tilt_q50[k], s.tilt_q95[k], s.att_q05[k], s.att_q50[k], s.att_q95[k]});
  }
}

void write_summary_csv(const std::filesystem::path& path, const CampaignSummary& summary) {
  std::ofstream os = open_for_write(path);
  write_summary_csv(os, summary);
}

void write_gramian_csv(std::ostream& os, const std::vector<GramianReport>& reports) {
  os << kGramianCsvHeader << '\n';
  for (const GramianReport& r : reports) {
    write_fields(os, {r.t0, r.delta, r.min_eig, r.mu_threshold, r.uniformly_observable_on_window ? 1.0 : 0.0,
                      static_cast<double>(r.intervals)});
  }
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw std::out_of_range("CSV has no column '" + name + "'");
}

CsvTable read_csv(std::istream& is) {
  CsvTable table;
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("CSV is empty");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) table.header.push_back(cell);
  }
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      double v = 0.0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
        throw std::runtime_error("CSV line " + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
      row.push_back(v);
    }
    if (row.size() != table.header.size()) {
      throw std::runtime_error("CSV line " + std::to_string(lineno) + ": wrong field count");
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace baroatt
