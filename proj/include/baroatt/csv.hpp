#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "baroatt/harness.hpp"
#include "baroatt/observability.hpp"

namespace baroatt {

inline constexpr const char* kRunCsvHeader =
    "t,h,hdot,h_hat,hdot_hat,z1,z2,z3,zhat1,zhat2,zhat3,roll,pitch,yaw,roll_hat,pitch_hat,yaw_hat,tilt_err,att_err";
inline constexpr const char* kSummaryCsvHeader = "t,tilt_q05,tilt_q50,tilt_q95,att_q05,att_q50,att_q95";
inline constexpr const char* kGramianCsvHeader = "t0,delta,min_eig,mu,uniformly_observable,intervals";

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

std::string run_csv_name(std::size_t index);

void write_run_csv(std::ostream& os, const RunResult& run);
void write_run_csv(const std::filesystem::path& path, const RunResult& run);
void write_summary_csv(std::ostream& os, const CampaignSummary& summary);
void write_summary_csv(const std::filesystem::path& path, const CampaignSummary& summary);
void write_gramian_csv(std::ostream& os, const std::vector<GramianReport>& reports);

/// Parses a numeric CSV with a header row. Throws std::runtime_error on
/// malformed rows.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const;
};
CsvTable read_csv(std::istream& is);

}  // namespace baroatt
