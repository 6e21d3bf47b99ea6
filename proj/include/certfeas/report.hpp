#pragma once
// Table regeneration, display rounding and the on-disk report bundle.
//
// Every table carries full-precision columns next to display columns. The
// display rules reproduce the reference tables cell for cell:
//   - Table 1 required discrimination: nearest 100.
//   - Table 2: d' to 2 decimals, Lambda to the nearest integer.
//   - Table 3: minimum base rate to 2 decimals; required discrimination to the
//     nearest 100 at or above 5,000, to the nearest integer below.
//   - Table 4: required discrimination to the nearest 100; the tension ratio
//     is the displayed requirement divided by the ceiling, then rounded to an
//     integer (so 23,300 / 50 shows as 466 although the exact ratio is 466.6).
//   - Figure 1: required discrimination to 3 significant figures, achieved
//     discrimination to 2.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace certfeas::report {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Column index by name; throws std::out_of_range.
  std::size_t column(const std::string& name) const;
};

// RFC 4180 CSV with LF line endings; cells containing commas or quotes are
// quoted.
std::string to_csv(const Table& t);

// Shortest round-trip decimal representation.
std::string full(double v);
std::string grouped(long long v);  // 10000 -> "10,000"
double round_to_step(double v, double step);
std::string display_step(double v, double step);  // grouped integer
std::string display_decimals(double v, int decimals);
std::string display_significant(double v, int digits);

// Required-discrimination display used by Tables 1 and 4.
double lambda_req_display_value(double lambda_req);
// Table 3 rule: nearest 100 at or above 5,000, nearest integer below.
double table3_display_value(double lambda_req);
// Table 4 rule for the tension ratio.
double psi_display_value(double lambda_req, double lambda_avail);

struct Range {
  double low;
  double high;
  double point;
};

// One asset-class calibration: the disclosure fields plus the stylized ranges
// shown in the cross-asset table.
struct Scenario {
  std::string name;
  double tau;
  Range pi;
  Range lambda_avail;
  std::optional<double> coverage_q;
  std::optional<double> ppv_obs;
  std::string certified_event;
  std::string horizon;
  std::string reference_class;
  std::string notes;
  // Verbatim cells for the cross-asset table.
  std::string pi_text;
  std::string lambda_req_text;
  std::string lambda_avail_text;
  std::string psi_text;
};

const std::vector<Scenario>& bundled_scenarios();

Table table1();
Table table2();
Table table3();
Table table4();
Table table5();
Table figure1();
// id in 1..5; throws DomainError otherwise.
Table table(int id);

nlohmann::json disclosure(const std::string& tool_version);

// Writes table1.csv..table5.csv, figure1.csv and disclosure.json. Returns the
// written paths in that order.
std::vector<std::filesystem::path> write_bundle(const std::filesystem::path& dir,
                                                const std::string& tool_version);

}  // namespace certfeas::report
