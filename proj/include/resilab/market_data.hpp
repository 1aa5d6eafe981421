#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "resilab/dates.hpp"

namespace resilab::data {

struct ReturnObservation {
  Date date;
  std::string firm_id;
  double excess_return = 0.0;
  double raw_return = 0.0;
  double market_cap = 0.0;   // USD millions, strictly positive
  std::string naics;         // 2-6 digits

  bool operator==(const ReturnObservation&) const = default;
};

struct FactorObservation {
  Date date;
  double mktrf = 0.0;
  double smb = 0.0;
  double hml = 0.0;
  double rmw = 0.0;
  double cma = 0.0;
  double mom = 0.0;
  double rf = 0.0;
};

class FactorSeries {
 public:
  FactorSeries() = default;
  // Validates all values finite and dates strictly increasing.
  static FactorSeries from_rows(std::vector<FactorObservation> rows);

  const std::vector<FactorObservation>& rows() const { return rows_; }
  const FactorObservation* find(Date d) const;
  // Throws MissingFactorDate.
  const FactorObservation& at(Date d) const;
  bool covers(Date start, Date end) const;
  std::size_t size() const { return rows_.size(); }

 private:
  std::vector<FactorObservation> rows_;
};

enum class Family { KP, DN, HLR };
enum class Direction { LowResIfHigh, HighResIfHigh };

const char* family_name(Family f);
const char* direction_name(Direction d);
Family parse_family(const std::string& s);
Direction parse_direction(const std::string& s);

struct ResilienceMeasure {
  Family family = Family::KP;
  std::string name;
  int naics_level = 3;
  Direction direction = Direction::LowResIfHigh;
  std::map<std::string, double> entries;  // naics code -> value

  // Enforces family/level consistency, per-name direction conventions,
  // and entry-key digit counts. Throws InvalidSpec.
  void validate() const;
};

struct AttentionSeries {
  std::vector<std::pair<Date, double>> points;  // sorted by date, unique
};

struct ReturnPanel {
  std::vector<ReturnObservation> rows;   // sorted by (firm_id, date)
  std::vector<std::string> diagnostics;  // row-numbered ingestion notes

  bool operator==(const ReturnPanel& o) const { return rows == o.rows; }
};

struct MatchCoverage {
  std::size_t firms_in = 0;
  std::size_t firms_kept = 0;
  std::size_t industries_matched = 0;
};

struct MatchedPanel {
  ReturnPanel panel;  // rows of kept firms only, values untouched
  std::unordered_map<std::string, double> firm_value;
  Direction direction = Direction::LowResIfHigh;
  std::string measure_name;
  int naics_level = 3;
  MatchCoverage coverage;
};

// returns.csv: date,firm_id,ret,mktcap,naics. Malformed rows are skipped and
// reported in panel.diagnostics with their line numbers; duplicate
// (date, firm) pairs are a hard error.
ReturnPanel ingest_returns(const std::string& path, const FactorSeries& rf_source);

// Writes the panel back in the returns.csv schema at full precision, so
// ingest(serialize(ingest(f))) == ingest(f).
void serialize_returns(const ReturnPanel& panel, const std::string& path);

// Keeps firm-dates with market_cap >= min_cap (USD millions).
ReturnPanel apply_universe_filter(const ReturnPanel& panel, double min_cap = 10.0);

// Assigns each firm the measure value of its NAICS prefix truncated to
// measure.naics_level; firms with no matching entry are dropped. Throws
// NaicsTooShort if any firm's code is shorter than the level.
MatchedPanel match_resilience(const ReturnPanel& panel, const ResilienceMeasure& measure);

// factors.csv: date,mktrf,smb,hml,rmw,cma,mom,rf.
FactorSeries load_factors(const std::string& path);
void serialize_factors(const FactorSeries& factors, const std::string& path);

// resilience.csv: family,name,naics_level,direction,naics,value. One file may
// hold several measures; rows are grouped by (family, name, naics_level).
std::vector<ResilienceMeasure> load_resilience(const std::string& path);
void serialize_resilience(const std::vector<ResilienceMeasure>& measures,
                          const std::string& path);

// attention.csv: date,value.
AttentionSeries load_attention(const std::string& path);
void serialize_attention(const AttentionSeries& series, const std::string& path);

// Contiguous [begin, end) row ranges per firm in a (firm_id, date)-sorted panel.
std::vector<std::pair<std::size_t, std::size_t>> firm_ranges(const ReturnPanel& panel);

bool valid_naics(const std::string& s);

}  // namespace resilab::data
