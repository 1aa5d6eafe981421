#pragma once

#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "resilab/factor_lab.hpp"
#include "resilab/market_data.hpp"
#include "resilab/portfolio.hpp"
#include "resilab/svix.hpp"

namespace resilab::reports {

// Flat key-value configuration ('#' comments, 'key = value' lines). Unknown
// keys are rejected; path-valued keys must point at existing files.
class RunConfig {
 public:
  static RunConfig from_file(const std::string& path);
  RunConfig() = default;

  // Throws BadConfig on unknown keys.
  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;
  std::string get(const std::string& key, const std::string& fallback = "") const;
  double get_num(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  Date get_date(const std::string& key, Date fallback) const;
  std::vector<std::string> get_list(const std::string& key,
                                    const std::string& fallback) const;

  // Checks that every referenced input file exists.
  void validate_files() const;

 private:
  std::map<std::string, std::string> kv_;
};

// Shared pipeline state: ingested returns, factors, selected measure, and
// the matched universe.
struct PipelineData {
  data::FactorSeries factors;
  data::ReturnPanel panel;     // after the cap filter
  data::MatchedPanel matched;
  data::ResilienceMeasure measure;
};

PipelineData load_pipeline(const RunConfig& cfg);

struct CellStat {
  double mean = 0.0;  // daily, decimal fraction
  double t = 0.0;
  int lag = 0;
  int n = 0;
  std::string stars;
  bool degenerate = false;
};

struct EventStudyResult {
  std::vector<std::string> columns;  // "ret", then model labels
  // rows in order High, Low, HminusL; one CellStat per column
  std::map<std::string, std::vector<CellStat>> cells;
  Date from, to;
  std::string measure_name;
};

EventStudyResult run_event_study(const PipelineData& pd, const RunConfig& cfg);
std::string render_event_study_md(const EventStudyResult& r);
std::string render_event_study_csv(const EventStudyResult& r);

struct IndustryXsResult {
  std::vector<portfolio::IndustryRow> rows;
  std::vector<std::string> models;  // "capm", "ff3", "ff5"
  struct Regression {
    std::string model;
    double slope_per_10 = 0.0;
    double intercept = 0.0;
    double t_white = 0.0;
    double r_squared = 0.0;
    int n = 0;
    std::string stars;
  };
  std::vector<Regression> regressions;
  Date from, to;
  std::string measure_name;
};

IndustryXsResult run_industry_xs(const PipelineData& pd, const RunConfig& cfg);
std::string render_industry_xs_md(const IndustryXsResult& r);
std::string render_industry_xs_csv(const IndustryXsResult& r);

// Command entry points; throw resilab::Error on failure. `out` receives
// progress lines unless quiet.
void cmd_ingest(const RunConfig& cfg, std::ostream& out, bool quiet);
void cmd_exposures(const RunConfig& cfg, std::ostream& out, bool quiet);
void cmd_event_study(const RunConfig& cfg, std::ostream& out, bool quiet);
void cmd_industry_xs(const RunConfig& cfg, std::ostream& out, bool quiet);
void cmd_svix(const RunConfig& cfg, std::ostream& out, bool quiet);
void cmd_expected_returns(const RunConfig& cfg, std::ostream& out, bool quiet);
void cmd_figure_data(const RunConfig& cfg, const std::string& figure, std::ostream& out,
                     bool quiet);
void cmd_synth(const RunConfig& cfg, const std::string& scenario, std::ostream& out,
               bool quiet);

}  // namespace resilab::reports
