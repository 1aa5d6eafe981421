#include "resilab/reports.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "resilab/csv.hpp"
#include "resilab/errors.hpp"
#include "resilab/inference.hpp"
#include "resilab/rng.hpp"
#include "resilab/synthesis.hpp"

namespace resilab::reports {

namespace {

const std::set<std::string> kKnownKeys = {
    // input paths
    "returns", "factors", "resilience", "attention", "surface",
    // selectors
    "measure", "naics_level", "models", "ids", "maturities",
    // windows
    "from", "to", "estimation_from", "estimation_to", "figure_from", "figure_to",
    // modes
    "cumulation", "tie", "min_obs", "min_cap", "seed",
    // scenario overrides
    "n_firms", "n_industries", "start", "end", "idio_vol", "alpha_daily", "rf_daily",
    "crash_drift_low", "crash_drift_high", "crash_start", "crash_end",
    // output
    "out", "quiet"};

const std::set<std::string> kPathKeys = {"returns", "factors", "resilience", "attention",
                                         "surface"};

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t pos = s.find(',', start);
    if (pos == std::string::npos) pos = s.size();
    std::string item = trim(s.substr(start, pos - start));
    if (!item.empty()) out.push_back(item);
    start = pos + 1;
  }
  return out;
}

std::string md_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += "\\|";
    else out += c;
  }
  return out;
}

std::string resilience_cell(double v) {
  const double r = std::round(v);
  if (std::fabs(v - r) < 1e-9) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.0f", r);
    return buf;
  }
  return fmt_fixed(v, 2);
}

std::string ensure_out_dir(const RunConfig& cfg) {
  std::string dir = cfg.get("out", ".");
  if (dir.empty()) dir = ".";
  std::filesystem::create_directories(dir);
  return dir;
}

void note(std::ostream& out, bool quiet, const std::string& line) {
  if (!quiet) out << line << "\n";
}

}  // namespace

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(Errc::bad_config, "cannot open config '" + path + "'");
  }
  RunConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw Error(Errc::bad_config, path + " line " + std::to_string(line_no) +
                                        ": expected 'key = value'");
    }
    cfg.set(trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
  }
  cfg.validate_files();
  return cfg;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  if (!kKnownKeys.count(key)) {
    throw Error(Errc::bad_config, "unknown config key '" + key + "'");
  }
  kv_[key] = value;
}

bool RunConfig::has(const std::string& key) const { return kv_.count(key) > 0; }

std::string RunConfig::get(const std::string& key, const std::string& fallback) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? fallback : it->second;
}

double RunConfig::get_num(const std::string& key, double fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  auto v = parse_double(it->second);
  if (!v) {
    throw Error(Errc::bad_config, "config key '" + key + "' is not a number: '" +
                                      it->second + "'");
  }
  return *v;
}

long long RunConfig::get_int(const std::string& key, long long fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  auto v = parse_int(it->second);
  if (!v) {
    throw Error(Errc::bad_config, "config key '" + key + "' is not an integer: '" +
                                      it->second + "'");
  }
  return *v;
}

Date RunConfig::get_date(const std::string& key, Date fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  Date d;
  if (!Date::try_parse(it->second, d)) {
    throw Error(Errc::bad_config, "config key '" + key + "' is not a date: '" +
                                      it->second + "'");
  }
  return d;
}

std::vector<std::string> RunConfig::get_list(const std::string& key,
                                             const std::string& fallback) const {
  return split_list(get(key, fallback));
}

void RunConfig::validate_files() const {
  for (const auto& [key, value] : kv_) {
    if (kPathKeys.count(key) && !std::filesystem::exists(value)) {
      throw Error(Errc::bad_config, "config key '" + key + "': file '" + value +
                                        "' does not exist");
    }
  }
}

PipelineData load_pipeline(const RunConfig& cfg) {
  for (const char* key : {"returns", "factors", "resilience"}) {
    if (!cfg.has(key)) {
      throw Error(Errc::bad_config, std::string("config key '") + key + "' is required");
    }
  }
  PipelineData pd;
  pd.factors = data::load_factors(cfg.get("factors"));
  data::ReturnPanel raw = data::ingest_returns(cfg.get("returns"), pd.factors);
  pd.panel = data::apply_universe_filter(raw, cfg.get_num("min_cap", 10.0));

  const std::string selector = cfg.get("measure", "KP:affected_share");
  const std::size_t colon = selector.find(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 >= selector.size()) {
    throw Error(Errc::bad_config,
                "measure selector must look like FAMILY:name, got '" + selector + "'");
  }
  const data::Family family = data::parse_family(selector.substr(0, colon));
  const std::string name = selector.substr(colon + 1);

  std::vector<data::ResilienceMeasure> measures = data::load_resilience(cfg.get("resilience"));
  std::vector<const data::ResilienceMeasure*> hits;
  for (const auto& m : measures) {
    if (m.family != family || m.name != name) continue;
    if (cfg.has("naics_level") &&
        m.naics_level != static_cast<int>(cfg.get_int("naics_level", 0))) {
      continue;
    }
    hits.push_back(&m);
  }
  if (hits.empty()) {
    throw Error(Errc::bad_config, "measure '" + selector + "' not found in " +
                                      cfg.get("resilience"));
  }
  if (hits.size() > 1) {
    throw Error(Errc::bad_config, "measure '" + selector +
                                      "' is defined at several naics levels; set naics_level");
  }
  pd.measure = *hits.front();
  pd.matched = data::match_resilience(pd.panel, pd.measure);
  return pd;
}

namespace {

portfolio::TieRule tie_rule(const RunConfig& cfg) {
  const std::string t = cfg.get("tie", "high");
  if (t == "high") return portfolio::TieRule::High;
  if (t == "low") return portfolio::TieRule::Low;
  throw Error(Errc::bad_config, "tie must be 'high' or 'low', got '" + t + "'");
}

portfolio::CumulationMode cumulation_mode(const RunConfig& cfg,
                                          portfolio::CumulationMode fallback) {
  if (!cfg.has("cumulation")) return fallback;
  const std::string m = cfg.get("cumulation");
  if (m == "arithmetic") return portfolio::CumulationMode::ArithmeticSum;
  if (m == "geometric") return portfolio::CumulationMode::GeometricCompound;
  throw Error(Errc::bad_config, "cumulation must be 'arithmetic' or 'geometric'");
}

// Adjusted panel for one model over [from - lead, to]; the lead supplies the
// previous trading date's caps for the window's first day.
factor::AdjustedPanel adjusted_for_window(const PipelineData& pd, const factor::ModelSpec& model,
                                          const RunConfig& cfg, Date from, Date to) {
  const Date est_from = cfg.get_date("estimation_from", Date(2019, 1, 1));
  const Date est_to = cfg.get_date("estimation_to", Date(2019, 12, 31));
  const int min_obs = static_cast<int>(cfg.get_int("min_obs", 127));
  const auto est =
      factor::estimate_exposures(pd.matched.panel, pd.factors, model, est_from, est_to, min_obs);
  return factor::adjust_panel(pd.matched.panel, pd.factors, est.exposures, from - 14, to);
}

CellStat cell_from(const portfolio::PortfolioSeries& s, Date from, Date to) {
  const portfolio::EventStats es = portfolio::event_window_stats(s, from, to);
  CellStat c;
  c.mean = es.test.mean;
  c.t = es.test.t_stat;
  c.lag = es.test.lag;
  c.n = es.test.n_obs;
  c.stars = es.stars;
  c.degenerate = es.test.degenerate;
  return c;
}

}  // namespace

EventStudyResult run_event_study(const PipelineData& pd, const RunConfig& cfg) {
  EventStudyResult r;
  r.from = cfg.get_date("from", Date(2020, 2, 24));
  r.to = cfg.get_date("to", Date(2020, 3, 20));
  r.measure_name = pd.measure.name;
  const portfolio::TieRule tie = tie_rule(cfg);

  r.columns.push_back("ret");
  std::vector<factor::ModelSpec> models;
  for (const std::string& m : cfg.get_list("models", "capm,ff3,ff4,ff5,ff6")) {
    models.push_back(factor::ModelSpec::parse(m));
    r.columns.push_back(models.back().label());
  }

  auto add_column = [&](const portfolio::SeriesBundle& b) {
    r.cells["High"].push_back(cell_from(b.high, r.from, r.to));
    r.cells["Low"].push_back(cell_from(b.low, r.from, r.to));
    r.cells["HminusL"].push_back(cell_from(b.hml, r.from, r.to));
  };

  const portfolio::FlatPanel excess = portfolio::FlatPanel::from_excess(pd.matched.panel);
  add_column(portfolio::build_series(excess, pd.matched.firm_value, pd.matched.direction,
                                     r.from, r.to, tie));
  for (const auto& model : models) {
    const factor::AdjustedPanel adj = adjusted_for_window(pd, model, cfg, r.from, r.to);
    const portfolio::FlatPanel flat = portfolio::FlatPanel::from_adjusted(adj);
    add_column(portfolio::build_series(flat, pd.matched.firm_value, pd.matched.direction,
                                       r.from, r.to, tie));
  }
  return r;
}

std::string render_event_study_md(const EventStudyResult& r) {
  std::string md = "# Event-study daily portfolio returns\n\n";
  md += "Mean daily returns in percent, " + r.from.to_string() + " to " + r.to.to_string() +
        ". Firms are re-sorted daily at the cross-sectional median of `" + r.measure_name +
        "`.\n\n";

  md += "|";
  for (std::size_t c = 0; c <= r.columns.size(); ++c) {
    md += c == 0 ? " " : " " + r.columns[c - 1] + " ";
    md += "|";
  }
  md += "\n|";
  for (std::size_t c = 0; c <= r.columns.size(); ++c) md += " --- |";
  md += "\n";

  const std::vector<std::pair<std::string, std::string>> rows = {
      {"High", "High resilience"}, {"Low", "Low resilience"}, {"HminusL", "High-minus-Low"}};
  for (const auto& [key, label] : rows) {
    const auto& cells = r.cells.at(key);
    md += "| " + label + " |";
    for (const CellStat& c : cells) {
      md += " " + fmt_fixed(100.0 * c.mean, 2) + c.stars + " |";
    }
    md += "\n| |";
    for (const CellStat& c : cells) {
      md += " [" + fmt_fixed(c.t, 2) + "] |";
    }
    md += "\n";
  }

  md += "\nValues in square brackets are t-statistics based on Newey-West standard errors "
        "with the truncation lag chosen by the Andrews rule per series. *, **, and *** "
        "denote statistical significance at the 10%, 5%, and 1% level, respectively.\n";
  return md;
}

std::string render_event_study_csv(const EventStudyResult& r) {
  std::string csv = "row,column,mean_daily,t_stat,nw_lag,n_days,stars\n";
  for (const char* key : {"High", "Low", "HminusL"}) {
    const auto& cells = r.cells.at(key);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      csv += key;
      csv += ',';
      csv += r.columns[c];
      csv += ',';
      csv += fmt_full(cells[c].mean);
      csv += ',';
      csv += fmt_full(cells[c].t);
      csv += ',';
      csv += std::to_string(cells[c].lag);
      csv += ',';
      csv += std::to_string(cells[c].n);
      csv += ',';
      csv += cells[c].stars;
      csv += '\n';
    }
  }
  return csv;
}

IndustryXsResult run_industry_xs(const PipelineData& pd, const RunConfig& cfg) {
  IndustryXsResult r;
  r.from = cfg.get_date("from", Date(2020, 2, 24));
  r.to = cfg.get_date("to", Date(2020, 3, 20));
  r.measure_name = pd.measure.name;
  r.models = {"capm", "ff3", "ff5"};

  std::vector<factor::AdjustedPanel> panels;
  panels.reserve(r.models.size());
  for (const std::string& m : r.models) {
    panels.push_back(adjusted_for_window(pd, factor::ModelSpec::parse(m), cfg, r.from, r.to));
  }
  std::vector<std::pair<std::string, const factor::AdjustedPanel*>> by_model;
  for (std::size_t i = 0; i < r.models.size(); ++i) {
    by_model.emplace_back(r.models[i], &panels[i]);
  }
  r.rows = portfolio::industry_cross_section(pd.matched, by_model, r.from, r.to, 25);

  if (r.rows.size() >= 3) {
    Eigen::MatrixXd X(static_cast<Eigen::Index>(r.rows.size()), 2);
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
      X(static_cast<Eigen::Index>(i), 0) = 1.0;
      X(static_cast<Eigen::Index>(i), 1) = r.rows[i].resilience;
    }
    for (const std::string& m : r.models) {
      Eigen::VectorXd y(static_cast<Eigen::Index>(r.rows.size()));
      for (std::size_t i = 0; i < r.rows.size(); ++i) {
        y(static_cast<Eigen::Index>(i)) = r.rows[i].cum_by_model.at(m);
      }
      const stats::RegressionResult fit = stats::ols_white(y, X);
      IndustryXsResult::Regression reg;
      reg.model = m;
      reg.intercept = fit.coefficients(0);
      reg.slope_per_10 = 10.0 * fit.coefficients(1);
      reg.t_white = fit.t_stats(1);
      reg.r_squared = fit.r_squared;
      reg.n = fit.n_obs;
      reg.stars = fit.stars[1];
      r.regressions.push_back(reg);
    }
  }
  return r;
}

std::string render_industry_xs_md(const IndustryXsResult& r) {
  std::string md = "# Industry portfolios\n\n";
  md += "Cumulative adjusted returns in percent, " + r.from.to_string() + " to " +
        r.to.to_string() + ", for the industries with the most firms. Resilience is 100 "
        "minus `" + r.measure_name + "` when higher raw values mean lower resilience.\n\n";

  md += "| NAICS | description | firms | resilience |";
  for (const std::string& m : r.models) md += " " + m + " |";
  md += "\n|";
  for (std::size_t c = 0; c < 4 + r.models.size(); ++c) md += " --- |";
  md += "\n";
  for (const auto& row : r.rows) {
    md += "| " + row.naics + " | " + md_escape(row.description) + " | " +
          std::to_string(row.n_firms) + " | " + resilience_cell(row.resilience) + " |";
    for (const std::string& m : r.models) {
      md += " " + fmt_fixed(row.cum_by_model.at(m), 2) + " |";
    }
    md += "\n";
  }

  if (!r.regressions.empty()) {
    md += "\nCross-sectional regression of cumulative returns on resilience "
          "(White standard errors, t-statistics in square brackets):\n\n";
    md += "| model | slope per 10 points | t | R2 | n |\n";
    md += "| --- | --- | --- | --- | --- |\n";
    for (const auto& reg : r.regressions) {
      md += "| " + reg.model + " | " + fmt_fixed(reg.slope_per_10, 2) + reg.stars + " | [" +
            fmt_fixed(reg.t_white, 2) + "] | " + fmt_fixed(reg.r_squared, 3) + " | " +
            std::to_string(reg.n) + " |\n";
    }
  }
  return md;
}

std::string render_industry_xs_csv(const IndustryXsResult& r) {
  std::string csv = "naics,n_firms,resilience,cum_capm,cum_ff3,cum_ff5\n";
  for (const auto& row : r.rows) {
    csv += row.naics;
    csv += ',';
    csv += std::to_string(row.n_firms);
    csv += ',';
    csv += fmt_full(row.resilience);
    for (const char* m : {"capm", "ff3", "ff5"}) {
      csv += ',';
      csv += fmt_full(row.cum_by_model.at(m));
    }
    csv += '\n';
  }
  return csv;
}

void cmd_ingest(const RunConfig& cfg, std::ostream& out, bool quiet) {
  for (const char* key : {"returns", "factors"}) {
    if (!cfg.has(key)) {
      throw Error(Errc::bad_config, std::string("config key '") + key + "' is required");
    }
  }
  const data::FactorSeries factors = data::load_factors(cfg.get("factors"));
  const data::ReturnPanel panel = data::ingest_returns(cfg.get("returns"), factors);

  std::set<std::string> firms;
  std::set<std::int32_t> dates;
  for (const auto& r : panel.rows) {
    firms.insert(r.firm_id);
    dates.insert(r.date.count());
  }
  note(out, quiet, "rows: " + std::to_string(panel.rows.size()));
  note(out, quiet, "firms: " + std::to_string(firms.size()));
  note(out, quiet, "dates: " + std::to_string(dates.size()));
  note(out, quiet, "rejected rows: " + std::to_string(panel.diagnostics.size()));
  for (const auto& d : panel.diagnostics) note(out, quiet, "  " + d);

  if (cfg.has("out")) {
    const std::string dir = ensure_out_dir(cfg);
    data::serialize_returns(panel, dir + "/returns_clean.csv");
    std::string diag;
    for (const auto& d : panel.diagnostics) diag += d + "\n";
    atomic_write_file(dir + "/ingest_diagnostics.txt", diag);
    note(out, quiet, "wrote " + dir + "/returns_clean.csv");
    note(out, quiet, "wrote " + dir + "/ingest_diagnostics.txt");
  }
}

void cmd_exposures(const RunConfig& cfg, std::ostream& out, bool quiet) {
  for (const char* key : {"returns", "factors"}) {
    if (!cfg.has(key)) {
      throw Error(Errc::bad_config, std::string("config key '") + key + "' is required");
    }
  }
  const data::FactorSeries factors = data::load_factors(cfg.get("factors"));
  const data::ReturnPanel panel = data::apply_universe_filter(
      data::ingest_returns(cfg.get("returns"), factors), cfg.get_num("min_cap", 10.0));
  const Date est_from = cfg.get_date("estimation_from", Date(2019, 1, 1));
  const Date est_to = cfg.get_date("estimation_to", Date(2019, 12, 31));
  const int min_obs = static_cast<int>(cfg.get_int("min_obs", 127));

  std::vector<factor::ExposureSet> all;
  std::vector<std::string> diagnostics;
  for (const std::string& m : cfg.get_list("models", "capm,ff3,ff4,ff5,ff6")) {
    const factor::ModelSpec model = factor::ModelSpec::parse(m);
    auto est = factor::estimate_exposures(panel, factors, model, est_from, est_to, min_obs);
    all.insert(all.end(), est.exposures.begin(), est.exposures.end());
    for (auto& d : est.diagnostics) diagnostics.push_back(std::string(model.label()) + ": " + d);
  }
  const std::string dir = ensure_out_dir(cfg);
  factor::write_exposures(all, dir + "/exposures.csv");
  note(out, quiet, "wrote " + dir + "/exposures.csv (" + std::to_string(all.size()) + " rows)");
  for (const auto& d : diagnostics) note(out, quiet, "  omitted " + d);
}

void cmd_event_study(const RunConfig& cfg, std::ostream& out, bool quiet) {
  const PipelineData pd = load_pipeline(cfg);
  const EventStudyResult r = run_event_study(pd, cfg);
  const std::string dir = ensure_out_dir(cfg);
  atomic_write_file(dir + "/event_study.md", render_event_study_md(r));
  atomic_write_file(dir + "/event_study.csv", render_event_study_csv(r));
  note(out, quiet, "wrote " + dir + "/event_study.md");
  note(out, quiet, "wrote " + dir + "/event_study.csv");
}

void cmd_industry_xs(const RunConfig& cfg, std::ostream& out, bool quiet) {
  const PipelineData pd = load_pipeline(cfg);
  const IndustryXsResult r = run_industry_xs(pd, cfg);
  const std::string dir = ensure_out_dir(cfg);
  atomic_write_file(dir + "/industry_xs.md", render_industry_xs_md(r));
  atomic_write_file(dir + "/industry_xs.csv", render_industry_xs_csv(r));
  note(out, quiet, "wrote " + dir + "/industry_xs.md");
  note(out, quiet, "wrote " + dir + "/industry_xs.csv");
}

namespace {

std::vector<int> maturity_list(const RunConfig& cfg) {
  std::vector<int> out;
  for (const std::string& s : cfg.get_list("maturities", "30,91,365,730")) {
    auto v = parse_int(s);
    if (!v || !svix::valid_maturity(static_cast<int>(*v))) {
      throw Error(Errc::bad_config, "unsupported maturity '" + s + "'");
    }
    out.push_back(static_cast<int>(*v));
  }
  if (out.empty()) throw Error(Errc::bad_config, "maturities must not be empty");
  return out;
}

bool wants_maturity(const std::vector<int>& list, int days) {
  return std::find(list.begin(), list.end(), days) != list.end();
}

}  // namespace

void cmd_svix(const RunConfig& cfg, std::ostream& out, bool quiet) {
  if (!cfg.has("surface")) {
    throw Error(Errc::bad_config, "config key 'surface' is required");
  }
  const std::vector<int> maturities = maturity_list(cfg);
  const std::vector<svix::OptionSurfaceSlice> slices = svix::read_surfaces(cfg.get("surface"));

  std::vector<svix::SvixValue> values;
  for (const auto& s : slices) {
    if (!wants_maturity(maturities, s.maturity_days)) continue;
    values.push_back(svix::svix_squared(s));
  }
  const std::string dir = ensure_out_dir(cfg);
  svix::write_svix_values(values, dir + "/svix_out.csv");
  note(out, quiet, "wrote " + dir + "/svix_out.csv (" + std::to_string(values.size()) +
                       " rows)");

  if (cfg.has("returns") && cfg.has("factors") && cfg.has("resilience")) {
    const PipelineData pd = load_pipeline(cfg);
    std::vector<svix::SvixValue> names;
    for (const auto& v : values) {
      if (v.underlying_id != "MARKET") names.push_back(v);
    }
    const auto points = svix::resilience_svix_indices(names, pd.matched, tie_rule(cfg));
    std::string csv =
        "date,days,high_bar2,low_bar2,n_high,n_low,diff_premium,diff_premium_pa\n";
    for (const auto& p : points) {
      csv += p.date.to_string();
      csv += ',';
      csv += std::to_string(p.maturity_days);
      csv += ',';
      csv += fmt_full(p.high_bar2);
      csv += ',';
      csv += fmt_full(p.low_bar2);
      csv += ',';
      csv += std::to_string(p.n_high);
      csv += ',';
      csv += std::to_string(p.n_low);
      csv += ',';
      csv += fmt_full(p.diff_premium);
      csv += ',';
      csv += fmt_full(p.diff_premium_pa);
      csv += '\n';
    }
    atomic_write_file(dir + "/svix_groups.csv", csv);
    note(out, quiet, "wrote " + dir + "/svix_groups.csv (" + std::to_string(points.size()) +
                         " rows)");
  }
}

void cmd_expected_returns(const RunConfig& cfg, std::ostream& out, bool quiet) {
  for (const char* key : {"surface", "returns", "factors"}) {
    if (!cfg.has(key)) {
      throw Error(Errc::bad_config, std::string("config key '") + key + "' is required");
    }
  }
  const std::vector<int> maturities = maturity_list(cfg);
  const data::FactorSeries factors = data::load_factors(cfg.get("factors"));
  const data::ReturnPanel panel = data::ingest_returns(cfg.get("returns"), factors);
  const portfolio::FlatPanel caps = portfolio::FlatPanel::from_excess(panel);

  std::vector<svix::SvixValue> market;
  std::vector<svix::SvixValue> names;
  std::map<std::pair<std::int32_t, int>, double> rf_at;
  for (const auto& s : svix::read_surfaces(cfg.get("surface"))) {
    if (!wants_maturity(maturities, s.maturity_days)) continue;
    rf_at[{s.date.count(), s.maturity_days}] = s.rf_gross;
    const svix::SvixValue v = svix::svix_squared(s);
    (s.underlying_id == "MARKET" ? market : names).push_back(v);
  }
  if (market.empty()) {
    throw Error(Errc::invalid_spec, "surface file has no MARKET slices");
  }
  std::map<std::pair<std::int32_t, int>, const svix::SvixValue*> market_at;
  for (const auto& v : market) market_at[{v.date.count(), v.maturity_days}] = &v;

  std::map<std::pair<std::int32_t, int>, std::vector<const svix::SvixValue*>> by_key;
  for (const auto& v : names) by_key[{v.date.count(), v.maturity_days}].push_back(&v);

  std::vector<std::string> ids = cfg.get_list("ids", "");

  std::string csv = "date,underlying_id,days,premium_over_rf,premium,premium_pa\n";
  std::size_t rows = 0;
  for (const auto& [key, group] : by_key) {
    const Date date(key.first);
    const int days = key.second;
    auto mit = market_at.find(key);
    if (mit == market_at.end()) {
      throw Error(Errc::maturity_mismatch, "no MARKET slice on " + date.to_string() + " at " +
                                               std::to_string(days) + " days");
    }

    // Average-stock index over every name with a lagged cap.
    std::vector<svix::SvixValue> vals;
    std::vector<double> weights;
    const std::optional<Date> prev = caps.prev_date(date);
    for (const svix::SvixValue* v : group) {
      const portfolio::FlatRow* row =
          prev ? caps.find(v->underlying_id, *prev) : caps.find(v->underlying_id, date);
      if (!row) continue;
      vals.push_back(*v);
      weights.push_back(row->cap);
    }
    if (vals.empty()) {
      throw Error(Errc::empty_universe,
                  "no market caps for option names on " + date.to_string());
    }
    double total = 0.0;
    for (double w : weights) total += w;
    for (double& w : weights) w /= total;
    const svix::SvixValue bar = svix::svix_bar(vals, weights);
    const double rf_gross = rf_at.at(key);

    for (const svix::SvixValue* v : group) {
      if (!ids.empty() &&
          std::find(ids.begin(), ids.end(), v->underlying_id) == ids.end()) {
        continue;
      }
      const svix::ExpectedReturn er = svix::expected_return(*v, *mit->second, bar, rf_gross);
      csv += date.to_string();
      csv += ',';
      csv += v->underlying_id;
      csv += ',';
      csv += std::to_string(days);
      csv += ',';
      csv += fmt_full(er.premium_over_rf);
      csv += ',';
      csv += fmt_full(er.premium);
      csv += ',';
      csv += fmt_full(er.premium_pa);
      csv += '\n';
      ++rows;
    }
  }
  const std::string dir = ensure_out_dir(cfg);
  atomic_write_file(dir + "/expected_returns.csv", csv);
  note(out, quiet, "wrote " + dir + "/expected_returns.csv (" + std::to_string(rows) +
                       " rows)");
}

namespace {

struct FigureWriter {
  std::string csv = "date,series,value\n";
  void marker(Date d, const std::string& which) {
    csv += d.to_string() + ",event_marker," + which + "\n";
  }
  void point(Date d, const std::string& series, double value) {
    csv += d.to_string() + "," + series + "," + fmt_full(value) + "\n";
  }
  void series(const std::string& name, const std::vector<Date>& dates,
              const std::vector<double>& values) {
    for (std::size_t i = 0; i < dates.size(); ++i) point(dates[i], name, values[i]);
  }
};

void add_bundle_cumulative(FigureWriter& w, const portfolio::SeriesBundle& b,
                           const std::string& suffix, portfolio::CumulationMode mode) {
  w.series("high" + suffix, b.high.dates, portfolio::cumulative_series(b.high.daily_return, mode));
  w.series("low" + suffix, b.low.dates, portfolio::cumulative_series(b.low.daily_return, mode));
  w.series("hml" + suffix, b.hml.dates, portfolio::cumulative_series(b.hml.daily_return, mode));
}

}  // namespace

void cmd_figure_data(const RunConfig& cfg, const std::string& figure, std::ostream& out,
                     bool quiet) {
  const Date fig_from = cfg.get_date("figure_from", Date(2020, 1, 1));
  const Date fig_to = cfg.get_date("figure_to", Date(2020, 3, 31));
  const Date ev_from = cfg.get_date("from", Date(2020, 2, 24));
  const Date ev_to = cfg.get_date("to", Date(2020, 3, 20));
  const portfolio::TieRule tie = tie_rule(cfg);

  FigureWriter w;
  w.marker(ev_from, "start");
  w.marker(ev_to, "end");

  if (figure == "f1") {
    const PipelineData pd = load_pipeline(cfg);
    const auto mode = cumulation_mode(cfg, portfolio::CumulationMode::GeometricCompound);
    if (cfg.has("attention")) {
      const data::AttentionSeries att = data::load_attention(cfg.get("attention"));
      for (const auto& [d, v] : att.points) {
        if (d < fig_from || fig_to < d) continue;
        w.point(d, "attention", v);
      }
    }
    {
      std::vector<Date> dates;
      std::vector<double> mkt;
      for (const auto& row : pd.factors.rows()) {
        if (row.date < fig_from || fig_to < row.date) continue;
        dates.push_back(row.date);
        mkt.push_back(row.mktrf);
      }
      w.series("market_cum", dates, portfolio::cumulative_series(mkt, mode));
    }
    const portfolio::FlatPanel excess = portfolio::FlatPanel::from_excess(pd.matched.panel);
    const auto b = portfolio::build_series(excess, pd.matched.firm_value, pd.matched.direction,
                                           fig_from, fig_to, tie);
    add_bundle_cumulative(w, b, "_cum", mode);
  } else if (figure == "f2" || figure == "f4") {
    const PipelineData pd = load_pipeline(cfg);
    const auto mode = cumulation_mode(cfg, portfolio::CumulationMode::ArithmeticSum);
    for (const std::string& m : cfg.get_list("models", "capm,ff3,ff5")) {
      const factor::ModelSpec model = factor::ModelSpec::parse(m);
      factor::AdjustedPanel adj;
      if (figure == "f2") {
        adj = adjusted_for_window(pd, model, cfg, fig_from, fig_to);
      } else {
        std::vector<int> years;
        for (int y = fig_from.year() - 1; y <= fig_to.year() - 1; ++y) years.push_back(y);
        adj = factor::rolling_adjusted_panel(pd.matched.panel, pd.factors, model, years,
                                             static_cast<int>(cfg.get_int("min_obs", 127)));
      }
      const portfolio::FlatPanel flat = portfolio::FlatPanel::from_adjusted(adj);
      const auto b = portfolio::build_series(flat, pd.matched.firm_value, pd.matched.direction,
                                             fig_from, fig_to, tie);
      add_bundle_cumulative(w, b, std::string("_") + model.label(), mode);
    }
  } else if (figure == "f5") {
    if (!cfg.has("surface")) {
      throw Error(Errc::bad_config, "config key 'surface' is required for f5");
    }
    const PipelineData pd = load_pipeline(cfg);
    const std::vector<int> maturities = maturity_list(cfg);
    std::vector<svix::SvixValue> names;
    for (const auto& s : svix::read_surfaces(cfg.get("surface"))) {
      if (!wants_maturity(maturities, s.maturity_days)) continue;
      if (s.underlying_id == "MARKET") continue;
      names.push_back(svix::svix_squared(s));
    }
    for (const auto& p : svix::resilience_svix_indices(names, pd.matched, tie)) {
      if (p.date < fig_from || fig_to < p.date) continue;
      const std::string d = std::to_string(p.maturity_days) + "d";
      const double ann = 365.0 / static_cast<double>(p.maturity_days);
      w.point(p.date, "high_bar2_raw_" + d, p.high_bar2);
      w.point(p.date, "high_bar2_pa_" + d, p.high_bar2 * ann);
      w.point(p.date, "low_bar2_raw_" + d, p.low_bar2);
      w.point(p.date, "low_bar2_pa_" + d, p.low_bar2 * ann);
      w.point(p.date, "diff_premium_pa_" + d, p.diff_premium_pa);
    }
  } else if (figure == "f6") {
    // Reuse the expected-returns pipeline and reshape to tidy series.
    cmd_expected_returns(cfg, out, true);
    const std::string dir = ensure_out_dir(cfg);
    CsvReader reader(dir + "/expected_returns.csv",
                     {"date", "underlying_id", "days", "premium_over_rf", "premium",
                      "premium_pa"});
    std::vector<std::string> f;
    while (reader.next(f)) {
      const Date d = Date::parse(f[0]);
      if (d < fig_from || fig_to < d) continue;
      w.point(d, f[1] + "_premium_pa_" + f[2] + "d", *parse_double(f[5]));
    }
  } else {
    throw Error(Errc::bad_config, "unknown figure '" + figure +
                                      "', expected f1, f2, f4, f5, or f6");
  }

  const std::string dir = ensure_out_dir(cfg);
  const std::string path = dir + "/figure_" + figure + ".csv";
  atomic_write_file(path, w.csv);
  note(out, quiet, "wrote " + path);
}

void cmd_synth(const RunConfig& cfg, const std::string& scenario, std::ostream& out,
               bool quiet) {
  synth::ScenarioSpec spec;
  spec.seed = static_cast<std::uint64_t>(cfg.get_int("seed", 42));
  spec.n_firms = static_cast<int>(cfg.get_int("n_firms", 200));
  spec.n_industries = static_cast<int>(cfg.get_int("n_industries", 10));
  spec.start = cfg.get_date("start", Date(2019, 1, 1));
  spec.end = cfg.get_date("end", Date(2020, 3, 31));
  spec.idio_vol = cfg.get_num("idio_vol", 0.02);
  spec.alpha_daily = cfg.get_num("alpha_daily", 0.0);
  spec.rf_daily = cfg.get_num("rf_daily", 0.0);
  spec.crash_start = cfg.get_date("crash_start", Date(2020, 2, 24));
  spec.crash_end = cfg.get_date("crash_end", Date(2020, 3, 20));

  if (scenario == "crash") {
    spec.crash_drift_low = cfg.get_num("crash_drift_low", -0.01);
    spec.crash_drift_high = cfg.get_num("crash_drift_high", 0.0);
  } else if (scenario == "null" || scenario == "surface") {
    spec.crash_drift_low = cfg.get_num("crash_drift_low", 0.0);
    spec.crash_drift_high = cfg.get_num("crash_drift_high", 0.0);
  } else {
    throw Error(Errc::bad_config, "unknown scenario '" + scenario +
                                      "', expected crash, null, or surface");
  }

  const synth::ScenarioData data = synth::generate_panel(spec);
  const std::string dir = ensure_out_dir(cfg);
  synth::write_scenario(data, dir);
  for (const char* f : {"returns.csv", "factors.csv", "resilience.csv", "attention.csv",
                        "truth.csv"}) {
    note(out, quiet, std::string("wrote ") + dir + "/" + f);
  }

  if (scenario == "surface") {
    const Date fig_from = cfg.get_date("figure_from", Date(2020, 1, 1));
    const Date fig_to = cfg.get_date("figure_to", spec.end);
    std::vector<svix::OptionSurfaceSlice> slices;
    synth::GridSpec grid;
    grid.n_strikes = 61;
    grid.k_min_rel = 0.2;
    grid.k_max_rel = 4.0;

    std::vector<Date> dates;
    {
      int k = 0;
      for (Date d : data.trading_days) {
        if (d < fig_from || fig_to < d) continue;
        if (k++ % 5 == 0) dates.push_back(d);
      }
    }
    const int n_ids = std::min(spec.n_firms, 12);
    for (Date d : dates) {
      const bool in_crash = spec.crash_start <= d && d <= spec.crash_end;
      const double mkt_sigma = in_crash ? 0.16 * 1.6 : 0.16;
      for (int days : {30, 91, 365, 730}) {
        slices.push_back(
            synth::generate_surface("MARKET", d, days, 100.0, 1.0, mkt_sigma, grid).slice);
        for (int i = 0; i < n_ids; ++i) {
          const synth::FirmTruth& ft = data.truth[static_cast<std::size_t>(i)];
          CounterRng rng(spec.seed, 7000 + static_cast<std::uint64_t>(i));
          double sigma = 0.20 + 0.10 * rng.next_uniform();
          if (in_crash) sigma *= ft.low_group ? 2.0 : 1.3;
          slices.push_back(
              synth::generate_surface(ft.firm_id, d, days, 100.0, 1.0, sigma, grid).slice);
        }
      }
    }
    svix::write_surfaces(slices, dir + "/surface.csv");
    note(out, quiet, "wrote " + dir + "/surface.csv (" + std::to_string(slices.size()) +
                         " slices)");
  }
}

}  // namespace resilab::reports
