#include "resilab/market_data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <unordered_set>

#include "resilab/csv.hpp"
#include "resilab/errors.hpp"

namespace resilab::data {

namespace {

const std::vector<std::string> kReturnsHeader = {"date", "firm_id", "ret", "mktcap", "naics"};
const std::vector<std::string> kFactorsHeader = {"date", "mktrf", "smb", "hml",
                                                 "rmw",  "cma",   "mom", "rf"};
const std::vector<std::string> kResilienceHeader = {"family", "name",  "naics_level",
                                                    "direction", "naics", "value"};
const std::vector<std::string> kAttentionHeader = {"date", "value"};

std::string row_diag(std::size_t line, const std::string& what) {
  return "row " + std::to_string(line) + ": " + what;
}

bool all_digits(const std::string& s) {
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return !s.empty();
}

}  // namespace

bool valid_naics(const std::string& s) {
  return s.size() >= 2 && s.size() <= 6 && all_digits(s);
}

const char* family_name(Family f) {
  switch (f) {
    case Family::KP: return "KP";
    case Family::DN: return "DN";
    case Family::HLR: return "HLR";
  }
  return "?";
}

const char* direction_name(Direction d) {
  return d == Direction::LowResIfHigh ? "low_res_if_high" : "high_res_if_high";
}

Family parse_family(const std::string& s) {
  if (s == "KP") return Family::KP;
  if (s == "DN") return Family::DN;
  if (s == "HLR") return Family::HLR;
  throw Error(Errc::invalid_spec, "unknown measure family '" + s + "'");
}

Direction parse_direction(const std::string& s) {
  if (s == "low_res_if_high") return Direction::LowResIfHigh;
  if (s == "high_res_if_high") return Direction::HighResIfHigh;
  throw Error(Errc::invalid_spec, "unknown direction '" + s + "'");
}

FactorSeries FactorSeries::from_rows(std::vector<FactorObservation> rows) {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    for (double v : {r.mktrf, r.smb, r.hml, r.rmw, r.cma, r.mom, r.rf}) {
      if (!std::isfinite(v)) {
        throw Error(Errc::non_finite_value,
                    "factor row for " + r.date.to_string() + " has a non-finite value");
      }
    }
    if (i > 0 && !(rows[i - 1].date < r.date)) {
      throw Error(Errc::duplicate_row, "factor dates not strictly increasing at " +
                                           r.date.to_string());
    }
  }
  FactorSeries s;
  s.rows_ = std::move(rows);
  return s;
}

const FactorObservation* FactorSeries::find(Date d) const {
  auto it = std::lower_bound(rows_.begin(), rows_.end(), d,
                             [](const FactorObservation& r, Date x) { return r.date < x; });
  if (it == rows_.end() || it->date != d) return nullptr;
  return &*it;
}

const FactorObservation& FactorSeries::at(Date d) const {
  const FactorObservation* p = find(d);
  if (!p) {
    throw Error(Errc::missing_factor_date, "no factor row for " + d.to_string());
  }
  return *p;
}

bool FactorSeries::covers(Date start, Date end) const {
  if (rows_.empty()) return false;
  return rows_.front().date <= start && rows_.back().date >= end;
}

void ResilienceMeasure::validate() const {
  if (entries.empty()) {
    throw Error(Errc::invalid_spec, "measure '" + name + "' has no entries");
  }
  if (naics_level < 2 || naics_level > 4) {
    throw Error(Errc::invalid_spec,
                "measure '" + name + "': naics_level must be 2, 3, or 4");
  }
  switch (family) {
    case Family::KP:
      if (naics_level != 3) {
        throw Error(Errc::invalid_spec, "KP measures are defined at the 3-digit level");
      }
      break;
    case Family::DN:
      if (naics_level != 2 && naics_level != 3) {
        throw Error(Errc::invalid_spec, "DN measures are defined at the 2- or 3-digit level");
      }
      break;
    case Family::HLR:
      if (naics_level != 4) {
        throw Error(Errc::invalid_spec, "HLR measures are defined at the 4-digit level");
      }
      break;
  }
  static const std::set<std::string> low_res_names = {
      "affected_share", "presence_share",     "teamwork_share",
      "customer_share", "communication_share", "dur_workplace",
      "workplace"};
  static const std::set<std::string> high_res_names = {"home", "dur_home", "share_home"};
  const bool is_telework = name.rfind("teleworkable_", 0) == 0;
  if (low_res_names.count(name) && direction != Direction::LowResIfHigh) {
    throw Error(Errc::invalid_spec,
                "measure '" + name + "' must have direction low_res_if_high");
  }
  if ((high_res_names.count(name) || is_telework) && direction != Direction::HighResIfHigh) {
    throw Error(Errc::invalid_spec,
                "measure '" + name + "' must have direction high_res_if_high");
  }
  for (const auto& [code, value] : entries) {
    if (static_cast<int>(code.size()) != naics_level || !all_digits(code)) {
      throw Error(Errc::invalid_spec, "measure '" + name + "': entry key '" + code +
                                          "' is not a " + std::to_string(naics_level) +
                                          "-digit code");
    }
    if (!std::isfinite(value)) {
      throw Error(Errc::invalid_spec,
                  "measure '" + name + "': non-finite value for '" + code + "'");
    }
  }
}

ReturnPanel ingest_returns(const std::string& path, const FactorSeries& rf_source) {
  CsvReader reader(path, kReturnsHeader);
  ReturnPanel panel;
  std::vector<std::string> f;
  while (reader.next(f)) {
    const std::size_t line = reader.line_number();
    if (f.size() != kReturnsHeader.size()) {
      panel.diagnostics.push_back(row_diag(line, "expected 5 fields, got " +
                                                     std::to_string(f.size())));
      continue;
    }
    Date date;
    if (!Date::try_parse(f[0], date)) {
      panel.diagnostics.push_back(row_diag(line, "bad date '" + f[0] + "'"));
      continue;
    }
    if (f[1].empty()) {
      panel.diagnostics.push_back(row_diag(line, "empty firm_id"));
      continue;
    }
    auto ret = parse_double(f[2]);
    if (!ret || !std::isfinite(*ret)) {
      panel.diagnostics.push_back(row_diag(line, "non-finite ret '" + f[2] + "'"));
      continue;
    }
    auto cap = parse_double(f[3]);
    if (!cap || !std::isfinite(*cap)) {
      panel.diagnostics.push_back(row_diag(line, "non-finite mktcap '" + f[3] + "'"));
      continue;
    }
    if (*cap <= 0.0) {
      panel.diagnostics.push_back(row_diag(line, "non-positive mktcap " + f[3]));
      continue;
    }
    if (!valid_naics(f[4])) {
      panel.diagnostics.push_back(row_diag(line, "bad naics '" + f[4] + "'"));
      continue;
    }
    const FactorObservation* fac = rf_source.find(date);
    if (!fac) {
      panel.diagnostics.push_back(row_diag(line, "date " + f[0] + " not in factor series"));
      continue;
    }
    ReturnObservation obs;
    obs.date = date;
    obs.firm_id = f[1];
    obs.raw_return = *ret;
    obs.excess_return = *ret - fac->rf;
    obs.market_cap = *cap;
    obs.naics = f[4];
    panel.rows.push_back(std::move(obs));
  }

  std::sort(panel.rows.begin(), panel.rows.end(),
            [](const ReturnObservation& a, const ReturnObservation& b) {
              if (a.firm_id != b.firm_id) return a.firm_id < b.firm_id;
              return a.date < b.date;
            });
  for (std::size_t i = 1; i < panel.rows.size(); ++i) {
    if (panel.rows[i].firm_id == panel.rows[i - 1].firm_id &&
        panel.rows[i].date == panel.rows[i - 1].date) {
      throw Error(Errc::duplicate_row, path + ": duplicate row for firm '" +
                                           panel.rows[i].firm_id + "' on " +
                                           panel.rows[i].date.to_string());
    }
  }
  return panel;
}

void serialize_returns(const ReturnPanel& panel, const std::string& path) {
  std::string out = "date,firm_id,ret,mktcap,naics\n";
  for (const auto& r : panel.rows) {
    out += r.date.to_string();
    out += ',';
    out += r.firm_id;
    out += ',';
    out += fmt_full(r.raw_return);
    out += ',';
    out += fmt_full(r.market_cap);
    out += ',';
    out += r.naics;
    out += '\n';
  }
  atomic_write_file(path, out);
}

ReturnPanel apply_universe_filter(const ReturnPanel& panel, double min_cap) {
  ReturnPanel out;
  out.diagnostics = panel.diagnostics;
  out.rows.reserve(panel.rows.size());
  for (const auto& r : panel.rows) {
    if (r.market_cap >= min_cap) out.rows.push_back(r);
  }
  return out;
}

MatchedPanel match_resilience(const ReturnPanel& panel, const ResilienceMeasure& measure) {
  measure.validate();

  MatchedPanel out;
  out.direction = measure.direction;
  out.measure_name = measure.name;
  out.naics_level = measure.naics_level;
  out.panel.diagnostics = panel.diagnostics;

  const auto level = static_cast<std::size_t>(measure.naics_level);
  std::unordered_set<std::string> matched_industries;
  std::unordered_set<std::string> seen_firms;
  std::unordered_set<std::string> kept_firms;

  for (const auto& ranges = firm_ranges(panel); const auto& [begin, end] : ranges) {
    const auto& firm = panel.rows[begin];
    seen_firms.insert(firm.firm_id);
    if (firm.naics.size() < level) {
      throw Error(Errc::naics_too_short, "firm '" + firm.firm_id + "' naics '" +
                                             firm.naics + "' shorter than level " +
                                             std::to_string(measure.naics_level));
    }
    const std::string prefix = firm.naics.substr(0, level);
    auto it = measure.entries.find(prefix);
    if (it == measure.entries.end()) continue;
    out.firm_value.emplace(firm.firm_id, it->second);
    matched_industries.insert(prefix);
    kept_firms.insert(firm.firm_id);
    out.panel.rows.insert(out.panel.rows.end(), panel.rows.begin() + static_cast<long>(begin),
                          panel.rows.begin() + static_cast<long>(end));
  }

  out.coverage.firms_in = seen_firms.size();
  out.coverage.firms_kept = kept_firms.size();
  out.coverage.industries_matched = matched_industries.size();
  return out;
}

FactorSeries load_factors(const std::string& path) {
  CsvReader reader(path, kFactorsHeader);
  std::vector<FactorObservation> rows;
  std::vector<std::string> f;
  while (reader.next(f)) {
    const std::size_t line = reader.line_number();
    if (f.size() != kFactorsHeader.size()) {
      throw Error(Errc::bad_row, path + " line " + std::to_string(line) +
                                     ": expected 8 fields, got " + std::to_string(f.size()));
    }
    FactorObservation o;
    o.date = Date::parse(f[0]);
    double* slots[7] = {&o.mktrf, &o.smb, &o.hml, &o.rmw, &o.cma, &o.mom, &o.rf};
    for (int i = 0; i < 7; ++i) {
      auto v = parse_double(f[static_cast<std::size_t>(i + 1)]);
      if (!v || !std::isfinite(*v)) {
        throw Error(Errc::non_finite_value,
                    path + " line " + std::to_string(line) + ": bad value '" +
                        f[static_cast<std::size_t>(i + 1)] + "'");
      }
      *slots[i] = *v;
    }
    rows.push_back(o);
  }
  return FactorSeries::from_rows(std::move(rows));
}

void serialize_factors(const FactorSeries& factors, const std::string& path) {
  std::string out = "date,mktrf,smb,hml,rmw,cma,mom,rf\n";
  for (const auto& r : factors.rows()) {
    out += r.date.to_string();
    for (double v : {r.mktrf, r.smb, r.hml, r.rmw, r.cma, r.mom, r.rf}) {
      out += ',';
      out += fmt_full(v);
    }
    out += '\n';
  }
  atomic_write_file(path, out);
}

std::vector<ResilienceMeasure> load_resilience(const std::string& path) {
  CsvReader reader(path, kResilienceHeader);
  // key: family|name|level
  std::vector<ResilienceMeasure> measures;
  auto find_measure = [&](Family fam, const std::string& name, int level) -> ResilienceMeasure* {
    for (auto& m : measures) {
      if (m.family == fam && m.name == name && m.naics_level == level) return &m;
    }
    return nullptr;
  };

  std::vector<std::string> f;
  while (reader.next(f)) {
    const std::size_t line = reader.line_number();
    if (f.size() != kResilienceHeader.size()) {
      throw Error(Errc::bad_row, path + " line " + std::to_string(line) +
                                     ": expected 6 fields, got " + std::to_string(f.size()));
    }
    Family fam = parse_family(f[0]);
    const std::string& name = f[1];
    auto level = parse_int(f[2]);
    if (!level || *level < 2 || *level > 4) {
      throw Error(Errc::invalid_spec,
                  path + " line " + std::to_string(line) + ": bad naics_level '" + f[2] + "'");
    }
    Direction dir = parse_direction(f[3]);
    auto value = parse_double(f[5]);
    if (!value || !std::isfinite(*value)) {
      throw Error(Errc::non_finite_value,
                  path + " line " + std::to_string(line) + ": bad value '" + f[5] + "'");
    }

    ResilienceMeasure* m = find_measure(fam, name, static_cast<int>(*level));
    if (!m) {
      measures.push_back(ResilienceMeasure{fam, name, static_cast<int>(*level), dir, {}});
      m = &measures.back();
    } else if (m->direction != dir) {
      throw Error(Errc::invalid_spec, path + " line " + std::to_string(line) +
                                          ": direction conflicts with earlier rows of '" +
                                          name + "'");
    }
    if (!m->entries.emplace(f[4], *value).second) {
      throw Error(Errc::duplicate_row, path + " line " + std::to_string(line) +
                                           ": duplicate naics '" + f[4] + "' for '" + name +
                                           "'");
    }
  }
  for (const auto& m : measures) m.validate();
  return measures;
}

void serialize_resilience(const std::vector<ResilienceMeasure>& measures,
                          const std::string& path) {
  std::string out = "family,name,naics_level,direction,naics,value\n";
  for (const auto& m : measures) {
    for (const auto& [code, value] : m.entries) {
      out += family_name(m.family);
      out += ',';
      out += m.name;
      out += ',';
      out += std::to_string(m.naics_level);
      out += ',';
      out += direction_name(m.direction);
      out += ',';
      out += code;
      out += ',';
      out += fmt_full(value);
      out += '\n';
    }
  }
  atomic_write_file(path, out);
}

AttentionSeries load_attention(const std::string& path) {
  CsvReader reader(path, kAttentionHeader);
  AttentionSeries series;
  std::vector<std::string> f;
  while (reader.next(f)) {
    const std::size_t line = reader.line_number();
    if (f.size() != kAttentionHeader.size()) {
      throw Error(Errc::bad_row, path + " line " + std::to_string(line) +
                                     ": expected 2 fields, got " + std::to_string(f.size()));
    }
    Date d = Date::parse(f[0]);
    auto v = parse_double(f[1]);
    if (!v || !std::isfinite(*v) || *v < 0.0) {
      throw Error(Errc::non_finite_value,
                  path + " line " + std::to_string(line) + ": bad value '" + f[1] + "'");
    }
    series.points.emplace_back(d, *v);
  }
  std::sort(series.points.begin(), series.points.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < series.points.size(); ++i) {
    if (series.points[i].first == series.points[i - 1].first) {
      throw Error(Errc::duplicate_row,
                  path + ": duplicate date " + series.points[i].first.to_string());
    }
  }
  return series;
}

void serialize_attention(const AttentionSeries& series, const std::string& path) {
  std::string out = "date,value\n";
  for (const auto& [d, v] : series.points) {
    out += d.to_string();
    out += ',';
    out += fmt_full(v);
    out += '\n';
  }
  atomic_write_file(path, out);
}

std::vector<std::pair<std::size_t, std::size_t>> firm_ranges(const ReturnPanel& panel) {
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  std::size_t begin = 0;
  for (std::size_t i = 1; i <= panel.rows.size(); ++i) {
    if (i == panel.rows.size() || panel.rows[i].firm_id != panel.rows[begin].firm_id) {
      ranges.emplace_back(begin, i);
      begin = i;
    }
  }
  return ranges;
}

}  // namespace resilab::data
