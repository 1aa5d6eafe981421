#include "resilab/factor_lab.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cctype>

#include "resilab/csv.hpp"
#include "resilab/errors.hpp"
#include "resilab/inference.hpp"

namespace resilab::factor {

const char* model_name(Model m) {
  switch (m) {
    case Model::CAPM: return "CAPM";
    case Model::FF3: return "FF3";
    case Model::FF4: return "FF4";
    case Model::FF5: return "FF5";
    case Model::FF6: return "FF6";
  }
  return "?";
}

ModelSpec ModelSpec::get(Model m) {
  ModelSpec s;
  s.name = m;
  switch (m) {
    case Model::CAPM: s.factor_list = {"mktrf"}; break;
    case Model::FF3: s.factor_list = {"mktrf", "smb", "hml"}; break;
    case Model::FF4: s.factor_list = {"mktrf", "smb", "hml", "mom"}; break;
    case Model::FF5: s.factor_list = {"mktrf", "smb", "hml", "rmw", "cma"}; break;
    case Model::FF6: s.factor_list = {"mktrf", "smb", "hml", "rmw", "cma", "mom"}; break;
  }
  return s;
}

ModelSpec ModelSpec::parse(const std::string& s) {
  std::string up;
  for (char c : s) up += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (up == "CAPM") return get(Model::CAPM);
  if (up == "FF3") return get(Model::FF3);
  if (up == "FF4") return get(Model::FF4);
  if (up == "FF5") return get(Model::FF5);
  if (up == "FF6") return get(Model::FF6);
  throw Error(Errc::bad_config, "unknown model '" + s + "'");
}

const char* ModelSpec::label() const {
  switch (name) {
    case Model::CAPM: return "capm";
    case Model::FF3: return "ff3";
    case Model::FF4: return "ff4";
    case Model::FF5: return "ff5";
    case Model::FF6: return "ff6";
  }
  return "?";
}

double factor_value(const data::FactorObservation& obs, const std::string& factor) {
  if (factor == "mktrf") return obs.mktrf;
  if (factor == "smb") return obs.smb;
  if (factor == "hml") return obs.hml;
  if (factor == "rmw") return obs.rmw;
  if (factor == "cma") return obs.cma;
  if (factor == "mom") return obs.mom;
  throw Error(Errc::invalid_spec, "unknown factor '" + factor + "'");
}

ExposureEstimates estimate_exposures(const data::ReturnPanel& panel,
                                     const data::FactorSeries& factors,
                                     const ModelSpec& model, Date window_start,
                                     Date window_end, int min_obs) {
  if (window_end < window_start) {
    throw Error(Errc::window_out_of_range, "estimation window is empty");
  }
  ExposureEstimates out;
  const auto k = model.factor_list.size();

  for (const auto& [begin, end] : data::firm_ranges(panel)) {
    std::vector<double> y;
    std::vector<const data::FactorObservation*> rows;
    for (std::size_t i = begin; i < end; ++i) {
      const auto& r = panel.rows[i];
      if (r.date < window_start || window_end < r.date) continue;
      const data::FactorObservation* f = factors.find(r.date);
      if (!f) continue;
      y.push_back(r.excess_return);
      rows.push_back(f);
    }
    const auto n = y.size();
    const std::string& firm = panel.rows[begin].firm_id;
    if (n < static_cast<std::size_t>(min_obs)) {
      out.diagnostics.push_back("firm " + firm + ": " + std::to_string(n) +
                                " observations in window, need " + std::to_string(min_obs));
      continue;
    }

    Eigen::MatrixXd X(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k + 1));
    Eigen::VectorXd yv(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      const auto ri = static_cast<Eigen::Index>(i);
      X(ri, 0) = 1.0;
      for (std::size_t j = 0; j < k; ++j) {
        X(ri, static_cast<Eigen::Index>(j + 1)) = factor_value(*rows[i], model.factor_list[j]);
      }
      yv(ri) = y[i];
    }

    stats::RegressionResult fit;
    try {
      fit = stats::ols(yv, X);
    } catch (const Error& e) {
      if (e.code() == Errc::rank_deficient) {
        throw Error(Errc::rank_deficient_design,
                    "firm '" + firm + "': factor design singular over the window");
      }
      throw;
    }

    ExposureSet es;
    es.firm_id = firm;
    es.model = model.name;
    es.alpha = fit.coefficients(0);
    for (std::size_t j = 0; j < k; ++j) {
      es.betas[model.factor_list[j]] = fit.coefficients(static_cast<Eigen::Index>(j + 1));
    }
    es.n_obs = static_cast<int>(n);
    es.window_start = window_start;
    es.window_end = window_end;
    out.exposures.push_back(std::move(es));
  }
  return out;
}

ExposureEstimates estimate_exposures(const data::MatchedPanel& panel,
                                     const data::FactorSeries& factors,
                                     const ModelSpec& model, Date window_start,
                                     Date window_end, int min_obs) {
  return estimate_exposures(panel.panel, factors, model, window_start, window_end, min_obs);
}

double risk_adjusted_return(const data::ReturnObservation& obs, const ExposureSet& exposure,
                            const data::FactorObservation& factors_on_date) {
  if (factors_on_date.date != obs.date) {
    throw Error(Errc::missing_factor_date,
                "factor row is for " + factors_on_date.date.to_string() +
                    ", observation is for " + obs.date.to_string());
  }
  double adj = obs.excess_return;
  for (const auto& [name, beta] : exposure.betas) {
    adj -= beta * factor_value(factors_on_date, name);
  }
  return adj;
}

AdjustedPanel adjust_panel(const data::ReturnPanel& panel, const data::FactorSeries& factors,
                           const std::vector<ExposureSet>& exposures, Date start, Date end) {
  std::unordered_map<std::string, const ExposureSet*> by_firm;
  for (const auto& e : exposures) by_firm.emplace(e.firm_id, &e);

  AdjustedPanel out;
  for (const auto& r : panel.rows) {
    if (r.date < start || end < r.date) continue;
    auto it = by_firm.find(r.firm_id);
    if (it == by_firm.end()) continue;
    const data::FactorObservation& f = factors.at(r.date);
    AdjustedObservation a;
    a.date = r.date;
    a.firm_id = r.firm_id;
    a.adjusted_return = risk_adjusted_return(r, *it->second, f);
    a.market_cap = r.market_cap;
    a.naics = r.naics;
    out.rows.push_back(std::move(a));
  }
  std::sort(out.rows.begin(), out.rows.end(),
            [](const AdjustedObservation& a, const AdjustedObservation& b) {
              if (a.firm_id != b.firm_id) return a.firm_id < b.firm_id;
              return a.date < b.date;
            });
  return out;
}

AdjustedPanel rolling_adjusted_panel(const data::ReturnPanel& panel,
                                     const data::FactorSeries& factors,
                                     const ModelSpec& model, const std::vector<int>& years,
                                     int min_obs) {
  if (years.empty()) {
    throw Error(Errc::invalid_spec, "rolling adjustment needs at least one year");
  }
  for (std::size_t i = 1; i < years.size(); ++i) {
    if (years[i] != years[i - 1] + 1) {
      throw Error(Errc::invalid_spec, "rolling years must be consecutive");
    }
  }

  AdjustedPanel out;
  for (int y : years) {
    auto est = estimate_exposures(panel, factors, model, Date(y, 1, 1), Date(y, 12, 31),
                                  min_obs);
    for (auto& d : est.diagnostics) {
      out.diagnostics.push_back("year " + std::to_string(y) + ": " + d);
    }
    AdjustedPanel next = adjust_panel(panel, factors, est.exposures, Date(y + 1, 1, 1),
                                      Date(y + 1, 12, 31));
    out.rows.insert(out.rows.end(), next.rows.begin(), next.rows.end());
  }
  std::sort(out.rows.begin(), out.rows.end(),
            [](const AdjustedObservation& a, const AdjustedObservation& b) {
              if (a.firm_id != b.firm_id) return a.firm_id < b.firm_id;
              return a.date < b.date;
            });
  return out;
}

namespace {

const std::vector<std::string> kExposuresHeader = {
    "firm_id", "model",   "window_start", "window_end", "n_obs",   "alpha",
    "beta_mktrf", "beta_smb", "beta_hml", "beta_mom", "beta_rmw", "beta_cma"};
const std::vector<std::string> kBetaOrder = {"mktrf", "smb", "hml", "mom", "rmw", "cma"};

}  // namespace

void write_exposures(const std::vector<ExposureSet>& exposures, const std::string& path) {
  std::string out;
  for (std::size_t i = 0; i < kExposuresHeader.size(); ++i) {
    if (i) out += ',';
    out += kExposuresHeader[i];
  }
  out += '\n';
  for (const auto& e : exposures) {
    out += e.firm_id;
    out += ',';
    out += model_name(e.model);
    out += ',';
    out += e.window_start.to_string();
    out += ',';
    out += e.window_end.to_string();
    out += ',';
    out += std::to_string(e.n_obs);
    out += ',';
    out += fmt_full(e.alpha);
    for (const auto& f : kBetaOrder) {
      out += ',';
      auto it = e.betas.find(f);
      if (it != e.betas.end()) out += fmt_full(it->second);
    }
    out += '\n';
  }
  atomic_write_file(path, out);
}

std::vector<ExposureSet> read_exposures(const std::string& path) {
  CsvReader reader(path, kExposuresHeader);
  std::vector<ExposureSet> out;
  std::vector<std::string> f;
  while (reader.next(f)) {
    const std::size_t line = reader.line_number();
    if (f.size() != kExposuresHeader.size()) {
      throw Error(Errc::bad_row, path + " line " + std::to_string(line) +
                                     ": expected 12 fields, got " + std::to_string(f.size()));
    }
    ExposureSet e;
    e.firm_id = f[0];
    e.model = ModelSpec::parse(f[1]).name;
    e.window_start = Date::parse(f[2]);
    e.window_end = Date::parse(f[3]);
    auto n = parse_int(f[4]);
    auto alpha = parse_double(f[5]);
    if (!n || !alpha) {
      throw Error(Errc::bad_row, path + " line " + std::to_string(line) + ": bad numerics");
    }
    e.n_obs = static_cast<int>(*n);
    e.alpha = *alpha;
    const ModelSpec spec = ModelSpec::get(e.model);
    for (std::size_t j = 0; j < kBetaOrder.size(); ++j) {
      const std::string& field = f[6 + j];
      const std::string& name = kBetaOrder[j];
      const bool expected =
          std::find(spec.factor_list.begin(), spec.factor_list.end(), name) !=
          spec.factor_list.end();
      if (field.empty()) {
        if (expected) {
          throw Error(Errc::bad_row, path + " line " + std::to_string(line) +
                                         ": missing beta_" + name + " for " +
                                         model_name(e.model));
        }
        continue;
      }
      auto b = parse_double(field);
      if (!b) {
        throw Error(Errc::bad_row,
                    path + " line " + std::to_string(line) + ": bad beta_" + name);
      }
      if (!expected) {
        throw Error(Errc::bad_row, path + " line " + std::to_string(line) +
                                       ": unexpected beta_" + name + " for " +
                                       model_name(e.model));
      }
      e.betas[name] = *b;
    }
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace resilab::factor
