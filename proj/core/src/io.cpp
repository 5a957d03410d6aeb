#include "hetprice/io.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <utility>

#include "hetprice/errors.hpp"

namespace hetprice::io {

namespace {

using nlohmann::json;

const json& require(const json& j, const char* key) {
  if (!j.is_object()) throw SchemaError("expected a JSON object");
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(std::string("missing field \"") + key + "\"");
  return *it;
}

std::size_t require_count(const json& j, const char* key) {
  const json& v = require(j, key);
  if (!v.is_number_integer() && !v.is_number_unsigned()) {
    throw SchemaError(std::string("field \"") + key + "\" must be an integer");
  }
  if (v.get<long long>() <= 0) throw SchemaError(std::string("field \"") + key + "\" must be positive");
  return v.get<std::size_t>();
}

const json& require_array(const json& j, const char* key, std::size_t expected_size) {
  const json& v = require(j, key);
  if (!v.is_array()) throw SchemaError(std::string("field \"") + key + "\" must be an array");
  if (expected_size != 0 && v.size() != expected_size) {
    throw SchemaError(std::string("field \"") + key + "\" has " + std::to_string(v.size()) +
                      " entries, expected " + std::to_string(expected_size));
  }
  return v;
}

RationalVector sized_vector(const json& j, std::size_t k, const std::string& what) {
  RationalVector v = vector_from_json(j);
  if (v.size() != k) {
    throw SchemaError(what + " has " + std::to_string(v.size()) + " entries, expected " +
                      std::to_string(k));
  }
  return v;
}

std::vector<std::vector<std::string>> split_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) {
      auto b = field.find_first_not_of(" \t");
      auto e = field.find_last_not_of(" \t");
      fields.push_back(b == std::string::npos ? std::string() : field.substr(b, e - b + 1));
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

bool is_index(const std::string& s) {
  return !s.empty() && s.find_first_not_of("0123456789") == std::string::npos;
}

std::size_t parse_index(const std::string& s, const char* what) {
  if (!is_index(s) || s.size() > 9 || std::stoul(s) == 0) {
    throw SchemaError(std::string("invalid ") + what + " index \"" + s + "\"");
  }
  return std::stoul(s) - 1;
}

}  // namespace

Rational rational_from_json(const json& j) {
  if (j.is_string()) return Rational::parse(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long long>());
  if (j.is_number_unsigned()) return Rational::parse(std::to_string(j.get<unsigned long long>()));
  if (j.is_number_float()) return Rational::from_decimal_double(j.get<double>());
  throw SchemaError("expected a number or decimal string, got " + std::string(j.type_name()));
}

json rational_to_json(const Rational& r) { return r.to_string(); }

RationalVector vector_from_json(const json& j) {
  if (!j.is_array()) throw SchemaError("expected an array of numbers");
  RationalVector v;
  v.reserve(j.size());
  for (const auto& x : j) v.push_back(rational_from_json(x));
  return v;
}

json vector_to_json(std::span<const Rational> v) {
  json out = json::array();
  for (const auto& x : v) out.push_back(rational_to_json(x));
  return out;
}

PanelDataset panel_from_json(const json& j) {
  const std::size_t k = require_count(j, "goods");
  const std::size_t n = require_count(j, "consumers");
  const json& obs = require_array(j, "observations", 0);
  if (obs.empty()) throw SchemaError("panel needs at least one observation");
  const std::size_t t_count = obs.size();
  RationalVector pbar;
  std::vector<RationalVector> per_obs_e(t_count);
  for (std::size_t t = 0; t < t_count; ++t) {
    const std::string where = "observation " + std::to_string(t + 1);
    RationalVector p = sized_vector(require(obs[t], "pbar"), k, where + " pbar");
    pbar.insert(pbar.end(), p.begin(), p.end());
    const json& e = require_array(obs[t], "expenditures", n);
    for (std::size_t i = 0; i < n; ++i) {
      RationalVector row =
          sized_vector(e[i], k, where + " consumer " + std::to_string(i + 1) + " expenditure");
      per_obs_e[t].insert(per_obs_e[t].end(), row.begin(), row.end());
    }
  }
  RationalVector e;
  e.reserve(n * t_count * k);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t t = 0; t < t_count; ++t) {
      auto first = per_obs_e[t].begin() + static_cast<std::ptrdiff_t>(i * k);
      e.insert(e.end(), first, first + static_cast<std::ptrdiff_t>(k));
    }
  }
  return PanelDataset(n, t_count, k, std::move(e), std::move(pbar));
}

json panel_to_json(const PanelDataset& panel) {
  json obs = json::array();
  for (std::size_t t = 0; t < panel.observations(); ++t) {
    json e = json::array();
    for (std::size_t i = 0; i < panel.consumers(); ++i) e.push_back(vector_to_json(panel.expenditure(i, t)));
    obs.push_back({{"pbar", vector_to_json(panel.pbar(t))}, {"expenditures", std::move(e)}});
  }
  return {{"goods", panel.goods()}, {"consumers", panel.consumers()}, {"observations", std::move(obs)}};
}

CrossSection cross_section_from_json(const json& j) {
  const std::size_t k = require_count(j, "goods");
  const json& obs = require_array(j, "observations", 0);
  if (obs.empty()) throw SchemaError("cross-section needs at least one observation");
  std::vector<CrossSectionObservation> out;
  for (std::size_t t = 0; t < obs.size(); ++t) {
    const std::string where = "observation " + std::to_string(t + 1);
    CrossSectionObservation o;
    o.pbar = sized_vector(require(obs[t], "pbar"), k, where + " pbar");
    o.total = rational_from_json(require(obs[t], "m"));
    const json& pts = require_array(obs[t], "points", 0);
    for (std::size_t p = 0; p < pts.size(); ++p) {
      o.points.push_back(sized_vector(pts[p], k, where + " point " + std::to_string(p + 1)));
    }
    if (auto w = obs[t].find("weights"); w != obs[t].end() && !w->is_null()) {
      o.weights = vector_from_json(*w);
    }
    out.push_back(std::move(o));
  }
  return CrossSection(k, std::move(out));
}

json cross_section_to_json(const CrossSection& cs) {
  json obs = json::array();
  for (std::size_t t = 0; t < cs.observations(); ++t) {
    const auto& o = cs.at(t);
    json pts = json::array();
    for (const auto& p : o.points) pts.push_back(vector_to_json(p));
    json entry = {{"pbar", vector_to_json(o.pbar)}, {"m", rational_to_json(o.total)}, {"points", std::move(pts)}};
    if (o.weights) entry["weights"] = vector_to_json(*o.weights);
    obs.push_back(std::move(entry));
  }
  return {{"goods", cs.goods()}, {"observations", std::move(obs)}};
}

AggregateDemandData aggregate_from_json(const json& j) {
  const std::size_t k = require_count(j, "goods");
  const std::size_t n = require_count(j, "consumers");
  const json& obs = require_array(j, "observations", 0);
  if (obs.empty()) throw SchemaError("aggregate data needs at least one observation");
  const std::size_t t_count = obs.size();
  RationalVector xbar;
  std::vector<RationalVector> per_obs_e(t_count);
  for (std::size_t t = 0; t < t_count; ++t) {
    const std::string where = "observation " + std::to_string(t + 1);
    RationalVector x = sized_vector(require(obs[t], "xbar"), k, where + " xbar");
    xbar.insert(xbar.end(), x.begin(), x.end());
    const json& e = require_array(obs[t], "expenditures", n);
    for (std::size_t i = 0; i < n; ++i) {
      RationalVector row =
          sized_vector(e[i], k, where + " consumer " + std::to_string(i + 1) + " expenditure");
      per_obs_e[t].insert(per_obs_e[t].end(), row.begin(), row.end());
    }
  }
  RationalVector e;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t t = 0; t < t_count; ++t) {
      auto first = per_obs_e[t].begin() + static_cast<std::ptrdiff_t>(i * k);
      e.insert(e.end(), first, first + static_cast<std::ptrdiff_t>(k));
    }
  }
  return AggregateDemandData(n, t_count, k, std::move(e), std::move(xbar));
}

json aggregate_to_json(const AggregateDemandData& data) {
  json obs = json::array();
  for (std::size_t t = 0; t < data.observations(); ++t) {
    json e = json::array();
    for (std::size_t i = 0; i < data.consumers(); ++i) e.push_back(vector_to_json(data.expenditure(i, t)));
    obs.push_back({{"xbar", vector_to_json(data.aggregate(t))}, {"expenditures", std::move(e)}});
  }
  return {{"goods", data.goods()}, {"consumers", data.consumers()}, {"observations", std::move(obs)}};
}

json heterogeneous_prices_to_json(const HeterogeneousPrices& prices) {
  json per_consumer = json::array();
  for (std::size_t i = 0; i < prices.consumers(); ++i) {
    json rows = json::array();
    for (std::size_t t = 0; t < prices.observations(); ++t) rows.push_back(vector_to_json(prices.at(i, t)));
    per_consumer.push_back(std::move(rows));
  }
  json out = {{"prices", std::move(per_consumer)}};
  if (prices.stable_scales()) out["stable_scales"] = vector_to_json(*prices.stable_scales());
  return out;
}

PanelDataset panel_from_csv(std::string_view expenditures_csv, std::string_view prices_csv) {
  auto erows = split_csv(expenditures_csv);
  auto prows = split_csv(prices_csv);
  if (!erows.empty() && !is_index(erows[0][0])) erows.erase(erows.begin());
  if (!prows.empty() && !is_index(prows[0][0])) prows.erase(prows.begin());
  if (erows.empty() || prows.empty()) throw SchemaError("CSV input has no data rows");

  const std::size_t k = prows[0].size() - 1;
  if (k == 0) throw SchemaError("price rows need at least one price");
  std::map<std::size_t, RationalVector> prices;
  for (const auto& row : prows) {
    if (row.size() != k + 1) throw SchemaError("price rows differ in length");
    std::size_t t = parse_index(row[0], "observation");
    RationalVector p;
    for (std::size_t c = 1; c < row.size(); ++c) p.push_back(Rational::parse(row[c]));
    if (!prices.emplace(t, std::move(p)).second) {
      throw SchemaError("duplicate price row for observation " + std::to_string(t + 1));
    }
  }
  const std::size_t t_count = prices.size();
  if (prices.rbegin()->first != t_count - 1) throw SchemaError("price rows skip an observation");

  std::map<std::pair<std::size_t, std::size_t>, RationalVector> cells;
  std::size_t n = 0;
  for (const auto& row : erows) {
    if (row.size() != k + 2) throw SchemaError("expenditure rows must have i, t and K values");
    std::size_t i = parse_index(row[0], "consumer");
    std::size_t t = parse_index(row[1], "observation");
    if (t >= t_count) throw SchemaError("expenditure row refers to an observation without prices");
    RationalVector e;
    for (std::size_t c = 2; c < row.size(); ++c) e.push_back(Rational::parse(row[c]));
    if (!cells.emplace(std::make_pair(i, t), std::move(e)).second) {
      throw SchemaError("duplicate expenditure row for consumer " + std::to_string(i + 1) +
                        ", observation " + std::to_string(t + 1));
    }
    n = std::max(n, i + 1);
  }
  if (cells.size() != n * t_count) throw SchemaError("expenditure rows do not cover every (i, t)");
  RationalVector e;
  for (auto& [key, row] : cells) e.insert(e.end(), row.begin(), row.end());
  RationalVector pbar;
  for (auto& [t, row] : prices) pbar.insert(pbar.end(), row.begin(), row.end());
  return PanelDataset(n, t_count, k, std::move(e), std::move(pbar));
}

json parse_json_text(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& ex) {
    throw SchemaError(std::string("malformed JSON: ") + ex.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace hetprice::io
