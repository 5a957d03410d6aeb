#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "hetprice/dataset.hpp"

// JSON and CSV ingestion. Numbers are exact: JSON strings are read as decimal
// or "p/q" literals, JSON numbers through their shortest decimal spelling.
// Shape problems raise SchemaError, value problems DomainError.
namespace hetprice::io {

Rational rational_from_json(const nlohmann::json& j);
nlohmann::json rational_to_json(const Rational& r);
RationalVector vector_from_json(const nlohmann::json& j);
nlohmann::json vector_to_json(std::span<const Rational> v);

// {"goods":K, "consumers":N,
//  "observations":[{"pbar":[...], "expenditures":[[...] x N]} x T]}
PanelDataset panel_from_json(const nlohmann::json& j);
nlohmann::json panel_to_json(const PanelDataset& panel);

// {"goods":K, "observations":[{"pbar":[...], "m":..., "points":[[...] x N],
//  "weights":[...]?} x T]}
CrossSection cross_section_from_json(const nlohmann::json& j);
nlohmann::json cross_section_to_json(const CrossSection& cs);

// {"goods":K, "consumers":N,
//  "observations":[{"xbar":[...], "expenditures":[[...] x N]} x T]}
AggregateDemandData aggregate_from_json(const nlohmann::json& j);
nlohmann::json aggregate_to_json(const AggregateDemandData& data);

nlohmann::json heterogeneous_prices_to_json(const HeterogeneousPrices& prices);

// Rows "i,t,e_1,...,e_K" (1-based indices) and "t,p_1,...,p_K". A first row
// whose leading field is not an integer is treated as a header.
PanelDataset panel_from_csv(std::string_view expenditures_csv, std::string_view prices_csv);

nlohmann::json parse_json_text(std::string_view text);
std::string read_file(const std::filesystem::path& path);

}  // namespace hetprice::io
