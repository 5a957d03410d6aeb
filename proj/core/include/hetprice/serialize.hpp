#pragma once

#include <optional>
#include <span>

#include <nlohmann/json.hpp>

#include "hetprice/constructions.hpp"
#include "hetprice/revpref.hpp"
#include "hetprice/rum.hpp"

// JSON views of verdicts and certificates. Indices in the output are
// one-based; pooled nodes i * T + t are written as [i, t].
namespace hetprice::io {

// pooled_observations > 0 labels nodes as [consumer, observation].
nlohmann::json verdict_to_json(const revpref::GarpVerdict& v, std::size_t pooled_observations = 0);
nlohmann::json graph_to_json(const revpref::RevealedPreferenceGraph& g);
nlohmann::json afriat_to_json(const revpref::AfriatSolution& sol);
nlohmann::json price_system_to_json(const revpref::PriceSystem& f);

nlohmann::json bound_entry_to_json(const constructions::BoundEntry& b);
nlohmann::json params_to_json(const constructions::ConstructionParams& p);
nlohmann::json scale_to_json(const constructions::StableScale& s);
nlohmann::json prop1_to_json(const constructions::Prop1Result& r);
nlohmann::json prop2_to_json(const constructions::Prop2Result& r);
nlohmann::json invariance_to_json(std::span<const constructions::InvarianceReport> reports);
nlohmann::json prop4_to_json(const constructions::Prop4Result& r, std::size_t observations);
nlohmann::json prop6_to_json(const constructions::Prop6Result& r, std::size_t observations);

nlohmann::json sorting_to_json(const SortingFunction& s);
nlohmann::json rum_verdict_to_json(const rum::RumVerdict& v);
nlohmann::json rpm_certificate_to_json(const rum::RpmCertificate& c, std::size_t observations);
nlohmann::json patches_to_json(const rum::PatchDecomposition& d);
nlohmann::json one_good_to_json(const rum::OneGoodResult& r);

}  // namespace hetprice::io
