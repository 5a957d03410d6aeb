#include "hetprice/serialize.hpp"

#include "hetprice/io.hpp"

namespace hetprice::io {

using nlohmann::json;

namespace {

json node_label(std::size_t node, std::size_t pooled_observations) {
  if (pooled_observations == 0) return node + 1;
  return json::array({node / pooled_observations + 1, node % pooled_observations + 1});
}

json matrix_to_json(const revpref::Matrix& m) {
  json out = json::array();
  for (const auto& row : m) out.push_back(vector_to_json(row));
  return out;
}

json indices_to_json(std::span<const std::size_t> v) {
  json out = json::array();
  for (std::size_t x : v) out.push_back(x + 1);
  return out;
}

const char* relation_symbol(constructions::Relation r) {
  switch (r) {
    case constructions::Relation::less: return "<";
    case constructions::Relation::less_equal: return "<=";
    case constructions::Relation::equal: return "==";
    case constructions::Relation::greater_equal: return ">=";
    case constructions::Relation::greater: return ">";
  }
  return "?";
}

json prices_matrix(const HeterogeneousPrices& prices) { return heterogeneous_prices_to_json(prices); }

}  // namespace

json verdict_to_json(const revpref::GarpVerdict& v, std::size_t pooled_observations) {
  json out{{"satisfied", v.satisfied}, {"witness", nullptr}, {"cost_matrix", matrix_to_json(v.values)}};
  if (v.witness) {
    json w = json::array();
    for (std::size_t node : *v.witness) w.push_back(node_label(node, pooled_observations));
    out["witness"] = std::move(w);
  }
  return out;
}

json graph_to_json(const revpref::RevealedPreferenceGraph& g) {
  json weak = json::array(), strict = json::array();
  for (std::size_t t = 0; t < g.size(); ++t) {
    json wr = json::array(), sr = json::array();
    for (std::size_t s = 0; s < g.size(); ++s) {
      wr.push_back(g.weak(t, s));
      sr.push_back(g.strict(t, s));
    }
    weak.push_back(std::move(wr));
    strict.push_back(std::move(sr));
  }
  return {{"weak", std::move(weak)}, {"strict", std::move(strict)}, {"values", matrix_to_json(g.values())}};
}

json afriat_to_json(const revpref::AfriatSolution& sol) {
  return {{"levels", vector_to_json(sol.levels)}, {"multipliers", vector_to_json(sol.multipliers)}};
}

json price_system_to_json(const revpref::PriceSystem& f) {
  if (const auto* lin = std::get_if<revpref::LinearTag>(&f.tag())) {
    return {{"kind", "linear"}, {"p", vector_to_json(lin->p)}};
  }
  const auto& b = std::get<revpref::BehavioralTag>(f.tag());
  return {{"kind", "behavioral"},
          {"phi", b.phi},
          {"pbar", vector_to_json(b.pbar)},
          {"perceived", vector_to_json(b.perceived)}};
}

json bound_entry_to_json(const constructions::BoundEntry& b) {
  return {{"description", b.description},
          {"lhs", rational_to_json(b.lhs)},
          {"relation", relation_symbol(b.relation)},
          {"rhs", rational_to_json(b.rhs)},
          {"holds", b.holds()}};
}

json params_to_json(const constructions::ConstructionParams& p) {
  json log = json::array();
  for (const auto& b : p.bound_log) log.push_back(bound_entry_to_json(b));
  auto opt = [](const std::optional<Rational>& v) -> json {
    return v ? rational_to_json(*v) : json(nullptr);
  };
  return {{"epsilon", opt(p.epsilon)},
          {"p1_seed", opt(p.p1_seed)},
          {"p2_seed", opt(p.p2_seed)},
          {"alpha", vector_to_json(p.alpha)},
          {"retries", p.retries},
          {"bound_log", std::move(log)},
          {"all_bounds_hold", p.all_bounds_hold()}};
}

json scale_to_json(const constructions::StableScale& s) {
  return {{"lambda", vector_to_json(s.lambda)},
          {"beta", vector_to_json(s.beta())},
          {"goods", indices_to_json(s.goods)}};
}

json prop1_to_json(const constructions::Prop1Result& r) {
  return {{"regularity_case", r.regularity_case},
          {"prices", prices_matrix(r.prices)},
          {"params", params_to_json(r.params)},
          {"pooled_garp", verdict_to_json(r.pooled, r.prices.observations())}};
}

json prop2_to_json(const constructions::Prop2Result& r) {
  const std::size_t t_count = r.prices.observations(), k = r.prices.goods();
  json pbar = json::array();
  for (std::size_t t = 0; t < t_count; ++t) {
    pbar.push_back(vector_to_json(std::span<const Rational>(r.pbar).subspan(t * k, k)));
  }
  json demands = json::array();
  for (std::size_t i = 0; i < r.prices.consumers(); ++i) {
    json row = json::array();
    for (std::size_t t = 0; t < t_count; ++t) row.push_back(vector_to_json(r.demands[i * t_count + t].values()));
    demands.push_back(std::move(row));
  }
  return {{"pbar", std::move(pbar)},
          {"demands", std::move(demands)},
          {"prices", prices_matrix(r.prices)},
          {"params", params_to_json(r.params)},
          {"pooled_garp", verdict_to_json(r.pooled, t_count)}};
}

json invariance_to_json(std::span<const constructions::InvarianceReport> reports) {
  json out = json::array();
  for (const auto& r : reports) {
    out.push_back({{"consumer", r.consumer + 1},
                   {"scaled", verdict_to_json(r.scaled)},
                   {"benchmark", verdict_to_json(r.benchmark)},
                   {"graphs_identical", r.graphs_identical}});
  }
  return out;
}

json prop4_to_json(const constructions::Prop4Result& r, std::size_t observations) {
  return {{"scale", scale_to_json(r.scale)},
          {"aggregate_scale", rational_to_json(r.aggregate_scale)},
          {"prices", prices_matrix(r.prices)},
          {"params", params_to_json(r.params)},
          {"cross_edges_eliminated", r.cross_edges_eliminated},
          {"pooled_garp", verdict_to_json(r.pooled, observations)}};
}

json prop6_to_json(const constructions::Prop6Result& r, std::size_t observations) {
  json systems = json::array();
  for (const auto& f : r.systems) systems.push_back(price_system_to_json(f));
  return {{"scale", scale_to_json(r.scale)},
          {"systems", std::move(systems)},
          {"params", params_to_json(r.params)},
          {"cross_edges_eliminated", r.cross_edges_eliminated},
          {"pooled_gapp", verdict_to_json(r.pooled_gapp, observations)}};
}

json sorting_to_json(const SortingFunction& s) {
  json out = json::array();
  for (const auto& row : s.assignment()) out.push_back(indices_to_json(row));
  return out;
}

json rum_verdict_to_json(const rum::RumVerdict& v) {
  json out{{"status", rum::to_string(v.status)},
           {"sorting", v.sorting ? sorting_to_json(*v.sorting) : json(nullptr)},
           {"explored_nodes", v.explored_nodes}};
  if (v.refutation) {
    json entries = json::array();
    for (const auto& e : *v.refutation) {
      entries.push_back({{"sorting", sorting_to_json(e.sorting)},
                         {"type", e.type + 1},
                         {"witness", indices_to_json(e.witness)}});
    }
    out["refutation"] = std::move(entries);
  } else if (v.status == rum::Status::not_rationalizable) {
    out["refutation"] = "exhausted search without witness";
  } else {
    out["refutation"] = nullptr;
  }
  return out;
}

json rpm_certificate_to_json(const rum::RpmCertificate& c, std::size_t observations) {
  return {{"scale", scale_to_json(c.scales)},
          {"weights", vector_to_json(c.weights)},
          {"weighted_scale_sum", rational_to_json(c.weighted_scale_sum)},
          {"utility", c.utility ? afriat_to_json(*c.utility) : json(nullptr)},
          {"pooled", verdict_to_json(c.pooled, observations)}};
}

json patches_to_json(const rum::PatchDecomposition& d) {
  json patches = json::array();
  for (std::size_t l = 0; l < d.patches.size(); ++l) {
    const auto& p = d.patches[l];
    std::string signs;
    for (int s : p.signs) signs += s < 0 ? '-' : (s > 0 ? '+' : '0');
    patches.push_back({{"signs", signs},
                       {"on_budgets", indices_to_json(p.on_budgets)},
                       {"representative", vector_to_json(p.representative)},
                       {"pi", vector_to_json(d.pi[l])}});
  }
  return {{"count", d.patches.size()}, {"patches", std::move(patches)}};
}

json one_good_to_json(const rum::OneGoodResult& r) {
  json pairs = json::array();
  for (const auto& f : r.pairs) {
    auto opt = [](const std::optional<Rational>& v) -> json {
      return v ? rational_to_json(*v) : json(nullptr);
    };
    pairs.push_back({{"agent", f.agent + 1},
                     {"observations", json::array({f.t + 1, f.t2 + 1})},
                     {"band", json::array({opt(f.band_lo), opt(f.band_hi)})},
                     {"ratio_interval", json::array({rational_to_json(f.ratio_lo), rational_to_json(f.ratio_hi)})}});
  }
  json out{{"outcome", rum::to_string(r.outcome)},
           {"method", r.method},
           {"triple", indices_to_json(r.triple)},
           {"pairs", std::move(pairs)},
           {"trace", r.trace},
           {"explored_nodes", r.explored_nodes},
           {"consistent_prices", nullptr}};
  if (r.consistent_prices) {
    json rows = json::array();
    for (const auto& row : *r.consistent_prices) rows.push_back(vector_to_json(row));
    out["consistent_prices"] = std::move(rows);
  }
  return out;
}

}  // namespace hetprice::io
