#include "hetprice_cli/cli.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hetprice/aggregators.hpp"
#include "hetprice/behavioral.hpp"
#include "hetprice/constructions.hpp"
#include "hetprice/errors.hpp"
#include "hetprice/io.hpp"
#include "hetprice/revpref.hpp"
#include "hetprice/rum.hpp"
#include "hetprice/serialize.hpp"
#include "hetprice/synth.hpp"

namespace hetprice::cli {

namespace {

using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

struct Options {
  std::string panel, prices_csv, cross_section, aggregate, spec;
  std::string aggregator = "arithmetic";
  std::string phi = "misperception";
  std::string scale_set;
  std::string lambda;
  std::size_t consumer = 0;  // one-based; zero means every consumer
  std::size_t good = 1;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::uint64_t search_budget = 0;  // zero means the command's default
  std::string out;
  bool timing = false;
  bool pooled = false;
  bool geometric = false;
  // synth
  std::string family = "cobb_douglas";
  std::string kind = "panel";
  std::size_t consumers = 2, observations = 4, goods = 3;
};

struct Outcome {
  int code = kSatisfied;
  json result;
};

// Collects every input file read so the report can name its inputs.
class Inputs {
 public:
  std::string read(const std::string& path) {
    std::string text = io::read_file(path);
    bytes_ += text;
    return text;
  }
  std::string digest() const {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(bytes_.data(), bytes_.size(), md, &len, EVP_sha256(), nullptr);
    static const char* hex = "0123456789abcdef";
    std::string out = "sha256:";
    for (unsigned int j = 0; j < len; ++j) {
      out += hex[md[j] >> 4];
      out += hex[md[j] & 15];
    }
    return out;
  }

 private:
  std::string bytes_;
};

PanelDataset load_panel(const Options& o, Inputs& in) {
  if (o.panel.empty()) throw ConfigError("--panel is required");
  if (!o.prices_csv.empty()) {
    std::string e = in.read(o.panel);
    return io::panel_from_csv(e, in.read(o.prices_csv));
  }
  return io::panel_from_json(io::parse_json_text(in.read(o.panel)));
}

CrossSection load_cross_section(const Options& o, Inputs& in) {
  if (o.cross_section.empty()) throw ConfigError("--cross-section is required");
  return io::cross_section_from_json(io::parse_json_text(in.read(o.cross_section)));
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// One-based comma list to zero-based indices; all goods when empty.
std::vector<std::size_t> parse_goods(const std::string& text, std::size_t k) {
  std::vector<std::size_t> out;
  if (text.empty()) {
    for (std::size_t j = 0; j < k; ++j) out.push_back(j);
    return out;
  }
  for (const auto& item : split(text, ',')) {
    std::size_t g = 0;
    try {
      g = std::stoul(item);
    } catch (const std::exception&) {
      throw ConfigError("--scale-set entries must be good numbers, got '" + item + "'");
    }
    if (g == 0 || g > k) throw ConfigError("--scale-set entry " + item + " is out of range");
    if (std::find(out.begin(), out.end(), g - 1) != out.end()) throw ConfigError("--scale-set repeats good " + item);
    out.push_back(g - 1);
  }
  return out;
}

RationalVector parse_rationals(const std::string& text) {
  RationalVector out;
  for (const auto& item : split(text, ',')) out.push_back(Rational::parse(item));
  return out;
}

std::vector<std::size_t> chosen_consumers(const Options& o, std::size_t n) {
  if (o.consumer > n) throw ConfigError("--consumer is out of range");
  if (o.consumer != 0) return {o.consumer - 1};
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  return all;
}

rum::SearchOptions search_options(const Options& o) {
  rum::SearchOptions s;
  if (o.search_budget != 0) s.node_budget = o.search_budget;
  s.threads = std::max(1u, o.threads);
  return s;
}

int rum_code(rum::Status s) {
  switch (s) {
    case rum::Status::rationalizable: return kSatisfied;
    case rum::Status::not_rationalizable: return kRefuted;
    case rum::Status::unknown: return kUnknown;
  }
  return kUnknown;
}

// Largest |W(p^{.,t}_k) - pbar^t_k| / pbar^t_k over all (t, k).
json consistency_audit(const PanelDataset& panel, const HeterogeneousPrices& prices,
                       const constructions::AggregatorGrid& grid) {
  Rational worst(0);
  for (std::size_t t = 0; t < panel.observations(); ++t) {
    for (std::size_t k = 0; k < panel.goods(); ++k) {
      RationalVector column;
      for (std::size_t i = 0; i < panel.consumers(); ++i) column.push_back(prices.at(i, t)[k]);
      Rational gap = (aggregators::eval(grid.at(t, k), column) - panel.pbar(t)[k]).abs() / panel.pbar(t)[k];
      worst = std::max(worst, gap);
    }
  }
  return {{"max_relative_residual", io::rational_to_json(worst)},
          {"exact", worst.is_zero()},
          {"within_tolerance", worst <= aggregators::solver_tolerance()}};
}

Outcome cmd_garp(const Options& o, Inputs& in) {
  PanelDataset panel = load_panel(o, in);
  Outcome out;
  if (o.pooled) {
    std::vector<revpref::Observation> obs;
    for (std::size_t i = 0; i < panel.consumers(); ++i) {
      auto oi = revpref::observations_at_pbar(panel, i);
      obs.insert(obs.end(), oi.begin(), oi.end());
    }
    auto v = revpref::check_garp(obs);
    out.code = v.satisfied ? kSatisfied : kRefuted;
    out.result = {{"pooled", io::verdict_to_json(v, panel.observations())}, {"satisfied", v.satisfied}};
    return out;
  }
  json rows = json::array();
  bool all = true;
  for (std::size_t i : chosen_consumers(o, panel.consumers())) {
    auto v = revpref::check_garp(revpref::observations_at_pbar(panel, i));
    all = all && v.satisfied;
    rows.push_back({{"consumer", i + 1}, {"garp", io::verdict_to_json(v)}});
  }
  out.code = all ? kSatisfied : kRefuted;
  out.result = {{"consumers", std::move(rows)}, {"satisfied", all}};
  return out;
}

Outcome cmd_gapp(const Options& o, Inputs& in) {
  PanelDataset panel = load_panel(o, in);
  const std::size_t n = panel.consumers(), t_count = panel.observations();
  std::vector<revpref::PricedBundle> data;
  json system_kind = "linear";
  if (!o.lambda.empty()) {
    RationalVector lambda = parse_rationals(o.lambda);
    if (lambda.size() != n) throw ConfigError("--lambda needs one value per consumer");
    auto phi = behavioral::from_key(o.phi);
    auto systems = behavioral::make_price_systems(panel, lambda, phi);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t t = 0; t < t_count; ++t) data.push_back({panel.bundle_at_pbar(i, t), systems[i * t_count + t]});
    }
    system_kind = phi.key();
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      auto d = constructions::linear_priced_bundles(panel, i);
      data.insert(data.end(), d.begin(), d.end());
    }
  }
  Outcome out;
  if (o.pooled) {
    auto v = revpref::check_gapp(data);
    out.code = v.satisfied ? kSatisfied : kRefuted;
    out.result = {{"systems", system_kind}, {"pooled", io::verdict_to_json(v, t_count)}, {"satisfied", v.satisfied}};
    return out;
  }
  json rows = json::array();
  bool all = true;
  for (std::size_t i : chosen_consumers(o, n)) {
    std::span<const revpref::PricedBundle> mine(data.data() + i * t_count, t_count);
    auto v = revpref::check_gapp(mine);
    all = all && v.satisfied;
    rows.push_back({{"consumer", i + 1}, {"gapp", io::verdict_to_json(v)}});
  }
  out.code = all ? kSatisfied : kRefuted;
  out.result = {{"systems", system_kind}, {"consumers", std::move(rows)}, {"satisfied", all}};
  return out;
}

Outcome cmd_afriat(const Options& o, Inputs& in) {
  PanelDataset panel = load_panel(o, in);
  std::size_t i = o.consumer == 0 ? 0 : o.consumer - 1;
  if (i >= panel.consumers()) throw ConfigError("--consumer is out of range");
  auto obs = revpref::observations_at_pbar(panel, i);
  auto v = revpref::check_garp(obs);
  Outcome out;
  out.result = {{"consumer", i + 1}, {"garp", io::verdict_to_json(v)}};
  if (!v.satisfied) {
    out.code = kRefuted;
    return out;
  }
  auto sol = revpref::afriat_construct(obs);
  out.result["afriat"] = io::afriat_to_json(sol);
  out.result["inequalities_hold"] = revpref::afriat_inequalities_hold(sol, obs);
  return out;
}

constructions::AggregatorGrid grid_for(const Options& o, const PanelDataset& panel) {
  if (o.aggregator == "expenditure-harmonic") return constructions::AggregatorGrid::expenditure_weighted_harmonic(panel);
  return constructions::AggregatorGrid::uniform(aggregators::from_name(o.aggregator, panel.consumers()),
                                                panel.observations(), panel.goods());
}

Outcome cmd_prop1(const Options& o, Inputs& in) {
  PanelDataset panel = load_panel(o, in);
  auto grid = grid_for(o, panel);
  auto r = constructions::prop1_rationalize(panel, grid);
  Outcome out;
  out.result = io::prop1_to_json(r);
  out.result["consistency"] = consistency_audit(panel, r.prices, grid);
  return out;
}

Outcome cmd_prop2(const Options& o, Inputs& in) {
  if (o.aggregate.empty()) throw ConfigError("--aggregate is required");
  auto data = io::aggregate_from_json(io::parse_json_text(in.read(o.aggregate)));
  auto r = constructions::prop2_disaggregate(data);
  bool identity = true;
  for (std::size_t t = 0; t < data.observations(); ++t) {
    for (std::size_t k = 0; k < data.goods(); ++k) {
      Rational total(0);
      for (std::size_t i = 0; i < data.consumers(); ++i) total += r.demands[i * data.observations() + t][k];
      identity = identity && total == data.aggregate(t)[k];
    }
  }
  Outcome out;
  out.result = io::prop2_to_json(r);
  out.result["disaggregation_identity"] = identity;
  return out;
}

Outcome cmd_prop3(const Options& o, Inputs& in) {
  PanelDataset panel = load_panel(o, in);
  const std::size_t n = panel.consumers(), k = panel.goods();
  auto goods = parse_goods(o.scale_set, k);
  RationalVector lambda = o.lambda.empty() ? RationalVector(n, Rational(1)) : parse_rationals(o.lambda);
  if (lambda.size() != n) throw ConfigError("--lambda needs one value per consumer");
  RationalVector scales(n * k, Rational(1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t g : goods) scales[i * k + g] = lambda[i];
  }
  auto reports = constructions::check_stable_invariance(panel, scales);
  bool invariant = std::all_of(reports.begin(), reports.end(), [](const auto& r) {
    return r.graphs_identical && r.scaled.satisfied == r.benchmark.satisfied;
  });
  Outcome out;
  out.code = invariant ? kSatisfied : kRefuted;
  out.result = {{"consumers", io::invariance_to_json(reports)}, {"invariant", invariant}};
  return out;
}

Outcome cmd_prop4(const Options& o, Inputs& in) {
  PanelDataset panel = load_panel(o, in);
  auto w = aggregators::from_name(o.aggregator, panel.consumers());
  auto r = constructions::prop4_stable_prices(panel, parse_goods(o.scale_set, panel.goods()), w);
  auto pooled = revpref::pooled_observations(panel, r.prices);
  auto base = revpref::afriat_construct(pooled);
  auto check = constructions::scale_transform_verify(panel, r.scale, base, o.seed);
  Outcome out;
  out.result = io::prop4_to_json(r, panel.observations());
  out.result["utility"] = io::afriat_to_json(base);
  out.result["scale_transform"] = {{"ok", check.ok},
                                   {"points_checked", check.points_checked},
                                   {"failure", check.failure ? json(*check.failure) : json(nullptr)}};
  if (!check.ok) out.code = kRefuted;
  return out;
}

Outcome cmd_prop6(const Options& o, Inputs& in) {
  PanelDataset panel = load_panel(o, in);
  auto phi = behavioral::from_key(o.phi);
  auto w = aggregators::from_name(o.aggregator, panel.consumers());
  auto r = constructions::prop6_au_lambdas(panel, phi, w);
  Outcome out;
  out.result = io::prop6_to_json(r, panel.observations());
  out.result["phi"] = phi.key();
  return out;
}

Outcome cmd_rum(const Options& o, Inputs& in) {
  auto cs = load_cross_section(o, in);
  auto v = rum::rum_check(cs, search_options(o));
  return {rum_code(v.status), {{"rum", io::rum_verdict_to_json(v)}}};
}

Outcome certificate_outcome(const std::pair<rum::RumVerdict, std::optional<rum::RpmCertificate>>& r,
                            std::size_t observations) {
  Outcome out{rum_code(r.first.status), {{"rum", io::rum_verdict_to_json(r.first)}}};
  out.result["certificate"] = r.second ? io::rpm_certificate_to_json(*r.second, observations) : json(nullptr);
  return out;
}

Outcome cmd_rpm(const Options& o, Inputs& in) {
  auto cs = load_cross_section(o, in);
  auto w = aggregators::from_name(o.aggregator, cs.points_per_observation());
  auto r = rum::rpm_check(cs, parse_goods(o.scale_set, cs.goods()), w, search_options(o));
  return certificate_outcome(r, cs.observations());
}

Outcome cmd_au_rum(const Options& o, Inputs& in) {
  auto cs = load_cross_section(o, in);
  auto phi = behavioral::from_key(o.phi);
  auto w = aggregators::from_name(o.aggregator, cs.points_per_observation());
  auto r = rum::au_rum_check(cs, phi, w, search_options(o));
  Outcome out = certificate_outcome(r, cs.observations());
  out.result["phi"] = phi.key();
  return out;
}

Outcome cmd_patches(const Options& o, Inputs& in) {
  auto cs = load_cross_section(o, in);
  if (!o.geometric) return {kSatisfied, {{"mode", "points"}, {"decomposition", io::patches_to_json(rum::compute_patches(cs))}}};
  std::vector<rum::Budget> budgets;
  for (std::size_t t = 0; t < cs.observations(); ++t) budgets.push_back({cs.at(t).pbar, cs.at(t).total});
  return {kSatisfied, {{"mode", "geometric"}, {"decomposition", io::patches_to_json(rum::compute_patches(budgets))}}};
}

Outcome cmd_one_good(const Options& o, Inputs& in) {
  PanelDataset panel = load_panel(o, in);
  if (o.good == 0 || o.good > panel.goods()) throw ConfigError("--good is out of range");
  auto w = aggregators::from_name(o.aggregator, panel.consumers());
  auto r = o.search_budget != 0 ? rum::check_one_good_refutation(panel, o.good - 1, w, o.search_budget)
                                : rum::check_one_good_refutation(panel, o.good - 1, w);
  int code = r.outcome == rum::OneGoodOutcome::refuted       ? kRefuted
             : r.outcome == rum::OneGoodOutcome::not_refuted ? kSatisfied
                                                             : kUnknown;
  return {code, io::one_good_to_json(r)};
}

synth::GeneratorSpec synth_spec(const Options& o, Inputs& in) {
  if (!o.spec.empty()) return synth::spec_from_json(io::parse_json_text(in.read(o.spec)));
  json j{{"family", o.family},
         {"seed", o.seed},
         {"consumers", o.consumers},
         {"observations", o.observations},
         {"goods", o.goods}};
  return synth::spec_from_json(j);
}

void write_text(const Options& o, const std::string& text, std::ostream& out) {
  if (o.out.empty()) {
    out << text << '\n';
    return;
  }
  std::ofstream file(o.out, std::ios::binary);
  if (!file) throw ConfigError("cannot write '" + o.out + "'");
  file << text << '\n';
}

json error_object(const std::string& kind, const std::string& message) {
  return {{"kind", kind}, {"message", message}};
}

json parameters_json(const std::string& command, const Options& o) {
  json p;
  auto put = [&](const char* key, const std::string& v) {
    if (!v.empty()) p[key] = v;
  };
  put("panel", o.panel);
  put("prices_csv", o.prices_csv);
  put("cross_section", o.cross_section);
  put("aggregate", o.aggregate);
  put("spec", o.spec);
  put("scale_set", o.scale_set);
  put("lambda", o.lambda);
  if (command == "prop1" || command == "prop4" || command == "prop6" || command == "rpm" ||
      command == "au-rum" || command == "one-good-refute") {
    p["aggregator"] = o.aggregator;
  }
  if (command == "gapp" || command == "prop6" || command == "au-rum") p["phi"] = o.phi;
  if (o.consumer != 0) p["consumer"] = o.consumer;
  if (command == "one-good-refute") p["good"] = o.good;
  if (o.search_budget != 0) p["search_budget"] = o.search_budget;
  if (o.pooled) p["pooled"] = true;
  if (o.geometric) p["geometric"] = true;
  p["seed"] = o.seed;
  // Thread count is left out on purpose: output must not depend on it.
  return p;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Revealed-preference tests and constructions with heterogeneous prices", "hetprice"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  auto common = [&](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "Seed for every random choice")->capture_default_str();
    sub->add_option("--threads", o.threads, "Worker threads; results do not depend on this");
    sub->add_option("--out", o.out, "Write the report to this file instead of stdout");
    sub->add_flag("--timing", o.timing, "Include wall-clock time in the report");
  };
  auto panel_opts = [&](CLI::App* sub) {
    sub->add_option("--panel", o.panel, "Panel JSON, or expenditure CSV with --prices-csv")->required();
    sub->add_option("--prices-csv", o.prices_csv, "Price CSV: rows t,p_1..p_K");
  };
  auto cs_opts = [&](CLI::App* sub) {
    sub->add_option("--cross-section", o.cross_section, "Cross-section JSON")->required();
    sub->add_option("--search-budget", o.search_budget, "Node budget for the sorting search");
  };

  std::map<std::string, std::function<Outcome(const Options&, Inputs&)>> handlers;
  auto add = [&](const std::string& name, const std::string& help,
                 std::function<Outcome(const Options&, Inputs&)> fn) {
    CLI::App* sub = app.add_subcommand(name, help);
    common(sub);
    handlers[name] = std::move(fn);
    return sub;
  };

  auto* garp = add("garp", "GARP for each consumer at the benchmark prices", cmd_garp);
  panel_opts(garp);
  garp->add_option("--consumer", o.consumer, "One-based consumer; all when omitted");
  garp->add_flag("--pooled", o.pooled, "Test all consumers as one preference");

  auto* gapp = add("gapp", "GAPP with linear or behavioral price systems", cmd_gapp);
  panel_opts(gapp);
  gapp->add_option("--consumer", o.consumer, "One-based consumer; all when omitted");
  gapp->add_option("--phi", o.phi, "Behavioral expenditure key, used with --lambda");
  gapp->add_option("--lambda", o.lambda, "Comma list of per-consumer scales");
  gapp->add_flag("--pooled", o.pooled, "Test all consumers as one augmented utility");

  auto* afriat = add("afriat", "Afriat utility for one consumer", cmd_afriat);
  panel_opts(afriat);
  afriat->add_option("--consumer", o.consumer, "One-based consumer (default 1)");

  auto* prop1 = add("prop1", "Consistent heterogeneous prices in two goods", cmd_prop1);
  panel_opts(prop1);
  prop1->add_option("--aggregator", o.aggregator, "arithmetic | harmonic | geometric | expenditure-harmonic");

  auto* prop2 = add("prop2", "Disaggregate aggregate demand", cmd_prop2);
  prop2->add_option("--aggregate", o.aggregate, "Aggregate-demand JSON")->required();

  auto* prop3 = add("prop3-check", "GARP invariance under stable scales", cmd_prop3);
  panel_opts(prop3);
  prop3->add_option("--scale-set", o.scale_set, "One-based goods to scale; all when omitted");
  prop3->add_option("--lambda", o.lambda, "Comma list of per-consumer scales");

  auto* prop4 = add("prop4", "Stable scales rationalizing the pooled panel", cmd_prop4);
  panel_opts(prop4);
  prop4->add_option("--scale-set", o.scale_set, "One-based goods to scale; all when omitted");
  prop4->add_option("--aggregator", o.aggregator, "arithmetic | harmonic | geometric");

  auto* prop6 = add("prop6", "Scales for augmented utility with behavioral expenditure", cmd_prop6);
  panel_opts(prop6);
  prop6->add_option("--phi", o.phi, "misperception | reference:max1 | reference:square | reference:inverse-max1");
  prop6->add_option("--aggregator", o.aggregator, "arithmetic | harmonic | geometric");

  auto* rum_cmd = add("rum", "Sorting search for heterogeneous preferences", cmd_rum);
  cs_opts(rum_cmd);

  auto* rpm = add("rpm", "Sorting search plus stable price certificate", cmd_rpm);
  cs_opts(rpm);
  rpm->add_option("--scale-set", o.scale_set, "One-based goods to scale; all when omitted");
  rpm->add_option("--aggregator", o.aggregator, "arithmetic | harmonic | geometric");

  auto* au = add("au-rum", "Sorting search under GAPP plus behavioral scales", cmd_au_rum);
  cs_opts(au);
  au->add_option("--phi", o.phi, "Behavioral expenditure key");
  au->add_option("--aggregator", o.aggregator, "arithmetic | harmonic | geometric");

  auto* patches = add("patches", "Sign-vector patches of the budget hyperplanes", cmd_patches);
  patches->add_option("--cross-section", o.cross_section, "Cross-section JSON")->required();
  patches->add_flag("--geometric", o.geometric, "Enumerate from the budgets alone (at most four goods)");

  auto* one = add("one-good-refute", "Can heterogeneity in one good's price alone explain the panel?",
                  cmd_one_good);
  panel_opts(one);
  one->add_option("--good", o.good, "One-based good")->capture_default_str();
  one->add_option("--aggregator", o.aggregator, "arithmetic | harmonic | geometric");
  one->add_option("--search-budget", o.search_budget, "Node budget for the grid fallback");

  auto* synth_cmd = app.add_subcommand("synth", "Write a generated dataset document");
  synth_cmd->add_option("--spec", o.spec, "Generator spec JSON");
  synth_cmd->add_option("--family", o.family, "cobb_douglas | leontief | violation | arbitrary");
  synth_cmd->add_option("--kind", o.kind, "panel | cross-section | aggregate");
  synth_cmd->add_option("--consumers", o.consumers);
  synth_cmd->add_option("--observations", o.observations);
  synth_cmd->add_option("--goods", o.goods);
  synth_cmd->add_option("--seed", o.seed);
  synth_cmd->add_option("--out", o.out, "Write the document to this file instead of stdout");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  std::string command;
  try {
    app.parse(reversed);
    command = app.get_subcommands().front()->get_name();
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kSatisfied;
    }
    json report{{"schema", 1}, {"error", error_object("UsageError", e.what())}, {"exit_code", kInputError}};
    out << report.dump(2) << '\n';
    return kInputError;
  }

  Inputs inputs;
  if (command == "synth") {
    try {
      auto spec = synth_spec(o, inputs);
      json doc;
      if (o.kind == "panel") doc = io::panel_to_json(synth::generate_panel(spec));
      else if (o.kind == "cross-section") doc = io::cross_section_to_json(synth::generate_cross_section(spec));
      else if (o.kind == "aggregate") doc = io::aggregate_to_json(synth::generate_aggregate(spec));
      else throw ConfigError("--kind must be panel, cross-section or aggregate");
      write_text(o, doc.dump(2), out);
      return kSatisfied;
    } catch (const Error& e) {
      json report{{"schema", 1}, {"command", command}, {"error", error_object(e.kind(), e.what())},
                  {"exit_code", kInputError}};
      out << report.dump(2) << '\n';
      return kInputError;
    }
  }

  json report{{"schema", 1}, {"command", command}, {"version", kVersion},
              {"parameters", parameters_json(command, o)}};
  int code = kSatisfied;
  auto start = std::chrono::steady_clock::now();
  try {
    Outcome outcome = handlers.at(command)(o, inputs);
    code = outcome.code;
    report["result"] = std::move(outcome.result);
  } catch (const PreconditionError& e) {
    json obj = error_object(e.kind(), e.what());
    if (e.consumer()) obj["consumer"] = *e.consumer() + 1;
    if (e.witness()) {
      json w = json::array();
      for (std::size_t t : *e.witness()) w.push_back(t + 1);
      obj["witness"] = std::move(w);
    }
    // A witness means the data refute the hypothesis; otherwise the input is unusable.
    code = e.witness() ? kRefuted : kInputError;
    report["error"] = std::move(obj);
  } catch (const GarpViolation& e) {
    json obj = error_object(e.kind(), e.what());
    json w = json::array();
    for (std::size_t t : e.witness()) w.push_back(t + 1);
    obj["witness"] = std::move(w);
    code = kRefuted;
    report["error"] = std::move(obj);
  } catch (const NotRumRationalizable& e) {
    code = kRefuted;
    report["error"] = error_object(e.kind(), e.what());
  } catch (const SearchBudgetExceeded& e) {
    code = kUnknown;
    report["error"] = error_object(e.kind(), e.what());
  } catch (const Error& e) {
    code = kInputError;
    report["error"] = error_object(e.kind(), e.what());
  } catch (const json::exception& e) {
    code = kInputError;
    report["error"] = error_object("SchemaError", e.what());
  } catch (const std::exception& e) {
    code = kInputError;
    report["error"] = error_object("InternalError", e.what());
  }
  report["input_digest"] = inputs.digest();
  report["exit_code"] = code;
  if (o.timing) {
    auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start);
    report["wall_clock_ms"] = elapsed.count();
  }
  try {
    write_text(o, report.dump(2), out);
  } catch (const Error& e) {
    err << e.what() << '\n';
    return kInputError;
  }
  return code;
}

}  // namespace hetprice::cli
