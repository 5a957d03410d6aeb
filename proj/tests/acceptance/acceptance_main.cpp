// One PASS/FAIL line per acceptance criterion; exit status is the number of
// failures.
#include <chrono>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "hetprice/constructions.hpp"
#include "hetprice/errors.hpp"
#include "hetprice/fixtures.hpp"
#include "hetprice/rum.hpp"
#include "hetprice/synth.hpp"
#include "hetprice_cli/cli.hpp"
#include "oracles.hpp"

using namespace hetprice;
using aggregators::AggregatorSpec;

namespace {

struct Check {
  bool ok = true;
  std::string why;
  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      why = what;
    }
  }
};

int failures = 0;

void criterion(int id, const char* name, double limit_seconds, const std::function<void(Check&)>& body) {
  Check c;
  auto start = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.require(false, std::string("exception: ") + e.what());
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ostringstream limit;
  limit << secs << "s of " << limit_seconds << "s";
  c.require(secs < limit_seconds, "time limit exceeded (" + limit.str() + ")");
  std::cout << (c.ok ? "PASS" : "FAIL") << " " << id << " " << name << " [" << limit.str() << "]";
  if (!c.ok) {
    std::cout << ": " << c.why;
    ++failures;
  }
  std::cout << '\n';
}

std::string tag(const char* what, std::uint64_t seed) { return std::string(what) + " seed " + std::to_string(seed); }

synth::GeneratorSpec sized(synth::Family f, std::uint64_t seed, std::size_t n, std::size_t t, std::size_t k) {
  synth::GeneratorSpec s;
  s.family = f;
  s.seed = seed;
  s.consumers = n;
  s.observations = t;
  s.goods = k;
  return s;
}

RationalVector column(const HeterogeneousPrices& p, std::size_t t, std::size_t k) {
  RationalVector out;
  for (std::size_t i = 0; i < p.consumers(); ++i) out.push_back(p.at(i, t)[k]);
  return out;
}

// Weak direct edge from (j,s) to (i,t) with j < i in the pooled data.
bool forbidden_linear_edge(const std::vector<revpref::Observation>& obs, std::size_t n, std::size_t t_count) {
  auto c = oracle::cost_table(obs);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = j + 1; i < n; ++i)
      for (std::size_t s = 0; s < t_count; ++s)
        for (std::size_t t = 0; t < t_count; ++t) {
          std::size_t a = j * t_count + s, b = i * t_count + t;
          if (c[a][a] >= c[a][b]) return true;
        }
  return false;
}

void example_refutation(Check& c) {
  std::ostringstream out, err;
  int code = cli::run({"one-good-refute", "--panel", std::string(HETPRICE_DATA_DIR) + "/four_good_example.json",
                       "--good", "1"},
                      out, err);
  c.require(code == cli::kRefuted, "exit code " + std::to_string(code));
  auto report = nlohmann::json::parse(out.str());
  const auto& result = report.at("result");
  c.require(result.at("outcome") == "refuted", "outcome is not refuted");
  c.require(result.at("method") == "interval", "not settled by the interval argument");
  c.require(!result.at("pairs").empty(), "no forced pairs in the trace");
  for (const auto& p : result.at("pairs")) {
    Rational lo = Rational::parse(p.at("band")[0].get<std::string>());
    Rational hi = Rational::parse(p.at("band")[1].get<std::string>());
    Rational rlo = Rational::parse(p.at("ratio_interval")[0].get<std::string>());
    Rational rhi = Rational::parse(p.at("ratio_interval")[1].get<std::string>());
    c.require(lo == Rational(1, 5) && hi == Rational(5), "band is not (1/5, 5)");
    c.require(rlo == Rational(1, 2) && rhi == Rational(2), "ratio interval is not (1/2, 2)");
    c.require(lo <= rlo && rhi <= hi, "ratio interval escapes the band");
  }
}

void prop1_totality(Check& c) {
  auto audit = [&](const PanelDataset& panel, const std::string& label) {
    auto grid = constructions::AggregatorGrid::uniform(AggregatorSpec::arithmetic(), panel.observations(), panel.goods());
    auto r = constructions::prop1_rationalize(panel, grid);
    auto pooled = revpref::pooled_observations(panel, r.prices);
    c.require(revpref::check_garp(pooled).satisfied, label + ": pooled GARP fails");
    c.require(r.params.all_bounds_hold(), label + ": bound log fails");
    const Rational n(static_cast<long>(panel.consumers()));
    for (std::size_t t = 0; t < panel.observations(); ++t)
      for (std::size_t k = 0; k < panel.goods(); ++k)
        c.require(sum(column(r.prices, t, k)) / n == panel.pbar(t)[k], label + ": arithmetic mean differs from pbar");
  };
  audit(fixtures::four_good_example(), "example");
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::size_t n = 1 + seed % 4, t = 1 + (seed / 4) % 4, k = 2 + (seed / 16) % 3;
    audit(synth::generate_panel(sized(synth::Family::cobb_douglas, seed, n, t, k)), tag("cobb_douglas", seed));
    audit(synth::generate_panel(sized(synth::Family::arbitrary, seed, n, t, k)), tag("arbitrary", seed));
  }
  // Harmonic residual equations on a subset.
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto panel = synth::generate_panel(sized(synth::Family::arbitrary, seed, 2 + seed % 3, 3, 3));
    auto w = AggregatorSpec::harmonic_mean(panel.consumers());
    auto grid = constructions::AggregatorGrid::uniform(w, 3, 3);
    auto r = constructions::prop1_rationalize(panel, grid);
    c.require(revpref::check_garp(revpref::pooled_observations(panel, r.prices)).satisfied, tag("harmonic", seed));
    for (std::size_t t = 0; t < 3; ++t)
      for (std::size_t k = 0; k < 3; ++k) {
        Rational rel = (aggregators::eval(w, column(r.prices, t, k)) - panel.pbar(t)[k]).abs() / panel.pbar(t)[k];
        c.require(rel <= Rational::pow2(-60), tag("harmonic residual", seed));
      }
  }
}

void prop2_identity(Check& c) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto data = synth::generate_aggregate(sized(synth::Family::cobb_douglas, seed, 1 + seed % 4, 1 + (seed / 4) % 4,
                                                2 + (seed / 16) % 3));
    auto r = constructions::prop2_disaggregate(data);
    const std::size_t n = data.consumers(), t_count = data.observations(), k_count = data.goods();
    for (std::size_t t = 0; t < t_count; ++t)
      for (std::size_t k = 0; k < k_count; ++k) {
        Rational total(0);
        for (std::size_t i = 0; i < n; ++i) total += r.demands[i * t_count + t][k];
        c.require(total == data.aggregate(t)[k], tag("sum differs from xbar", seed));
      }
    PanelDataset panel(n, t_count, k_count, data.raw_expenditures(), r.pbar);
    c.require(revpref::check_garp(revpref::pooled_observations(panel, r.prices)).satisfied, tag("pooled GARP", seed));
  }
}

void prop3_invariance(Check& c) {
  const Rational choices[] = {Rational(1, 3), Rational(1, 2), Rational(2), Rational(5)};
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    PanelDataset panel = seed % 4 == 0
                             ? synth::generate_panel(sized(synth::Family::violation, seed, 2, 3, 3))
                             : oracle::random_panel(seed, 2, 3, 3);
    RationalVector scales;
    for (std::size_t j = 0; j < 6; ++j) scales.push_back(choices[(seed * 7 + j * 3) % 4]);
    for (const auto& r : constructions::check_stable_invariance(panel, scales)) {
      c.require(r.graphs_identical, tag("graphs differ", seed));
      c.require(r.scaled.satisfied == r.benchmark.satisfied, tag("verdicts differ", seed));
      auto scaled = oracle::at_prices(panel, r.consumer, [&](std::size_t t) {
        RationalVector p;
        for (std::size_t k = 0; k < 3; ++k) p.push_back(scales[r.consumer * 3 + k] * panel.pbar(t)[k]);
        return p;
      });
      auto bench = oracle::at_prices(panel, r.consumer, [&](std::size_t t) {
        return RationalVector(panel.pbar(t).begin(), panel.pbar(t).end());
      });
      c.require(oracle::garp_by_chains(scaled) == oracle::garp_by_chains(bench), tag("oracle verdicts differ", seed));
      c.require(oracle::garp_by_chains(bench) == r.benchmark.satisfied, tag("library disagrees with oracle", seed));
    }
  }
}

void prop4_pipeline(Check& c) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    std::size_t n = 2 + seed % 3, t_count = 2 + (seed / 3) % 3, k = 2 + seed % 2;
    auto panel = synth::generate_panel(sized(synth::Family::cobb_douglas, seed, n, t_count, k));
    std::vector<std::size_t> goods{0};
    if (seed % 2) goods.push_back(1);
    auto r = constructions::prop4_stable_prices(panel, goods, AggregatorSpec::arithmetic());
    c.require(sum(r.scale.lambda) == Rational(static_cast<long>(n)), tag("W(lambda) != 1", seed));
    auto pooled = revpref::pooled_observations(panel, r.prices);
    c.require(!forbidden_linear_edge(pooled, n, t_count), tag("forbidden cross edge", seed));
    c.require(revpref::check_garp(pooled).satisfied, tag("pooled GARP", seed));
    auto base = revpref::afriat_construct(pooled);
    c.require(oracle::afriat_ok(base, pooled), tag("Afriat inequalities", seed));
    c.require(constructions::scale_transform_verify(panel, r.scale, base, seed).ok, tag("scale transform", seed));
  }
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto spec = sized(synth::Family::violation, seed, 3, 3, 3);
    spec.violator = seed % 3;
    auto panel = synth::generate_panel(spec);
    try {
      constructions::prop4_stable_prices(panel, {0, 1}, AggregatorSpec::arithmetic());
      c.require(false, tag("violating panel accepted", seed));
    } catch (const PreconditionError& e) {
      c.require(e.consumer() == std::optional<std::size_t>(spec.violator), tag("wrong consumer blamed", seed));
      c.require(e.witness() && revpref::witness_replays(
                                   revpref::direct_relations(revpref::observations_at_pbar(panel, spec.violator)),
                                   *e.witness()),
                tag("witness does not replay", seed));
    }
  }
}

void rum_rpm(Check& c) {
  auto neg = fixtures::crossing_negative();
  auto v = rum::rum_check(neg);
  c.require(v.status == rum::Status::not_rationalizable, "negative instance not refuted");
  c.require(v.refutation && v.refutation->size() == 2, "refutation does not list 2 matchings");
  if (v.refutation) {
    for (const auto& e : *v.refutation) {
      auto obs = revpref::observations_at_pbar(sorted_panel(neg, e.sorting), e.type);
      c.require(revpref::witness_replays(revpref::direct_relations(obs), e.witness), "witness does not replay");
    }
  }
  c.require(!oracle::rum_by_enumeration(neg), "oracle finds a sorting");

  auto pos = fixtures::crossing_positive();
  auto [pv, cert] = rum::rpm_check(pos, {0, 1}, AggregatorSpec::arithmetic());
  c.require(pv.status == rum::Status::rationalizable && pv.sorting.has_value(), "positive instance not sorted");
  c.require(cert.has_value(), "no certificate");
  if (cert && pv.sorting) {
    auto panel = sorted_panel(pos, *pv.sorting);
    auto prices = HeterogeneousPrices::stable(panel, cert->scales.matrix(pos.goods()));
    c.require(oracle::garp_by_chains(revpref::pooled_observations(panel, prices)), "pooled scaled data fail GARP");
    Rational s(0);
    for (std::size_t i = 0; i < cert->weights.size(); ++i) s += cert->weights[i] * cert->scales.lambda[i];
    c.require(s == Rational(1), "sum of w_i lambda_i is not 1");
  }
}

void prop6_pipeline(Check& c) {
  for (const char* key : {"misperception", "reference:max1"}) {
    auto phi = behavioral::from_key(key);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      std::size_t n = 2 + seed % 2, t_count = 2 + seed % 2;
      auto panel = synth::generate_panel(sized(synth::Family::cobb_douglas, seed, n, t_count, 2));
      auto r = constructions::prop6_au_lambdas(panel, phi, AggregatorSpec::arithmetic());
      std::vector<revpref::PricedBundle> d;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t t = 0; t < t_count; ++t) d.push_back({panel.bundle_at_pbar(i, t), r.systems[i * t_count + t]});
      c.require(oracle::gapp_by_chains(d), tag(key, seed) + ": pooled GAPP fails");
      // The construction rules out f^{j,s} over f^{i,t} for j > i.
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
          for (std::size_t s = 0; s < t_count; ++s)
            for (std::size_t t = 0; t < t_count; ++t) {
              const auto& from = d[j * t_count + s];
              const auto& to = d[i * t_count + t];
              c.require(from.f(to.x) > to.f(to.x), tag(key, seed) + ": forbidden price-preference edge");
            }
    }
    auto bad = synth::generate_panel(sized(synth::Family::violation, 1, 2, 2, 2));
    try {
      constructions::prop6_au_lambdas(bad, phi, AggregatorSpec::arithmetic());
      c.require(false, std::string(key) + ": violating panel accepted");
    } catch (const PreconditionError& e) {
      c.require(e.witness().has_value(), std::string(key) + ": rejection without witness");
    }
  }
}

void patches(Check& c) {
  auto mass_ok = [](const rum::PatchDecomposition& d, std::size_t t_count) {
    for (std::size_t t = 0; t < t_count; ++t) {
      Rational total(0);
      for (const auto& row : d.pi) total += row[t];
      if (total != Rational(1)) return false;
    }
    return true;
  };
  std::vector<rum::Budget> crossing{{{1, 2}, 4}, {{2, 1}, 4}};
  auto d = rum::compute_patches(crossing);
  c.require(d.patches.size() == 5, "crossing budgets: " + std::to_string(d.patches.size()) + " patches");
  c.require(mass_ok(d, 2), "crossing budgets: mass per budget is not 1");
  std::vector<rum::Budget> parallel{{{1, 1}, 2}, {{1, 1}, 4}};
  auto p = rum::compute_patches(parallel);
  c.require(p.patches.size() == 2 && mass_ok(p, 2), "parallel budgets");
  std::vector<rum::Budget> single{{{1, 3}, 2}};
  auto s = rum::compute_patches(single);
  c.require(s.patches.size() == 1 && mass_ok(s, 1), "single budget");
}

void oracle_cross_check(Check& c) {
  int violations = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::size_t n = 1 + seed % 3, t_count = seed % 3 == 2 ? 2 : 3, k = 2 + seed % 2;
    auto panel = oracle::random_panel(seed, n, t_count, k);
    std::vector<revpref::Observation> obs;
    for (std::size_t i = 0; i < n; ++i) {
      auto own = revpref::observations_at_pbar(panel, i);
      obs.insert(obs.end(), own.begin(), own.end());
    }
    bool expected = oracle::garp_by_chains(obs);
    auto v = revpref::check_garp(obs);
    c.require(v.satisfied == expected, tag("verdict differs", seed));
    if (!v.satisfied) {
      ++violations;
      c.require(v.witness && revpref::witness_replays(revpref::direct_relations(obs), *v.witness),
                tag("witness does not replay", seed));
    }
  }
  c.require(violations > 0 && violations < 100, "sample does not exercise both verdicts");
}

}  // namespace

int main() {
  criterion(1, "four-good example one-good refutation", 1, example_refutation);
  criterion(2, "prop1 totality", 10, prop1_totality);
  criterion(3, "prop2 identity", 5, prop2_identity);
  criterion(4, "prop3 invariance", 5, prop3_invariance);
  criterion(5, "prop4 pipeline", 30, prop4_pipeline);
  criterion(6, "rum/rpm equivalence", 1, rum_rpm);
  criterion(7, "prop6 pipeline", 30, prop6_pipeline);
  criterion(8, "patches", 1, patches);
  criterion(9, "oracle cross-check", 5, oracle_cross_check);
  return failures;
}
