#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "oracles.hpp"
#include "seedscope/perf_metrics.hpp"
#include "seedscope/rng.hpp"
#include "seedscope/synth.hpp"

using namespace seedscope;

namespace {

double sample_variance(const std::vector<double>& x) {
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  double sum = 0.0;
  for (double v : x) sum += (v - mean) * (v - mean);
  return sum / static_cast<double>(x.size() - 1);
}

AlphaConfig light_alpha() {
  AlphaConfig cfg;
  cfg.n_bootstrap = 10;
  cfg.rng_seed = 1;
  return cfg;
}

}  // namespace

TEST_SUITE("synth") {
  TEST_CASE("presets and validation") {
    CHECK(synth_preset_names().size() == 3);
    for (const auto& name : synth_preset_names()) CHECK(synth_preset(name).has_value());
    CHECK(!synth_preset("cifar").has_value());
    CHECK(parse_family("logistic-teacher") == GeneratorFamily::logistic_teacher);
    CHECK(to_string(GeneratorFamily::gaussian_mixture) == "gaussian-mixture");
    SynthSpec bad;
    bad.point_jitter = -1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = SynthSpec{};
    bad.n_models = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = SynthSpec{};
    bad.label_noise = 1.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  }

  TEST_CASE("zero jitter gives identical models") {
    for (auto family : {GeneratorFamily::gaussian_mixture, GeneratorFamily::logistic_teacher}) {
      SynthSpec spec;
      spec.family = family;
      spec.n_models = 6;
      spec.n_test = 300;
      const auto pool = generate_pool(spec);
      for (const auto& model : pool.models()) CHECK(model.gaps == pool.models().front().gaps);
    }
  }

  TEST_CASE("full-size preset pool is valid, deterministic and spread") {
    const SynthSpec spec = *synth_preset("paper-cnn-analogue");
    const auto pool = generate_pool(spec);
    CHECK(pool.n_models() == 200);
    CHECK(pool.n_test() == 4000);
    CHECK(pool.clipped());
    CHECK(pool.support_halfwidth() == spec.s_max);
    for (const auto& model : pool.models()) {
      for (double g : model.gaps) REQUIRE(std::abs(g) <= spec.s_max);
    }
    std::vector<double> accuracies;
    for (const auto& model : pool.models()) accuracies.push_back(accuracy(model, pool.labels()));
    const double sd = std::sqrt(sample_variance(accuracies));
    MESSAGE("per-model accuracy sd = " << sd);
    CHECK(sd > 0.0);
    CHECK(sd < 0.05);

    const auto again = generate_pool(spec);
    CHECK(again.labels() == pool.labels());
    CHECK(again.models().back().gaps == pool.models().back().gaps);
    SynthSpec other = spec;
    other.rng_seed = 1;
    CHECK(generate_pool(other).models().front().gaps != pool.models().front().gaps);
  }

  TEST_CASE("ensemble accuracy variance falls with ensemble size") {
    SynthSpec spec = *synth_preset("paper-cnn-analogue");
    spec.n_test = 2000;
    spec.rng_seed = 3;
    const auto pool = generate_pool(spec);
    const auto ids = pool.ids();
    const std::vector<double> sizes = {1, 2, 3, 5, 8, 12, 20, 30};
    std::vector<double> variances;
    for (std::size_t s = 0; s < sizes.size(); ++s) {
      std::vector<double> acc;
      for (std::size_t rep = 0; rep < 100; ++rep) {
        RandomStream rng(77, StreamDomain::sweep, s * 100 + rep);
        std::vector<std::string> members = ids;
        const auto size = static_cast<std::size_t>(sizes[s]);
        for (std::size_t i = 0; i < size; ++i) {
          std::swap(members[i], members[i + rng.index(members.size() - i)]);
        }
        members.resize(size);
        acc.push_back(accuracy(ensemble_gaps(pool, members), pool.labels()));
      }
      variances.push_back(sample_variance(acc));
    }
    const double rho = oracle::spearman_rho(sizes, variances);
    const double p = oracle::spearman_left_tail_exact(sizes, variances);
    MESSAGE("Spearman rho = " << rho << ", one-sided p = " << p);
    CHECK(rho < 0.0);
    CHECK(p < 0.01);
  }

  TEST_CASE("zero-jitter sweep: every ensemble at the first level with no churn") {
    SynthSpec spec;
    spec.n_models = 12;
    spec.n_test = 400;
    const auto pool = generate_pool(spec);
    SweepConfig cfg;
    cfg.sizes = {1, 3, 6};
    cfg.repetitions = 4;
    cfg.alpha = light_alpha();
    cfg.alpha.split = SplitMode::shared;
    const auto result = ensemble_sweep(pool, cfg);
    REQUIRE(result.records.size() == 12);
    for (const auto& r : result.records) {
      CHECK(r.alpha_hat == 0.0);
      CHECK(r.churn == 0);
      // Step ensemble against the interpolated reference: at most one jump.
      CHECK(r.sup_distance <= 1.0 / 400.0 + 1e-15);
    }
    for (const auto& row : table1_summary(result)) CHECK(row.pct_alpha_at_most_cut == 100.0);
  }

  TEST_CASE("sweep structure and reductions") {
    SynthSpec spec = *synth_preset("paper-cnn-analogue");
    spec.n_models = 40;
    spec.n_test = 800;
    spec.rng_seed = 2;
    const auto pool = generate_pool(spec);
    SweepConfig cfg;
    cfg.sizes = {1, 3, 5, 20};
    cfg.repetitions = 6;
    cfg.alpha = light_alpha();
    cfg.seed = 9;
    const auto result = ensemble_sweep(pool, cfg);
    CHECK(result.reference_ids.size() == 20);
    CHECK(result.candidate_ids.size() == 20);
    CHECK(result.reference_ids.front() == pool.ids().front());
    REQUIRE(result.records.size() == 24);
    for (std::size_t s = 0; s < cfg.sizes.size(); ++s) {
      for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
        const auto& r = result.at(s, rep);
        CHECK(r.size == cfg.sizes[s]);
        CHECK(r.rep == rep);
        REQUIRE(r.members.size() == cfg.sizes[s]);
        auto sorted = r.members;
        std::sort(sorted.begin(), sorted.end());
        CHECK(std::unique(sorted.begin(), sorted.end()) == sorted.end());
        for (const auto& id : r.members) {
          CHECK(std::find(result.candidate_ids.begin(), result.candidate_ids.end(), id) !=
                result.candidate_ids.end());
        }
        CHECK(r.alpha_hat >= 0.0);
        CHECK(r.alpha_hat <= 0.25);
      }
    }
    // Size 1 is the single member itself, with the same bootstrap draws.
    for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
      const auto& r = result.at(0, rep);
      const auto single = estimate_alpha(pool, result.reference_ids, r.members.front(), cfg.alpha);
      CHECK(r.alpha_hat == single.alpha_hat);
    }
    // Averaging the whole candidate half beats the typical single model.
    std::vector<double> singles;
    for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
      singles.push_back(result.at(0, rep).sup_distance);
    }
    CHECK(result.at(3, 0).sup_distance < median(singles));

    const auto rerun = ensemble_sweep(pool, cfg);
    std::ostringstream a;
    std::ostringstream b;
    write_sweep_csv(result, a);
    write_sweep_csv(rerun, b);
    CHECK(a.str() == b.str());
    CHECK(a.str().rfind("size,rep,metric,value\n1,0,sup_distance,", 0) == 0);

    const auto rows = table1_summary(result, -1.0);
    for (const auto& row : rows) {
      CHECK(row.count == cfg.repetitions);
      CHECK(row.pct_alpha_at_most_cut == 0.0);
    }

    SweepConfig with_replacement = cfg;
    with_replacement.members_with_replacement = true;
    with_replacement.sizes = {30};
    CHECK(ensemble_sweep(pool, with_replacement).records.front().members.size() == 30);
    SweepConfig too_big = cfg;
    too_big.sizes = {21};
    CHECK_THROWS_AS(ensemble_sweep(pool, too_big), std::invalid_argument);
  }

  TEST_CASE("summary statistics") {
    CHECK(median({3.0, 1.0, 2.0}) == 2.0);
    CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
    CHECK_THROWS_AS(median({}), std::invalid_argument);
  }
}
