#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "seedscope/alpha_estimator.hpp"
#include "seedscope/rng.hpp"
#include "seedscope/synth.hpp"

using namespace seedscope;

namespace {

std::vector<double> normal_gaps(RandomStream& rng, std::size_t n, double mean) {
  std::vector<double> out(n);
  for (auto& x : out) x = mean + rng.normal();
  return out;
}

ModelPool normal_pool(std::uint64_t seed, std::size_t models, std::size_t n, double mean_sd) {
  RandomStream rng(seed, StreamDomain::synth, 0);
  std::vector<ScoreVector> out;
  for (std::size_t k = 0; k < models; ++k) {
    const double mean = mean_sd * rng.normal();
    char id[8];
    std::snprintf(id, sizeof id, "n%03zu", k);
    out.push_back({id, normal_gaps(rng, n, mean)});
  }
  return ModelPool(std::move(out), std::vector<int>(n, 1));
}

AlphaConfig quick_config(std::size_t b = 20) {
  AlphaConfig cfg;
  cfg.n_bootstrap = b;
  cfg.rng_seed = 3;
  return cfg;
}

}  // namespace

TEST_SUITE("alpha_estimator") {
  TEST_CASE("default grid") {
    const auto grid = default_alpha_grid();
    REQUIRE(grid.size() == 51);
    for (std::size_t k = 0; k < grid.size(); ++k) CHECK(grid[k] == static_cast<double>(k) / 200.0);
    CHECK(alpha_grid_range(0.1, 0.5, 1) == std::vector<double>{0.1});
    CHECK(alpha_grid_range(0.0, 0.5, 3) == std::vector<double>{0.0, 0.25, 0.5});
    CHECK_THROWS_AS(alpha_grid_range(0.0, 0.5, 0), std::invalid_argument);
  }

  TEST_CASE("config validation") {
    AlphaConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.alpha_grid = {};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.alpha_grid = {0.1, 0.1};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.alpha_grid = {0.2, 1.0};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = AlphaConfig{};
    cfg.n_bootstrap = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = AlphaConfig{};
    cfg.epsilon_a = 1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  }

  TEST_CASE("identical candidate accepts at the first level") {
    RandomStream rng(1, StreamDomain::synth, 3);
    const auto gaps = normal_gaps(rng, 500, 0.0);
    const ModelPool pool({{"ref", gaps}, {"clone", gaps}}, std::vector<int>(500, 1));
    AlphaConfig cfg = quick_config();
    cfg.split = SplitMode::shared;
    const std::vector<std::string> ref = {"ref"};
    const auto estimate = estimate_alpha(pool, ref, "clone", cfg);
    CHECK(estimate.alpha_hat == 0.0);
    CHECK(estimate.saturated_count == 0);
    CHECK(estimate.per_replicate.size() == cfg.n_bootstrap);
    for (const auto& outcome : estimate.per_replicate) {
      CHECK(outcome.accepted);
      CHECK(outcome.alpha == 0.0);
      CHECK(outcome.statistic == 0.0);
    }
    CHECK(estimate.resample_size == 500);
    CHECK(estimate.warnings.empty());
  }

  TEST_CASE("far-shifted candidate saturates every replicate") {
    RandomStream rng(2, StreamDomain::synth, 4);
    auto shifted = normal_gaps(rng, 2000, 0.0);
    for (auto& x : shifted) x += 1000.0;
    const ModelPool pool({{"ref", normal_gaps(rng, 2000, 0.0)}, {"far", shifted}},
                         std::vector<int>(2000, 1));
    AlphaConfig cfg = quick_config();
    cfg.alpha_grid = alpha_grid_range(0.0, 0.5, 11);
    const std::vector<std::string> ref = {"ref"};
    const auto estimate = estimate_alpha(pool, ref, "far", cfg);
    CHECK(estimate.alpha_hat == 0.5);
    CHECK(estimate.saturated_count == cfg.n_bootstrap);
    for (const auto& outcome : estimate.per_replicate) {
      CHECK(!outcome.accepted);
      CHECK(outcome.statistic == 1.0);
    }
    CHECK(!estimate.warnings.empty());

    // Independent check on a small disjoint-support instance: even half the
    // mass cannot be moved across the gap.
    const std::vector<double> low = {0.1, 0.4, 0.2, 0.9, 0.5};
    const std::vector<double> high = {1000.1, 1000.3, 1000.2, 1000.8, 1000.6};
    CHECK(oracle::trimmed_ks_bisection(high, low, 0.5, false) == doctest::Approx(1.0));
    CHECK(oracle::trimmed_ks_bisection(high, low, 0.5, true) == doctest::Approx(1.0));
  }

  TEST_CASE("in-distribution candidates have small alpha") {
    const ModelPool pool = normal_pool(5, 80, 2000, 0.1);
    const auto ids = pool.ids();
    const std::vector<std::string> reference(ids.begin(), ids.begin() + 30);
    std::vector<ScoreVector> candidates;
    for (std::size_t k = 30; k < 80; ++k) candidates.push_back(pool.at(ids[k]));
    AlphaConfig cfg;
    cfg.rng_seed = 11;
    const auto estimates = estimate_alpha_batch(pool, reference, candidates, cfg);
    const auto small = std::count_if(estimates.begin(), estimates.end(),
                                     [](const AlphaEstimate& e) { return e.alpha_hat <= 0.05; });
    MESSAGE("candidates with alpha_hat <= 0.05: " << small << " / 50");
    CHECK(small >= 45);
  }

  TEST_CASE("reference member resampled against its own pool concentrates at zero") {
    const ModelPool pool = normal_pool(6, 5, 1000, 0.0);
    const auto ids = pool.ids();
    AlphaConfig cfg = quick_config(50);
    cfg.allow_candidate_in_reference = true;
    const auto estimate = estimate_alpha(pool, ids, ids[2], cfg);
    CHECK(estimate.alpha_hat <= 0.01);
    const auto at_zero = std::count_if(estimate.per_replicate.begin(), estimate.per_replicate.end(),
                                       [](const ReplicateOutcome& o) { return o.alpha == 0.0; });
    CHECK(at_zero >= 45);
    CHECK(estimate.warnings.front().find("reference member") != std::string::npos);
  }

  TEST_CASE("candidate inside the reference is rejected unless allowed") {
    const ModelPool pool = normal_pool(7, 3, 50, 0.0);
    const auto ids = pool.ids();
    CHECK_THROWS_AS(estimate_alpha(pool, ids, ids[0], quick_config()), PoolError);
    CHECK_THROWS_AS(estimate_alpha(pool, std::vector<std::string>{}, ids[0], quick_config()),
                    PoolError);
    CHECK_THROWS_AS(estimate_alpha(pool, ids, "nope", quick_config()), PoolError);
    const std::vector<ScoreVector> wrong = {{"short", {1.0, 2.0}}};
    CHECK_THROWS_AS(estimate_alpha_batch(pool, ids, wrong, quick_config()), PoolError);
  }

  TEST_CASE("results do not depend on the thread count") {
    const ModelPool pool = normal_pool(8, 12, 600, 0.3);
    const auto ids = pool.ids();
    const std::vector<std::string> reference(ids.begin(), ids.begin() + 6);
    std::vector<ScoreVector> candidates;
    for (std::size_t k = 6; k < 12; ++k) candidates.push_back(pool.at(ids[k]));
    AlphaConfig cfg = quick_config(40);
    cfg.threads = 1;
    const auto serial = estimate_alpha_batch(pool, reference, candidates, cfg);
    for (std::size_t threads : {2u, 3u, 8u}) {
      cfg.threads = threads;
      const auto parallel = estimate_alpha_batch(pool, reference, candidates, cfg);
      for (std::size_t c = 0; c < candidates.size(); ++c) {
        CHECK(parallel[c].alpha_hat == serial[c].alpha_hat);
        for (std::size_t b = 0; b < cfg.n_bootstrap; ++b) {
          REQUIRE(parallel[c].per_replicate[b].alpha == serial[c].per_replicate[b].alpha);
          REQUIRE(parallel[c].per_replicate[b].statistic == serial[c].per_replicate[b].statistic);
        }
      }
    }
    // A single candidate sees the same draws as it does inside a batch.
    cfg.threads = 0;
    const auto alone = estimate_alpha(pool, reference, ids[9], cfg);
    CHECK(alone.alpha_hat == serial[3].alpha_hat);
  }

  TEST_CASE("refining the grid never raises a replicate's level") {
    const ModelPool pool = normal_pool(9, 10, 400, 0.6);
    const auto ids = pool.ids();
    const std::vector<std::string> reference(ids.begin(), ids.begin() + 5);
    std::vector<ScoreVector> candidates;
    for (std::size_t k = 5; k < 10; ++k) candidates.push_back(pool.at(ids[k]));
    AlphaConfig coarse = quick_config(30);
    coarse.alpha_grid = alpha_grid_range(0.0, 0.3, 7);
    AlphaConfig fine = coarse;
    fine.alpha_grid = alpha_grid_range(0.0, 0.3, 61);
    const auto a = estimate_alpha_batch(pool, reference, candidates, coarse);
    const auto b = estimate_alpha_batch(pool, reference, candidates, fine);
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      CHECK(b[c].alpha_hat <= a[c].alpha_hat);
      for (std::size_t r = 0; r < coarse.n_bootstrap; ++r) {
        REQUIRE(b[c].per_replicate[r].alpha <= a[c].per_replicate[r].alpha);
      }
    }
  }

  TEST_CASE("pairwise matrix") {
    RandomStream rng(10, StreamDomain::synth, 5);
    const auto gaps = normal_gaps(rng, 300, 0.0);
    const ModelPool twins({{"x", gaps}, {"y", gaps}}, std::vector<int>(300, 1));
    AlphaConfig cfg = quick_config();
    cfg.split = SplitMode::shared;
    const std::vector<std::string> xy = {"x", "y"};
    const auto matrix = pairwise_alpha(twins, xy, cfg);
    CHECK(matrix.at(0, 1) == 0.0);
    CHECK(matrix.at(1, 0) == 0.0);
    CHECK(matrix.at(0, 0) == 0.0);

    const ModelPool pool = normal_pool(11, 5, 300, 1.0);
    const auto ids = pool.ids();
    AlphaConfig boot = quick_config();
    boot.alpha_grid = alpha_grid_range(0.05, 0.3, 6);
    const auto spread = pairwise_alpha(pool, ids, boot);
    for (double value : spread.values) {
      CHECK(value >= 0.05);
      CHECK(value <= 0.3);
    }
    CHECK_THROWS_AS(pairwise_alpha(pool, std::vector<std::string>{ids[0]}, boot), PoolError);
  }

  TEST_CASE("pairwise entries are exchangeable for exchangeable models") {
    // 100 disjoint pairs so the paired differences are independent.
    SynthSpec spec = *synth_preset("paper-cnn-analogue");
    spec.n_models = 200;
    spec.n_test = 600;
    spec.rng_seed = 4;
    const auto pool = generate_pool(spec);
    const auto ids = pool.ids();
    const AlphaConfig cfg = quick_config(20);
    std::vector<double> differences;
    for (std::size_t k = 0; k + 1 < ids.size(); k += 2) {
      const std::vector<std::string> pair = {ids[k], ids[k + 1]};
      const auto matrix = pairwise_alpha(pool, pair, cfg);
      differences.push_back(matrix.at(0, 1) - matrix.at(1, 0));
    }
    REQUIRE(differences.size() == 100);
    const double p = oracle::wilcoxon_signed_rank_p(differences);
    MESSAGE("Wilcoxon signed-rank p = " << p);
    CHECK(p > 0.01);
  }

  TEST_CASE("leave-one-out") {
    const ModelPool pool = normal_pool(12, 4, 200, 0.2);
    const auto ids = pool.ids();
    const auto estimates = leave_one_out_alpha(pool, ids, quick_config(10));
    REQUIRE(estimates.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(estimates[i].candidate == ids[i]);
      CHECK(estimates[i].alpha_hat >= 0.0);
      CHECK(estimates[i].alpha_hat <= 0.25);
    }
  }
}
