#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace seedscope {

/// Logit gaps m(x_j; theta_k) = m+ - m- of one trained model, index-aligned
/// with the pool's test set.
struct ScoreVector {
  std::string model_id;
  std::vector<double> gaps;
};

/// Raised for every ingest or validation failure. `line()` is 1-based and 0
/// when the failure is not tied to a line of input.
class PoolError : public std::runtime_error {
 public:
  enum class Kind {
    io,
    parse,
    dimension_mismatch,
    non_finite,
    invalid_label,
    duplicate_id,
    unknown_id,
    invalid_argument,
  };

  PoolError(Kind kind, const std::string& message, std::size_t line = 0);

  Kind kind() const noexcept { return kind_; }
  std::size_t line() const noexcept { return line_; }

 private:
  Kind kind_;
  std::size_t line_;
};

/// Immutable pool of model evaluations over one shared test set.
class ModelPool {
 public:
  /// sigmoid(25) already rounds to 1 in double precision.
  static constexpr double kDefaultSupportHalfwidth = 25.0;

  ModelPool(std::vector<ScoreVector> models, std::vector<int> labels,
            double support_halfwidth = kDefaultSupportHalfwidth, std::string provenance = {});

  const std::vector<ScoreVector>& models() const noexcept { return models_; }
  const std::vector<int>& labels() const noexcept { return labels_; }
  std::size_t n_models() const noexcept { return models_.size(); }
  std::size_t n_test() const noexcept { return labels_.size(); }

  /// s_max; the support length |S| is 2 * s_max.
  double support_halfwidth() const noexcept { return support_halfwidth_; }
  double support_length() const noexcept { return 2.0 * support_halfwidth_; }
  bool clipped() const noexcept { return clipped_; }
  const std::string& provenance() const noexcept { return provenance_; }

  const ScoreVector* find(std::string_view model_id) const noexcept;
  /// Throws PoolError(unknown_id).
  const ScoreVector& at(std::string_view model_id) const;
  std::vector<std::string> ids() const;

 private:
  friend ModelPool clip_pool(const ModelPool& pool, double s_max);

  std::vector<ScoreVector> models_;
  std::vector<int> labels_;
  double support_halfwidth_;
  bool clipped_ = false;
  std::string provenance_;
};

enum class PoolFormat { csv, jsonl };

/// `.jsonl` selects jsonl, anything else csv.
PoolFormat format_from_path(const std::filesystem::path& path);

/// CSV accepts the long form `model_id,sample_index,label,gap` and the wide
/// form `sample_index,label,gap:<id>,...`. JSONL expects one
/// `{"model_id": ..., "gaps": [...]}` object per line plus a labels file
/// `{"labels": [...]}`; when `labels_path` is empty, `labels.json` next to the
/// JSONL file is used.
ModelPool load_pool(const std::filesystem::path& path, PoolFormat format,
                    const std::optional<std::filesystem::path>& labels_path = std::nullopt);
ModelPool load_pool(const std::filesystem::path& path);

ModelPool read_pool_csv(std::istream& in, const std::string& source = "<stream>");
ModelPool read_pool_jsonl(std::istream& models, std::istream& labels,
                          const std::string& source = "<stream>");

/// Canonical long-form CSV: models sorted by id, rows by sample index,
/// gaps printed with 17 significant digits, LF endings.
void write_pool_csv(const ModelPool& pool, std::ostream& out);
void write_pool_jsonl(const ModelPool& pool, std::ostream& models, std::ostream& labels);

/// `{ "s_max": f64, "n_test": int, "models": [ids] }`
std::string pool_manifest_json(const ModelPool& pool);

/// Clamps every gap to [-s_max, s_max] and records s_max. Idempotent.
ModelPool clip_pool(const ModelPool& pool, double s_max);

enum class SplitMode {
  disjoint,   // random halves of a permutation of [n_test]
  bootstrap,  // two independent with-replacement draws
  shared,     // both sides use every test index in order
};

std::string_view to_string(SplitMode mode) noexcept;
std::optional<SplitMode> parse_split_mode(std::string_view text) noexcept;

struct SplitPlan {
  std::vector<std::size_t> reference_indices;
  std::vector<std::size_t> candidate_indices;
  std::uint64_t rng_seed = 0;
  SplitMode mode = SplitMode::bootstrap;
};

/// Draws replicate `replicate` from stream (seed, split, replicate).
///
/// bootstrap: 2 * size raw draws, the first `size` for the reference and the
/// rest for the candidate, each index(n_test). disjoint: Fisher-Yates shuffle
/// (i from n-1 down to 1, swap with index(i + 1)); reference takes the first
/// `size` entries of the permutation, candidate the next `size`.
/// `sample_size == 0` means floor(n_test / 2) (at least 1 for bootstrap);
/// disjoint requires 2 * size <= n_test.
SplitPlan make_split(std::size_t n_test, SplitMode mode, std::uint64_t rng_seed,
                     std::uint64_t replicate = 0, std::size_t sample_size = 0);

/// Entry j is the mean over members of gap_j.
ScoreVector ensemble_gaps(const ModelPool& pool, std::span<const std::string> member_ids,
                          std::string ensemble_id = "ensemble");

std::vector<double> gather(std::span<const double> values, std::span<const std::size_t> indices);

}  // namespace seedscope
