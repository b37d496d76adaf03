#include "seedscope/model_pool.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "seedscope/rng.hpp"

namespace seedscope {
namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::string_view trim(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
    text.remove_suffix(1);
  }
  return text;
}

double parse_gap(std::string_view text, std::size_t line) {
  text = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw PoolError(PoolError::Kind::parse, "cannot parse gap '" + std::string(text) + "'", line);
  }
  if (!std::isfinite(value)) {
    throw PoolError(PoolError::Kind::non_finite, "non-finite gap '" + std::string(text) + "'", line);
  }
  return value;
}

std::size_t parse_index(std::string_view text, std::size_t line) {
  text = trim(text);
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw PoolError(PoolError::Kind::parse, "cannot parse sample_index '" + std::string(text) + "'",
                    line);
  }
  return value;
}

int parse_label(std::string_view text, std::size_t line) {
  text = trim(text);
  int value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw PoolError(PoolError::Kind::parse, "cannot parse label '" + std::string(text) + "'", line);
  }
  if (value != 1 && value != -1) {
    throw PoolError(PoolError::Kind::invalid_label,
                    "label must be -1 or +1, got '" + std::string(text) + "'", line);
  }
  return value;
}

std::string format_double(double value) {
  char buffer[32];
  const int written = std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return std::string(buffer, static_cast<std::size_t>(written));
}

struct LabelTable {
  std::vector<int> labels;
  std::vector<bool> seen;

  void set(std::size_t index, int label, std::size_t line) {
    if (index >= labels.size()) {
      labels.resize(index + 1, 0);
      seen.resize(index + 1, false);
    }
    if (seen[index] && labels[index] != label) {
      throw PoolError(PoolError::Kind::invalid_label,
                      "conflicting labels for sample_index " + std::to_string(index), line);
    }
    labels[index] = label;
    seen[index] = true;
  }

  std::vector<int> finish() const {
    for (std::size_t j = 0; j < seen.size(); ++j) {
      if (!seen[j]) {
        throw PoolError(PoolError::Kind::dimension_mismatch,
                        "sample_index " + std::to_string(j) + " is missing");
      }
    }
    return labels;
  }
};

ModelPool read_long_csv(std::istream& in, std::size_t line_no) {
  struct Partial {
    std::vector<double> gaps;
    std::vector<bool> seen;
    std::size_t count = 0;
  };
  std::vector<std::string> order;
  std::unordered_map<std::string, Partial> partial;
  LabelTable labels;

  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 4) {
      throw PoolError(PoolError::Kind::dimension_mismatch,
                      "expected 4 fields, found " + std::to_string(fields.size()), line_no);
    }
    const std::string id(trim(fields[0]));
    if (id.empty()) throw PoolError(PoolError::Kind::parse, "empty model_id", line_no);
    const std::size_t index = parse_index(fields[1], line_no);
    const int label = parse_label(fields[2], line_no);
    const double gap = parse_gap(fields[3], line_no);

    auto [it, inserted] = partial.try_emplace(id);
    if (inserted) order.push_back(id);
    Partial& p = it->second;
    if (index >= p.gaps.size()) {
      p.gaps.resize(index + 1, 0.0);
      p.seen.resize(index + 1, false);
    }
    if (p.seen[index]) {
      throw PoolError(PoolError::Kind::parse,
                      "duplicate row for model '" + id + "' sample_index " + std::to_string(index),
                      line_no);
    }
    p.gaps[index] = gap;
    p.seen[index] = true;
    ++p.count;
    labels.set(index, label, line_no);
  }
  if (order.empty()) throw PoolError(PoolError::Kind::parse, "no data rows");

  std::vector<int> label_vector = labels.finish();
  std::vector<ScoreVector> models;
  models.reserve(order.size());
  for (const auto& id : order) {
    Partial& p = partial.at(id);
    if (p.count != label_vector.size()) {
      throw PoolError(PoolError::Kind::dimension_mismatch,
                      "model '" + id + "' has " + std::to_string(p.count) + " gaps but there are " +
                          std::to_string(label_vector.size()) + " labels");
    }
    models.push_back({id, std::move(p.gaps)});
  }
  return ModelPool(std::move(models), std::move(label_vector));
}

ModelPool read_wide_csv(std::istream& in, const std::vector<std::string_view>& header,
                        std::size_t line_no) {
  std::vector<ScoreVector> models;
  for (std::size_t c = 2; c < header.size(); ++c) {
    const std::string_view column = trim(header[c]);
    if (column.substr(0, 4) != "gap:" || column.size() == 4) {
      throw PoolError(PoolError::Kind::parse, "wide header column must be gap:<model_id>", line_no);
    }
    models.push_back({std::string(column.substr(4)), {}});
  }
  if (models.empty()) throw PoolError(PoolError::Kind::parse, "wide header has no gap columns", 1);

  LabelTable labels;
  std::vector<std::vector<double>> columns(models.size());
  std::vector<std::vector<bool>> seen(models.size());
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw PoolError(PoolError::Kind::dimension_mismatch,
                      "expected " + std::to_string(header.size()) + " fields, found " +
                          std::to_string(fields.size()),
                      line_no);
    }
    const std::size_t index = parse_index(fields[0], line_no);
    const int label = parse_label(fields[1], line_no);
    for (std::size_t m = 0; m < models.size(); ++m) {
      const double gap = parse_gap(fields[m + 2], line_no);
      if (index >= columns[m].size()) {
        columns[m].resize(index + 1, 0.0);
        seen[m].resize(index + 1, false);
      }
      if (seen[m][index]) {
        throw PoolError(PoolError::Kind::parse,
                        "duplicate sample_index " + std::to_string(index), line_no);
      }
      columns[m][index] = gap;
      seen[m][index] = true;
    }
    labels.set(index, label, line_no);
  }
  std::vector<int> label_vector = labels.finish();
  if (label_vector.empty()) throw PoolError(PoolError::Kind::parse, "no data rows");
  for (std::size_t m = 0; m < models.size(); ++m) models[m].gaps = std::move(columns[m]);
  return ModelPool(std::move(models), std::move(label_vector));
}

}  // namespace

PoolError::PoolError(Kind kind, const std::string& message, std::size_t line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
      kind_(kind),
      line_(line) {}

ModelPool::ModelPool(std::vector<ScoreVector> models, std::vector<int> labels,
                     double support_halfwidth, std::string provenance)
    : models_(std::move(models)),
      labels_(std::move(labels)),
      support_halfwidth_(support_halfwidth),
      provenance_(std::move(provenance)) {
  if (!(support_halfwidth_ > 0.0) || !std::isfinite(support_halfwidth_)) {
    throw PoolError(PoolError::Kind::invalid_argument, "s_max must be positive and finite");
  }
  if (labels_.empty()) throw PoolError(PoolError::Kind::dimension_mismatch, "empty test set");
  for (int label : labels_) {
    if (label != 1 && label != -1) {
      throw PoolError(PoolError::Kind::invalid_label, "label must be -1 or +1");
    }
  }
  std::unordered_set<std::string_view> ids;
  for (const auto& model : models_) {
    if (!ids.insert(model.model_id).second) {
      throw PoolError(PoolError::Kind::duplicate_id, "duplicate model_id '" + model.model_id + "'");
    }
    if (model.gaps.size() != labels_.size()) {
      throw PoolError(PoolError::Kind::dimension_mismatch,
                      "model '" + model.model_id + "' has " + std::to_string(model.gaps.size()) +
                          " gaps but there are " + std::to_string(labels_.size()) + " labels");
    }
    for (double gap : model.gaps) {
      if (!std::isfinite(gap)) {
        throw PoolError(PoolError::Kind::non_finite,
                        "model '" + model.model_id + "' has a non-finite gap");
      }
    }
  }
}

const ScoreVector* ModelPool::find(std::string_view model_id) const noexcept {
  for (const auto& model : models_) {
    if (model.model_id == model_id) return &model;
  }
  return nullptr;
}

const ScoreVector& ModelPool::at(std::string_view model_id) const {
  if (const ScoreVector* model = find(model_id)) return *model;
  throw PoolError(PoolError::Kind::unknown_id, "unknown model_id '" + std::string(model_id) + "'");
}

std::vector<std::string> ModelPool::ids() const {
  std::vector<std::string> out;
  out.reserve(models_.size());
  for (const auto& model : models_) out.push_back(model.model_id);
  return out;
}

PoolFormat format_from_path(const std::filesystem::path& path) {
  return path.extension() == ".jsonl" ? PoolFormat::jsonl : PoolFormat::csv;
}

ModelPool read_pool_csv(std::istream& in, const std::string& source) {
  std::string header_line;
  if (!std::getline(in, header_line)) {
    throw PoolError(PoolError::Kind::parse, source + ": empty file");
  }
  const auto header = split_fields(header_line);
  try {
    if (header.size() == 4 && trim(header[0]) == "model_id" && trim(header[1]) == "sample_index" &&
        trim(header[2]) == "label" && trim(header[3]) == "gap") {
      return read_long_csv(in, 1);
    }
    if (header.size() >= 3 && trim(header[0]) == "sample_index" && trim(header[1]) == "label") {
      return read_wide_csv(in, header, 1);
    }
  } catch (const PoolError& e) {
    throw PoolError(e.kind(), source + ": " + e.what(), e.line());
  }
  throw PoolError(PoolError::Kind::parse,
                  source + ": unrecognised CSV header (expected model_id,sample_index,label,gap "
                           "or sample_index,label,gap:<id>,...)",
                  1);
}

ModelPool read_pool_jsonl(std::istream& models_in, std::istream& labels_in,
                          const std::string& source) {
  std::vector<int> labels;
  try {
    const auto doc = nlohmann::json::parse(labels_in);
    if (!doc.is_object() || !doc.contains("labels") || !doc["labels"].is_array()) {
      throw PoolError(PoolError::Kind::parse, source + ": labels file must be {\"labels\": [...]}");
    }
    for (const auto& value : doc["labels"]) {
      if (!value.is_number_integer()) {
        throw PoolError(PoolError::Kind::invalid_label, source + ": labels must be -1 or 1");
      }
      const int label = value.get<int>();
      if (label != 1 && label != -1) {
        throw PoolError(PoolError::Kind::invalid_label, source + ": labels must be -1 or 1");
      }
      labels.push_back(label);
    }
  } catch (const nlohmann::json::exception& e) {
    throw PoolError(PoolError::Kind::parse, source + ": labels file: " + e.what());
  }

  std::vector<ScoreVector> models;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(models_in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::json object;
    try {
      object = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw PoolError(PoolError::Kind::parse, source + ": " + e.what(), line_no);
    }
    if (!object.is_object() || !object.contains("model_id") || !object["model_id"].is_string() ||
        !object.contains("gaps") || !object["gaps"].is_array()) {
      throw PoolError(PoolError::Kind::parse,
                      source + ": expected {\"model_id\": str, \"gaps\": [f64...]}", line_no);
    }
    ScoreVector model{object["model_id"].get<std::string>(), {}};
    model.gaps.reserve(object["gaps"].size());
    for (const auto& value : object["gaps"]) {
      if (!value.is_number()) {
        throw PoolError(PoolError::Kind::parse, source + ": gaps must be numbers", line_no);
      }
      const double gap = value.get<double>();
      if (!std::isfinite(gap)) {
        throw PoolError(PoolError::Kind::non_finite, source + ": non-finite gap", line_no);
      }
      model.gaps.push_back(gap);
    }
    if (model.gaps.size() != labels.size()) {
      throw PoolError(PoolError::Kind::dimension_mismatch,
                      source + ": model '" + model.model_id + "' has " +
                          std::to_string(model.gaps.size()) + " gaps but there are " +
                          std::to_string(labels.size()) + " labels",
                      line_no);
    }
    models.push_back(std::move(model));
  }
  if (models.empty()) throw PoolError(PoolError::Kind::parse, source + ": no models");
  return ModelPool(std::move(models), std::move(labels));
}

ModelPool load_pool(const std::filesystem::path& path, PoolFormat format,
                    const std::optional<std::filesystem::path>& labels_path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PoolError(PoolError::Kind::io, "cannot open " + path.string());
  if (format == PoolFormat::csv) return read_pool_csv(in, path.string());

  const std::filesystem::path labels_file =
      labels_path ? *labels_path : path.parent_path() / "labels.json";
  std::ifstream labels_in(labels_file, std::ios::binary);
  if (!labels_in) throw PoolError(PoolError::Kind::io, "cannot open " + labels_file.string());
  return read_pool_jsonl(in, labels_in, path.string());
}

ModelPool load_pool(const std::filesystem::path& path) {
  return load_pool(path, format_from_path(path));
}

void write_pool_csv(const ModelPool& pool, std::ostream& out) {
  std::vector<const ScoreVector*> sorted;
  for (const auto& model : pool.models()) sorted.push_back(&model);
  std::sort(sorted.begin(), sorted.end(),
            [](const ScoreVector* a, const ScoreVector* b) { return a->model_id < b->model_id; });
  out << "model_id,sample_index,label,gap\n";
  for (const ScoreVector* model : sorted) {
    for (std::size_t j = 0; j < model->gaps.size(); ++j) {
      out << model->model_id << ',' << j << ',' << pool.labels()[j] << ','
          << format_double(model->gaps[j]) << '\n';
    }
  }
}

void write_pool_jsonl(const ModelPool& pool, std::ostream& models, std::ostream& labels) {
  for (const auto& model : pool.models()) {
    nlohmann::ordered_json line;
    line["model_id"] = model.model_id;
    line["gaps"] = model.gaps;
    models << line.dump() << '\n';
  }
  nlohmann::ordered_json doc;
  doc["labels"] = pool.labels();
  labels << doc.dump() << '\n';
}

std::string pool_manifest_json(const ModelPool& pool) {
  nlohmann::ordered_json doc;
  doc["s_max"] = pool.support_halfwidth();
  doc["n_test"] = pool.n_test();
  doc["models"] = pool.ids();
  return doc.dump(2);
}

ModelPool clip_pool(const ModelPool& pool, double s_max) {
  if (!(s_max > 0.0) || !std::isfinite(s_max)) {
    throw PoolError(PoolError::Kind::invalid_argument, "s_max must be positive and finite");
  }
  std::vector<ScoreVector> models = pool.models();
  for (auto& model : models) {
    for (double& gap : model.gaps) gap = std::clamp(gap, -s_max, s_max);
  }
  ModelPool out(std::move(models), pool.labels(), s_max, pool.provenance());
  out.clipped_ = true;
  return out;
}

std::string_view to_string(SplitMode mode) noexcept {
  switch (mode) {
    case SplitMode::disjoint: return "disjoint";
    case SplitMode::bootstrap: return "bootstrap";
    case SplitMode::shared: return "shared";
  }
  return "bootstrap";
}

std::optional<SplitMode> parse_split_mode(std::string_view text) noexcept {
  if (text == "disjoint") return SplitMode::disjoint;
  if (text == "bootstrap") return SplitMode::bootstrap;
  if (text == "shared") return SplitMode::shared;
  return std::nullopt;
}

SplitPlan make_split(std::size_t n_test, SplitMode mode, std::uint64_t rng_seed,
                     std::uint64_t replicate, std::size_t sample_size) {
  SplitPlan plan;
  plan.rng_seed = rng_seed;
  plan.mode = mode;
  RandomStream rng(rng_seed, StreamDomain::split, replicate);

  switch (mode) {
    case SplitMode::shared: {
      if (n_test < 1) throw PoolError(PoolError::Kind::invalid_argument, "n_test must be >= 1");
      plan.reference_indices.resize(n_test);
      for (std::size_t j = 0; j < n_test; ++j) plan.reference_indices[j] = j;
      plan.candidate_indices = plan.reference_indices;
      return plan;
    }
    case SplitMode::bootstrap: {
      if (n_test < 1) throw PoolError(PoolError::Kind::invalid_argument, "n_test must be >= 1");
      const std::size_t size = sample_size > 0 ? sample_size : std::max<std::size_t>(1, n_test / 2);
      plan.reference_indices.resize(size);
      plan.candidate_indices.resize(size);
      for (auto& index : plan.reference_indices) index = rng.index(n_test);
      for (auto& index : plan.candidate_indices) index = rng.index(n_test);
      return plan;
    }
    case SplitMode::disjoint: {
      if (n_test < 2) throw PoolError(PoolError::Kind::invalid_argument, "n_test must be >= 2");
      const std::size_t size = sample_size > 0 ? sample_size : n_test / 2;
      if (2 * size > n_test) {
        throw PoolError(PoolError::Kind::invalid_argument,
                        "disjoint split needs 2 * sample_size <= n_test");
      }
      std::vector<std::size_t> permutation(n_test);
      for (std::size_t j = 0; j < n_test; ++j) permutation[j] = j;
      for (std::size_t i = n_test - 1; i > 0; --i) {
        std::swap(permutation[i], permutation[rng.index(i + 1)]);
      }
      plan.reference_indices.assign(permutation.begin(), permutation.begin() + size);
      plan.candidate_indices.assign(permutation.begin() + size, permutation.begin() + 2 * size);
      return plan;
    }
  }
  return plan;
}

ScoreVector ensemble_gaps(const ModelPool& pool, std::span<const std::string> member_ids,
                          std::string ensemble_id) {
  if (member_ids.empty()) {
    throw PoolError(PoolError::Kind::invalid_argument, "ensemble needs at least one member");
  }
  // Summing in id order makes the result independent of how members were listed.
  std::vector<const ScoreVector*> members;
  members.reserve(member_ids.size());
  for (const auto& id : member_ids) members.push_back(&pool.at(id));
  std::stable_sort(members.begin(), members.end(), [](const ScoreVector* a, const ScoreVector* b) {
    return a->model_id < b->model_id;
  });

  ScoreVector out{std::move(ensemble_id), std::vector<double>(pool.n_test(), 0.0)};
  for (const ScoreVector* member : members) {
    for (std::size_t j = 0; j < out.gaps.size(); ++j) out.gaps[j] += member->gaps[j];
  }
  const double count = static_cast<double>(members.size());
  for (double& gap : out.gaps) gap /= count;
  return out;
}

std::vector<double> gather(std::span<const double> values, std::span<const std::size_t> indices) {
  std::vector<double> out;
  out.reserve(indices.size());
  for (std::size_t index : indices) out.push_back(values[index]);
  return out;
}

}  // namespace seedscope
