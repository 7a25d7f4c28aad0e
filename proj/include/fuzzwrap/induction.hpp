#pragma once

// Learning of separator detectors from labelled windows.
//
// For a detector, f(i, j) counts the training windows holding class j at
// distance i. A candidate window is scored token by token:
//
//   position truth   1 if f(i, j) > 0, else max(0, 1 - d / w) where d is the
//                    gap to the nearest distance i' with f(i', j) > 0
//   occurrence truth f(i*, j) / n_instances with i* = i if observed, else i'
//   token cost       position truth * occurrence truth
//   detector cost    sum of token costs over distances 1..moyL
//
// Ties for i' go to the larger count, then to the larger distance.
// Calibration records the min and max detector cost over the training
// windows; c_moy is their midpoint.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fuzzwrap/error.hpp"
#include "fuzzwrap/fuzzy_engine.hpp"
#include "fuzzwrap/page_model.hpp"
#include "fuzzwrap/tokenizer.hpp"

namespace fuzzwrap {

class FrequencyMatrix {
 public:
  using Row = std::array<std::uint32_t, kNumClasses>;

  FrequencyMatrix() = default;
  explicit FrequencyMatrix(std::size_t moyL) : rows_(moyL + 1, Row{}) {}

  std::size_t moyL() const { return rows_.empty() ? 0 : rows_.size() - 1; }
  std::uint32_t n_instances() const { return n_instances_; }

  std::uint32_t at(std::size_t distance, TokenClass c) const {
    if (c == TokenClass::Pad || distance >= rows_.size()) return 0;
    return rows_[distance][class_column(c)];
  }

  const std::vector<Row>& rows() const { return rows_; }

  void add(const DetectorWindow& w) {
    for (std::size_t d = 1; d <= std::min(w.length(), moyL()); ++d) {
      TokenClass c = w.at(d);
      if (c != TokenClass::Pad) ++rows_[d][class_column(c)];
    }
    ++n_instances_;
  }

  // Raw construction, used when loading a persisted model.
  static FrequencyMatrix from_rows(std::vector<Row> rows, std::uint32_t n) {
    FrequencyMatrix m;
    m.rows_ = std::move(rows);
    m.n_instances_ = n;
    return m;
  }

  // Nearest distance i' holding class c, by gap, then count, then distance.
  std::optional<std::size_t> nearest_observed(TokenClass c,
                                              std::size_t distance) const {
    std::optional<std::size_t> best;
    std::size_t best_gap = 0;
    std::uint32_t best_count = 0;
    for (std::size_t i = 1; i <= moyL(); ++i) {
      std::uint32_t f = at(i, c);
      if (f == 0) continue;
      std::size_t gap = i > distance ? i - distance : distance - i;
      bool better = !best || gap < best_gap ||
                    (gap == best_gap && f > best_count) ||
                    (gap == best_gap && f == best_count && i > *best);
      if (better) {
        best = i;
        best_gap = gap;
        best_count = f;
      }
    }
    return best;
  }

  friend bool operator==(const FrequencyMatrix&, const FrequencyMatrix&) = default;

 private:
  std::vector<Row> rows_;
  std::uint32_t n_instances_ = 0;
};

// Counts classes per distance over windows of one (zone, edge, side).
inline FrequencyMatrix build_frequency_matrix(
    const std::vector<DetectorWindow>& windows) {
  if (windows.empty())
    throw Error(ErrorCode::EmptyTrainingSet, "no training windows");
  FrequencyMatrix m(windows.front().length());
  for (const auto& w : windows) m.add(w);
  return m;
}

inline double position_truth(const FrequencyMatrix& m, TokenClass c,
                             std::size_t distance, int width) {
  if (c == TokenClass::Pad) return 0.0;
  if (m.at(distance, c) > 0) return 1.0;
  auto near = m.nearest_observed(c, distance);
  if (!near) return 0.0;
  double gap = static_cast<double>(*near > distance ? *near - distance
                                                    : distance - *near);
  return std::max(0.0, 1.0 - gap / static_cast<double>(std::max(width, 1)));
}

inline double occurrence_truth(const FrequencyMatrix& m, TokenClass c,
                               std::size_t distance) {
  if (c == TokenClass::Pad || m.n_instances() == 0) return 0.0;
  std::uint32_t f = m.at(distance, c);
  if (f == 0) {
    auto near = m.nearest_observed(c, distance);
    if (!near) return 0.0;
    f = m.at(*near, c);
  }
  return static_cast<double>(f) / static_cast<double>(m.n_instances());
}

inline double token_cost(const FrequencyMatrix& m, TokenClass c,
                         std::size_t distance, int width) {
  return position_truth(m, c, distance, width) *
         occurrence_truth(m, c, distance);
}

// Sum of `cost(class, distance)` over the window. The functor form lets
// callers score with hand-pinned per-token truths.
template <typename TokenCostFn>
double detector_cost(const std::vector<TokenClass>& window, TokenCostFn&& cost) {
  double total = 0.0;
  for (std::size_t d = 1; d <= window.size(); ++d)
    total += cost(window[d - 1], d);
  return total;
}

inline double detector_cost(const FrequencyMatrix& m,
                            const std::vector<TokenClass>& window, int width) {
  return detector_cost(window, [&](TokenClass c, std::size_t d) {
    return token_cost(m, c, d, width);
  });
}

struct Calibration {
  double c_min = 0;
  double c_max = 0;
  double c_moy = 0;
  friend bool operator==(const Calibration&, const Calibration&) = default;
};

inline Calibration calibrate(const FrequencyMatrix& m,
                             const std::vector<DetectorWindow>& windows,
                             int width) {
  if (windows.empty())
    throw Error(ErrorCode::EmptyTrainingSet, "no calibration windows");
  Calibration c;
  bool first = true;
  for (const auto& w : windows) {
    double cost = detector_cost(m, w.classes, width);
    if (first || cost < c.c_min) c.c_min = cost;
    if (first || cost > c.c_max) c.c_max = cost;
    first = false;
  }
  c.c_moy = (c.c_min + c.c_max) / 2.0;
  return c;
}

struct DetectorModel {
  Side side = Side::Left;
  FrequencyMatrix matrix;
  Calibration calibration;

  double cost(const std::vector<TokenClass>& window, int width) const {
    return detector_cost(matrix, window, width);
  }
  friend bool operator==(const DetectorModel&, const DetectorModel&) = default;
};

struct SeparatorModel {
  ZoneKind zone;
  Edge edge = Edge::Begin;
  DetectorModel left;
  DetectorModel right;
  friend bool operator==(const SeparatorModel&, const SeparatorModel&) = default;
};

struct WrapperConfig {
  int width = 2;                 // position-truth decay width w
  double tau = 0.75;             // max |ErrorTot| of an accepted separator
  double error_gain = 0.5;       // detector error -> fuzzy input scale
  double detector_gate = 1.0;    // max |gain * error| of either detector
  double scale_floor = 1.0;      // min half-range, in moyL / n_instances
  double lone_gate = 0.0;        // cost slack below c_max for a lone detector fit
  CombineMode mode = CombineMode::Fuzzy;
  FuzzyPartition partition;
  friend bool operator==(const WrapperConfig&, const WrapperConfig&) = default;
};

inline constexpr const char* kModelVersion = "fuzzwrap-model/1";

struct SeparatorKey {
  ZoneKind zone;
  Edge edge;
  friend bool operator==(const SeparatorKey&, const SeparatorKey&) = default;
  friend bool operator<(const SeparatorKey& a, const SeparatorKey& b) {
    if (a.zone == b.zone) return a.edge < b.edge;
    return a.zone < b.zone;
  }
};

struct WrapperModel {
  std::string version = kModelVersion;
  MoyL moyL;
  WrapperConfig config;
  std::map<SeparatorKey, SeparatorModel> separators;

  const SeparatorModel& separator(const ZoneKind& z, Edge e) const {
    auto it = separators.find({z, e});
    if (it == separators.end())
      throw Error(ErrorCode::NotFound, "no separator for " + z.label() + "/" +
                                           std::string(edge_name(e)));
    return it->second;
  }

  std::vector<std::string> attribute_names() const {
    std::vector<std::string> names;
    for (const auto& [key, sep] : separators)
      if (key.zone.level == ZoneLevel::Attribute && key.edge == Edge::Begin)
        names.push_back(key.zone.name);
    return names;
  }

  friend bool operator==(const WrapperModel&, const WrapperModel&) = default;
};

struct LabelledPage {
  std::string html;
  ZoneLabels labels;
};

// Learns one separator per (zone, edge) from the labelled pages.
inline WrapperModel train(const std::vector<LabelledPage>& pages,
                          const WrapperConfig& config = {}) {
  if (pages.empty())
    throw Error(ErrorCode::EmptyTrainingSet, "no training pages");

  std::vector<std::vector<Token>> tokens;
  std::vector<ZoneLabels> labels;
  tokens.reserve(pages.size());
  for (const auto& p : pages) {
    tokens.push_back(tokenize(p.html));
    validate_labels(p.html, tokens.back(), p.labels);
    labels.push_back(p.labels);
  }

  WrapperModel model;
  model.config = config;
  model.moyL = compute_moyL(labels, tokens);

  std::map<SeparatorKey, std::pair<std::vector<DetectorWindow>,
                                   std::vector<DetectorWindow>>>
      grouped;
  for (std::size_t p = 0; p < pages.size(); ++p) {
    for (auto& w : extract_windows(tokens[p], labels[p], model.moyL)) {
      auto& slot = grouped[{w.zone, w.edge}];
      (w.side == Side::Left ? slot.first : slot.second).push_back(std::move(w));
    }
  }

  for (const auto& [key, windows] : grouped) {
    SeparatorModel sep;
    sep.zone = key.zone;
    sep.edge = key.edge;
    auto learn = [&](Side side, const std::vector<DetectorWindow>& ws) {
      DetectorModel d;
      d.side = side;
      d.matrix = build_frequency_matrix(ws);
      d.calibration = calibrate(d.matrix, ws, config.width);
      return d;
    };
    sep.left = learn(Side::Left, windows.first);
    sep.right = learn(Side::Right, windows.second);
    model.separators.emplace(key, std::move(sep));
  }
  return model;
}

}  // namespace fuzzwrap
