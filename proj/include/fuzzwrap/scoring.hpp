#pragma once

// Scoring of a candidate separator point against a learned SeparatorModel.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "fuzzwrap/fuzzy_engine.hpp"
#include "fuzzwrap/induction.hpp"
#include "fuzzwrap/page_model.hpp"

namespace fuzzwrap {

inline constexpr double kScaleEpsilon = 1e-9;

// Signed deviation of `cost` from c_moy, in units of the calibrated
// half-range (floored at `floor` so a constant detector stays finite).
inline double detector_error(double cost, const Calibration& c,
                             double floor = kScaleEpsilon) {
  const double scale = std::max(c.c_max - c.c_moy, std::max(floor, kScaleEpsilon));
  return (cost - c.c_moy) / scale;
}

// Smallest normalizing half-range for a detector: scale_floor * moyL spread
// over the training instances, so sparsely trained detectors stay tolerant.
inline double scale_floor(const DetectorModel& d, std::size_t moyL,
                          const WrapperConfig& cfg) {
  const double n = std::max<double>(1.0, d.matrix.n_instances());
  return cfg.scale_floor * static_cast<double>(moyL) / n;
}

// Every token of the window was seen at exactly its distance in training.
inline bool covered(const FrequencyMatrix& m, const std::vector<TokenClass>& window) {
  for (std::size_t d = 1; d <= window.size(); ++d)
    if (window[d - 1] == TokenClass::Pad || m.at(d, window[d - 1]) == 0) return false;
  return true;
}

struct SeparatorScore {
  std::size_t position = 0;
  double cost_left = 0;
  double cost_right = 0;
  double error_left = 0;   // gain-scaled detector errors fed to the engine
  double error_right = 0;
  double error_tot = 0;
  double fit_left = 0;     // cost - c_max: >= 0 matches the best training window
  double fit_right = 0;
  bool covered_left = false;
  bool covered_right = false;

  // A side fits when its cost reaches the best training window's, or, with
  // `cover`, when every token sits where some training window had it.
  bool side_fit(Side side, const WrapperConfig& cfg, bool cover = false) const {
    const bool left = side == Side::Left;
    return (left ? fit_left : fit_right) >= -cfg.lone_gate - 1e-9 ||
           (cover && (left ? covered_left : covered_right));
  }

  // One detector on its own fits.
  bool lone_fit(const WrapperConfig& cfg, bool cover = false) const {
    return side_fit(Side::Left, cfg, cover) || side_fit(Side::Right, cfg, cover);
  }

  // The detector that looks into the zone: right of a Begin, left of an End.
  bool inner_fit(Edge edge, const WrapperConfig& cfg, bool cover = false) const {
    return side_fit(edge == Edge::Begin ? Side::Right : Side::Left, cfg, cover);
  }

  bool accepted(const WrapperConfig& cfg) const {
    return std::abs(error_left) <= cfg.detector_gate &&
           std::abs(error_right) <= cfg.detector_gate &&
           std::abs(error_tot) <= cfg.tau;
  }
};

inline SeparatorScore score_separator(const std::vector<TokenClass>& classes,
                                      const SeparatorModel& sep,
                                      std::size_t position, std::size_t moyL,
                                      const WrapperConfig& cfg) {
  SeparatorScore s;
  s.position = position;
  const auto left = window_classes(classes, position, Side::Left, moyL);
  const auto right = window_classes(classes, position, Side::Right, moyL);
  s.cost_left = sep.left.cost(left, cfg.width);
  s.cost_right = sep.right.cost(right, cfg.width);
  s.covered_left = covered(sep.left.matrix, left);
  s.covered_right = covered(sep.right.matrix, right);
  s.error_left = cfg.error_gain * detector_error(s.cost_left, sep.left.calibration,
                                                 scale_floor(sep.left, moyL, cfg));
  s.error_right = cfg.error_gain * detector_error(s.cost_right,
                                                  sep.right.calibration,
                                                  scale_floor(sep.right, moyL, cfg));
  s.fit_left = s.cost_left - sep.left.calibration.c_max;
  s.fit_right = s.cost_right - sep.right.calibration.c_max;
  s.error_tot =
      infer_error_tot(s.error_left, s.error_right, cfg.partition, cfg.mode);
  return s;
}

}  // namespace fuzzwrap
