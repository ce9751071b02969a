#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "cobb/centerline.hpp"
#include "cobb/mask_io.hpp"
#include "cobb/tilt_finder.hpp"

namespace cobb {

enum class IccForm { OneWay, TwoWayAgreement, TwoWayConsistency };
enum class KappaWeighting { None, Linear, Quadratic };

std::string_view to_string(IccForm form);
std::string_view to_string(KappaWeighting weighting);

struct PipelineConfig {
  int max_degree = kMaxDegree;
  double normalized_length = kNormalizedLength;
  double tolerance_fraction = 0.15;
  double max_interval = 250.0;
  double grid_step = 0.5;
  double slope_eps = 1e-6;
  std::size_t min_area = kDefaultMinArea;
  std::uint64_t seed = 0;
  std::size_t bootstrap_resamples = 10000;
  IccForm icc_form = IccForm::TwoWayAgreement;
  KappaWeighting kappa_weighting = KappaWeighting::None;

  TiltConfig tilt() const { return {max_interval, grid_step, slope_eps}; }

  /// Throws InvalidArgument when a value is out of range.
  void validate() const;

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

/// Applies one `key = value` setting. Unknown keys are rejected.
void apply_setting(PipelineConfig& config, std::string_view key, std::string_view value);

/// Reads `key = value` lines; blank lines and '#' comments are ignored.
PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base = {});

nlohmann::json to_json(const PipelineConfig& config);

}  // namespace cobb
