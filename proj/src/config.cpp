#include "cobb/config.hpp"

#include <charconv>
#include <fstream>

#include "cobb/error.hpp"

namespace cobb {
namespace {

constexpr const char* kStage = "config";

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::InvalidArgument, kStage,
                "bad value '" + std::string(value) + "' for " + std::string(key));
  }
  return out;
}

}  // namespace

std::string_view to_string(IccForm form) {
  switch (form) {
    case IccForm::OneWay: return "icc1_1";
    case IccForm::TwoWayAgreement: return "icc2_1";
    case IccForm::TwoWayConsistency: return "icc3_1";
  }
  return "unknown";
}

std::string_view to_string(KappaWeighting weighting) {
  switch (weighting) {
    case KappaWeighting::None: return "none";
    case KappaWeighting::Linear: return "linear";
    case KappaWeighting::Quadratic: return "quadratic";
  }
  return "unknown";
}

void PipelineConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::InvalidArgument, kStage, what);
  };
  require(max_degree >= 1 && max_degree <= 20, "max_degree must be in [1, 20]");
  require(normalized_length > 0.0, "normalized_length must be positive");
  require(tolerance_fraction >= 0.0 && tolerance_fraction <= 1.0, "tolerance_fraction must be in [0, 1]");
  require(max_interval > 0.0, "max_interval must be positive");
  require(grid_step > 0.0, "grid_step must be positive");
  require(slope_eps >= 0.0, "slope_eps must be non-negative");
  require(bootstrap_resamples >= 1, "bootstrap_resamples must be at least 1");
}

void apply_setting(PipelineConfig& config, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key == "max_degree") {
    config.max_degree = parse_number<int>(key, value);
  } else if (key == "normalized_length") {
    config.normalized_length = parse_number<double>(key, value);
  } else if (key == "tolerance_fraction" || key == "tolerance") {
    config.tolerance_fraction = parse_number<double>(key, value);
  } else if (key == "max_interval") {
    config.max_interval = parse_number<double>(key, value);
  } else if (key == "grid_step") {
    config.grid_step = parse_number<double>(key, value);
  } else if (key == "slope_eps") {
    config.slope_eps = parse_number<double>(key, value);
  } else if (key == "min_area") {
    config.min_area = parse_number<std::size_t>(key, value);
  } else if (key == "seed") {
    config.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "bootstrap_resamples") {
    config.bootstrap_resamples = parse_number<std::size_t>(key, value);
  } else if (key == "icc_form") {
    if (value == "icc1_1") config.icc_form = IccForm::OneWay;
    else if (value == "icc2_1") config.icc_form = IccForm::TwoWayAgreement;
    else if (value == "icc3_1") config.icc_form = IccForm::TwoWayConsistency;
    else throw Error(ErrorCode::InvalidArgument, kStage, "icc_form must be icc1_1, icc2_1 or icc3_1");
  } else if (key == "kappa_weighting") {
    if (value == "none") config.kappa_weighting = KappaWeighting::None;
    else if (value == "linear") config.kappa_weighting = KappaWeighting::Linear;
    else if (value == "quadratic") config.kappa_weighting = KappaWeighting::Quadratic;
    else throw Error(ErrorCode::InvalidArgument, kStage, "kappa_weighting must be none, linear or quadratic");
  } else {
    throw Error(ErrorCode::InvalidArgument, kStage, "unknown config key '" + std::string(key) + "'");
  }
}

PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Unreadable, kStage, "cannot open " + path.string());
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::ParseError, kStage, path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    }
    apply_setting(base, view.substr(0, eq), view.substr(eq + 1));
  }
  base.validate();
  return base;
}

nlohmann::json to_json(const PipelineConfig& config) {
  return {
      {"max_degree", config.max_degree},
      {"normalized_length", config.normalized_length},
      {"tolerance_fraction", config.tolerance_fraction},
      {"max_interval", config.max_interval},
      {"grid_step", config.grid_step},
      {"slope_eps", config.slope_eps},
      {"min_area", config.min_area},
      {"seed", config.seed},
      {"bootstrap_resamples", config.bootstrap_resamples},
      {"icc_form", std::string(to_string(config.icc_form))},
      {"kappa_weighting", std::string(to_string(config.kappa_weighting))},
  };
}

}  // namespace cobb
