#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cobb/cobb.hpp"
#include "cobb/config.hpp"
#include "cobb/synth.hpp"

namespace cobb::cli {

/// Exit codes: 0 success, 1 partial batch failure, 2 input or usage error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitPartial = 1;
inline constexpr int kExitInput = 2;

struct MeasureOptions {
  std::filesystem::path mask;
  std::optional<std::filesystem::path> image;
  std::optional<std::filesystem::path> json;
  std::optional<std::filesystem::path> svg;
  std::optional<std::filesystem::path> png;
  std::optional<std::filesystem::path> centerline_csv;
};

struct BatchOptions {
  std::filesystem::path dir;
  std::filesystem::path out;
  std::optional<std::filesystem::path> table;  // defaults to <out>/summary.csv
  bool overlays = false;
  unsigned threads = 0;  // 0 = hardware concurrency
};

struct StatsOptions {
  std::filesystem::path readers;
  std::optional<std::filesystem::path> report;
  std::optional<std::filesystem::path> summary;
};

struct SynthOptions {
  SynthParams params;
  std::uint64_t seed = 0;
  bool grid = false;
  std::filesystem::path out = ".";
};

int cmd_measure(const MeasureOptions& opts, const PipelineConfig& config, std::ostream& out, std::ostream& err);
int cmd_batch(const BatchOptions& opts, const PipelineConfig& config, std::ostream& out, std::ostream& err);
int cmd_stats(const StatsOptions& opts, const PipelineConfig& config, std::ostream& out, std::ostream& err);
int cmd_synth(const SynthOptions& opts, const PipelineConfig& config, std::ostream& out, std::ostream& err);

/// Serialized CaseResult exactly as written by `measure` and `batch`.
std::string case_json_text(const CaseResult& result);

/// Parses argv and dispatches to the subcommands above.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cobb::cli
