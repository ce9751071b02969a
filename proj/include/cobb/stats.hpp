#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "cobb/config.hpp"
#include "cobb/mask_io.hpp"

namespace cobb {

/// Main Cobb angles, one row per case and one column per reader, plus the
/// optional algorithm column.
struct ReaderTable {
  std::vector<std::string> case_ids;
  std::vector<std::string> readers;
  std::vector<std::vector<double>> angles;  // angles[case][reader]
  std::optional<std::vector<double>> algorithm;

  std::size_t case_count() const noexcept { return case_ids.size(); }
  std::size_t reader_count() const noexcept { return readers.size(); }
  std::vector<double> reader_column(std::size_t reader) const;

  /// Reader columns followed by the algorithm column when present.
  std::vector<std::vector<double>> columns() const;
  std::vector<std::string> column_labels() const;

  /// Throws InvalidArgument on shape, label or value violations.
  void validate() const;
};

inline constexpr const char* kAlgorithmColumn = "dl";

/// CSV header `case_id,<reader>...[,dl]`. Parse errors carry row/column.
ReaderTable parse_reader_table(std::istream& in, const std::string& source = "<stream>");
ReaderTable load_reader_table(const std::filesystem::path& path);
void write_reader_table(const ReaderTable& table, std::ostream& out);

struct ConsensusDistance {
  double d_mean_bar = 0.0;
  double d_median_bar = 0.0;
};

/// Mean over cases of |reader mean - algorithm| and |reader median - algorithm|.
ConsensusDistance consensus_distance(const ReaderTable& table);

double median(std::vector<double> values);

using Matrix = std::vector<std::vector<double>>;

struct PairwiseMad {
  Matrix matrix;  // over columns(): readers then algorithm
  double d_readers_bar = 0.0;
  std::optional<double> d_readers_dl_bar;
};

double mean_absolute_difference(std::span<const double> a, std::span<const double> b);
PairwiseMad pairwise_mad(const ReaderTable& table);

double pearson(std::span<const double> a, std::span<const double> b);

/// Single-rater ICC over an n x k table (rows are cases). Two-way forms use
/// the ANOVA mean squares for rows, columns and residual.
double icc(const Matrix& ratings, IccForm form = IccForm::TwoWayAgreement);
double icc(std::span<const double> a, std::span<const double> b, IccForm form = IccForm::TwoWayAgreement);

inline constexpr int kGradeCount = 5;

double cohen_kappa(std::span<const int> a, std::span<const int> b, KappaWeighting weighting = KappaWeighting::None);

struct ClassificationMetrics {
  double accuracy = 0.0;
  std::array<std::optional<double>, kGradeCount> per_class_f1;  // empty when a class never occurs
  std::optional<double> f1_binary;                               // positive = grade >= 1
};

ClassificationMetrics classification_metrics(std::span<const int> predicted, std::span<const int> reference);

struct ConfidenceInterval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Percentile bootstrap (2.5%, 97.5%) of the mean.
ConfidenceInterval bootstrap_ci(std::span<const double> values, std::size_t resamples = 10000, std::uint64_t seed = 0);

double dice(const SpineMask& a, const SpineMask& b);
double iou_box(const RoiBox& a, const RoiBox& b);

struct AgreementReport {
  std::size_t case_count = 0;
  std::vector<std::string> labels;
  std::optional<ConsensusDistance> consensus;
  Matrix mad_matrix;
  std::vector<double> mean_mad_to_others;
  double d_readers_bar = 0.0;
  std::optional<double> d_readers_dl_bar;
  Matrix pearson_matrix;  // NaN where undefined
  Matrix icc_matrix;
  Matrix kappa_matrix;
  std::optional<double> accuracy;   // algorithm vs each reader, averaged
  std::optional<double> f1_binary;  // same, over the defined values
  std::vector<std::pair<std::string, ConfidenceInterval>> ci_95;
  PipelineConfig config;
};

AgreementReport build_agreement_report(const ReaderTable& table, const PipelineConfig& config = {});

nlohmann::json to_json(const AgreementReport& report);

/// Human-readable summary, angles with two decimals.
std::string format_summary(const AgreementReport& report);

}  // namespace cobb
