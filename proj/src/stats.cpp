#include "cobb/stats.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "cobb/cobb.hpp"
#include "cobb/error.hpp"

namespace cobb {
namespace {

constexpr const char* kStage = "stats";
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

[[noreturn]] void fail(ErrorCode code, const std::string& message) { throw Error(code, kStage, message); }

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

void require_same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b) fail(ErrorCode::InvalidArgument, std::string(what) + ": inputs differ in length");
}

void check_grades(std::span<const int> g) {
  for (int v : g) {
    if (v < 0 || v >= kGradeCount) fail(ErrorCode::InvalidArgument, "grade " + std::to_string(v) + " outside 0..4");
  }
}

double quantile_sorted(const std::vector<double>& sorted, double p) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

template <typename F>
double or_nan(F&& f) {
  try {
    return f();
  } catch (const Error&) {
    return kNaN;
  }
}

std::vector<int> grades_of(const std::vector<double>& angles) {
  std::vector<int> out;
  out.reserve(angles.size());
  for (double a : angles) out.push_back(grade_severity(a).level);
  return out;
}

}  // namespace

std::vector<double> ReaderTable::reader_column(std::size_t reader) const {
  std::vector<double> col;
  col.reserve(angles.size());
  for (const auto& row : angles) col.push_back(row.at(reader));
  return col;
}

std::vector<std::vector<double>> ReaderTable::columns() const {
  std::vector<std::vector<double>> cols;
  for (std::size_t r = 0; r < readers.size(); ++r) cols.push_back(reader_column(r));
  if (algorithm) cols.push_back(*algorithm);
  return cols;
}

std::vector<std::string> ReaderTable::column_labels() const {
  auto labels = readers;
  if (algorithm) labels.emplace_back(kAlgorithmColumn);
  return labels;
}

void ReaderTable::validate() const {
  if (case_ids.size() < 2) fail(ErrorCode::InvalidArgument, "need at least two cases");
  if (readers.size() < 2) fail(ErrorCode::InvalidArgument, "need at least two readers");
  if (angles.size() != case_ids.size()) fail(ErrorCode::InvalidArgument, "row count does not match case ids");
  std::set<std::string> seen(readers.begin(), readers.end());
  if (seen.size() != readers.size() || seen.count(kAlgorithmColumn) != 0) {
    fail(ErrorCode::InvalidArgument, "reader labels must be unique and differ from 'dl'");
  }
  std::set<std::string> ids(case_ids.begin(), case_ids.end());
  if (ids.size() != case_ids.size()) fail(ErrorCode::InvalidArgument, "duplicate case_id");
  auto check_value = [](double v) {
    if (!std::isfinite(v) || v < 0.0) fail(ErrorCode::InvalidArgument, "angles must be finite and non-negative");
  };
  for (const auto& row : angles) {
    if (row.size() != readers.size()) fail(ErrorCode::InvalidArgument, "ragged angle row");
    std::for_each(row.begin(), row.end(), check_value);
  }
  if (algorithm) {
    if (algorithm->size() != case_ids.size()) fail(ErrorCode::InvalidArgument, "algorithm column length mismatch");
    std::for_each(algorithm->begin(), algorithm->end(), check_value);
  }
}

ReaderTable parse_reader_table(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t row = 0;
  auto where = [&](std::size_t r, std::size_t c) {
    return source + ": row " + std::to_string(r) + ", column " + std::to_string(c);
  };

  std::vector<std::string> header;
  while (header.empty() && std::getline(in, line)) {
    ++row;
    if (!trim(line).empty()) header = split_csv(line);
  }
  if (header.empty()) fail(ErrorCode::ParseError, source + ": empty file");
  if (header.front() != "case_id") fail(ErrorCode::ParseError, where(row, 1) + ": first header field must be 'case_id'");

  ReaderTable table;
  const bool has_dl = header.back() == kAlgorithmColumn;
  table.readers.assign(header.begin() + 1, header.end() - (has_dl ? 1 : 0));
  if (has_dl) table.algorithm.emplace();
  std::set<std::string> labels;
  for (std::size_t c = 1; c < header.size(); ++c) {
    if (header[c].empty()) fail(ErrorCode::ParseError, where(row, c + 1) + ": empty column label");
    if (!labels.insert(header[c]).second) {
      fail(ErrorCode::ParseError, where(row, c + 1) + ": duplicate column label '" + header[c] + "'");
    }
  }

  std::set<std::string> ids;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != header.size()) {
      fail(ErrorCode::ParseError, where(row, std::min(fields.size(), header.size()) + 1) + ": expected " +
                                      std::to_string(header.size()) + " fields, found " + std::to_string(fields.size()));
    }
    if (!ids.insert(fields[0]).second) fail(ErrorCode::ParseError, where(row, 1) + ": duplicate case_id '" + fields[0] + "'");
    table.case_ids.push_back(fields[0]);
    std::vector<double> values;
    for (std::size_t c = 1; c < fields.size(); ++c) {
      double v = 0.0;
      const auto& f = fields[c];
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (f.empty() || ec != std::errc() || ptr != f.data() + f.size() || !std::isfinite(v)) {
        fail(ErrorCode::ParseError, where(row, c + 1) + ": non-numeric value '" + f + "'");
      }
      if (v < 0.0) fail(ErrorCode::ParseError, where(row, c + 1) + ": negative angle");
      values.push_back(v);
    }
    if (has_dl) {
      table.algorithm->push_back(values.back());
      values.pop_back();
    }
    table.angles.push_back(std::move(values));
  }
  table.validate();
  return table;
}

ReaderTable load_reader_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Unreadable, "cannot open " + path.string());
  return parse_reader_table(in, path.string());
}

void write_reader_table(const ReaderTable& table, std::ostream& out) {
  out << "case_id";
  for (const auto& label : table.column_labels()) out << ',' << label;
  out << '\n';
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << ',' << buf;
  };
  for (std::size_t k = 0; k < table.case_count(); ++k) {
    out << table.case_ids[k];
    for (double v : table.angles[k]) put(v);
    if (table.algorithm) put((*table.algorithm)[k]);
    out << '\n';
  }
}

double median(std::vector<double> values) {
  if (values.empty()) fail(ErrorCode::InvalidArgument, "median of an empty set");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

ConsensusDistance consensus_distance(const ReaderTable& table) {
  if (!table.algorithm) fail(ErrorCode::MissingAlgorithmColumn, "table has no 'dl' column");
  ConsensusDistance out;
  const std::size_t n = table.case_count();
  for (std::size_t k = 0; k < n; ++k) {
    const auto& row = table.angles[k];
    const double d = (*table.algorithm)[k];
    out.d_mean_bar += std::abs(mean_of(row) - d);
    out.d_median_bar += std::abs(median(row) - d);
  }
  out.d_mean_bar /= static_cast<double>(n);
  out.d_median_bar /= static_cast<double>(n);
  return out;
}

double mean_absolute_difference(std::span<const double> a, std::span<const double> b) {
  require_same_length(a.size(), b.size(), "mean_absolute_difference");
  if (a.empty()) fail(ErrorCode::InvalidArgument, "mean_absolute_difference of empty vectors");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
  return acc / static_cast<double>(a.size());
}

PairwiseMad pairwise_mad(const ReaderTable& table) {
  const auto cols = table.columns();
  const std::size_t m = table.reader_count();
  PairwiseMad out;
  out.matrix.assign(cols.size(), std::vector<double>(cols.size(), 0.0));
  for (std::size_t a = 0; a < cols.size(); ++a) {
    for (std::size_t b = a + 1; b < cols.size(); ++b) {
      out.matrix[a][b] = out.matrix[b][a] = mean_absolute_difference(cols[a], cols[b]);
    }
  }
  double acc = 0.0;
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) {
      if (a != b) acc += out.matrix[a][b];
    }
  }
  out.d_readers_bar = acc / static_cast<double>(m * (m - 1));
  if (table.algorithm) {
    double dl = 0.0;
    for (std::size_t a = 0; a < m; ++a) dl += out.matrix[m][a];
    out.d_readers_dl_bar = dl / static_cast<double>(m);
  }
  return out;
}

double pearson(std::span<const double> a, std::span<const double> b) {
  require_same_length(a.size(), b.size(), "pearson");
  if (a.size() < 3) fail(ErrorCode::InvalidArgument, "pearson needs at least three cases");
  const double ma = mean_of(a);
  const double mb = mean_of(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) fail(ErrorCode::UndefinedCorrelation, "constant input vector");
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

double icc(const Matrix& ratings, IccForm form) {
  const std::size_t n = ratings.size();
  if (n < 3) fail(ErrorCode::InvalidArgument, "icc needs at least three cases");
  const std::size_t k = ratings.front().size();
  if (k < 2) fail(ErrorCode::InvalidArgument, "icc needs at least two raters");
  std::vector<double> row_mean(n, 0.0), col_mean(k, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (ratings[i].size() != k) fail(ErrorCode::InvalidArgument, "ragged ratings table");
    for (std::size_t j = 0; j < k; ++j) {
      row_mean[i] += ratings[i][j];
      col_mean[j] += ratings[i][j];
    }
  }
  const double dn = static_cast<double>(n);
  const double dk = static_cast<double>(k);
  for (auto& v : row_mean) v /= dk;
  for (auto& v : col_mean) v /= dn;
  const double grand = mean_of(col_mean);

  // Residual and within-row sums are accumulated directly so that exact
  // agreement yields exact zeros.
  double ss_rows = 0.0, ss_cols = 0.0, ss_error = 0.0, ss_within = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ss_rows += (row_mean[i] - grand) * (row_mean[i] - grand);
    for (std::size_t j = 0; j < k; ++j) {
      const double e = ratings[i][j] - row_mean[i] - col_mean[j] + grand;
      const double w = ratings[i][j] - row_mean[i];
      ss_error += e * e;
      ss_within += w * w;
    }
  }
  for (std::size_t j = 0; j < k; ++j) ss_cols += (col_mean[j] - grand) * (col_mean[j] - grand);
  ss_rows *= dk;
  ss_cols *= dn;

  const double ms_rows = ss_rows / (dn - 1.0);
  const double ms_cols = ss_cols / (dk - 1.0);
  const double ms_error = ss_error / ((dn - 1.0) * (dk - 1.0));
  const double ms_within = ss_within / (dn * (dk - 1.0));

  double num = 0.0, den = 0.0;
  switch (form) {
    case IccForm::OneWay:
      num = ms_rows - ms_within;
      den = ms_rows + (dk - 1.0) * ms_within;
      break;
    case IccForm::TwoWayAgreement:
      num = ms_rows - ms_error;
      den = ms_rows + (dk - 1.0) * ms_error + dk / dn * (ms_cols - ms_error);
      break;
    case IccForm::TwoWayConsistency:
      num = ms_rows - ms_error;
      den = ms_rows + (dk - 1.0) * ms_error;
      break;
  }
  if (den == 0.0) fail(ErrorCode::UndefinedICC, "zero ICC denominator");
  return num / den;
}

double icc(std::span<const double> a, std::span<const double> b, IccForm form) {
  require_same_length(a.size(), b.size(), "icc");
  Matrix table(a.size(), std::vector<double>(2));
  for (std::size_t i = 0; i < a.size(); ++i) table[i] = {a[i], b[i]};
  return icc(table, form);
}

double cohen_kappa(std::span<const int> a, std::span<const int> b, KappaWeighting weighting) {
  require_same_length(a.size(), b.size(), "cohen_kappa");
  if (a.size() < 2) fail(ErrorCode::InvalidArgument, "cohen_kappa needs at least two cases");
  check_grades(a);
  check_grades(b);
  const double n = static_cast<double>(a.size());
  std::array<std::array<double, kGradeCount>, kGradeCount> observed{};
  std::array<double, kGradeCount> row{}, col{};
  for (std::size_t i = 0; i < a.size(); ++i) {
    observed[a[i]][b[i]] += 1.0;
    row[a[i]] += 1.0;
    col[b[i]] += 1.0;
  }
  // Disagreement weights: 1 off the diagonal for the unweighted statistic.
  auto weight = [&](int i, int j) {
    const double d = std::abs(i - j) / static_cast<double>(kGradeCount - 1);
    switch (weighting) {
      case KappaWeighting::None: return i == j ? 0.0 : 1.0;
      case KappaWeighting::Linear: return d;
      case KappaWeighting::Quadratic: return d * d;
    }
    return 0.0;
  };
  double disagree_obs = 0.0, disagree_exp = 0.0;
  for (int i = 0; i < kGradeCount; ++i) {
    for (int j = 0; j < kGradeCount; ++j) {
      disagree_obs += weight(i, j) * observed[i][j];
      disagree_exp += weight(i, j) * row[i] * col[j];
    }
  }
  disagree_obs /= n;
  disagree_exp /= n * n;
  constexpr double kTiny = 1e-15;
  if (disagree_exp <= kTiny) {
    if (disagree_obs <= kTiny) return 1.0;
    fail(ErrorCode::UndefinedKappa, "chance agreement is 1 but observed agreement is not");
  }
  return 1.0 - disagree_obs / disagree_exp;
}

ClassificationMetrics classification_metrics(std::span<const int> predicted, std::span<const int> reference) {
  require_same_length(predicted.size(), reference.size(), "classification_metrics");
  if (predicted.empty()) fail(ErrorCode::InvalidArgument, "classification_metrics of empty input");
  check_grades(predicted);
  check_grades(reference);
  ClassificationMetrics out;
  std::size_t correct = 0;
  std::array<std::size_t, kGradeCount> tp{}, fp{}, fn{};
  std::size_t btp = 0, bfp = 0, bfn = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const int p = predicted[i];
    const int r = reference[i];
    if (p == r) {
      ++correct;
      ++tp[p];
    } else {
      ++fp[p];
      ++fn[r];
    }
    const bool pp = p >= 1;
    const bool rp = r >= 1;
    if (pp && rp) ++btp;
    else if (pp) ++bfp;
    else if (rp) ++bfn;
  }
  auto f1 = [](std::size_t t, std::size_t f_pos, std::size_t f_neg) -> std::optional<double> {
    if (t + f_pos + f_neg == 0) return std::nullopt;
    return 2.0 * t / static_cast<double>(2 * t + f_pos + f_neg);
  };
  out.accuracy = static_cast<double>(correct) / static_cast<double>(predicted.size());
  for (int c = 0; c < kGradeCount; ++c) out.per_class_f1[c] = f1(tp[c], fp[c], fn[c]);
  out.f1_binary = f1(btp, bfp, bfn);
  return out;
}

ConfidenceInterval bootstrap_ci(std::span<const double> values, std::size_t resamples, std::uint64_t seed) {
  if (values.empty()) fail(ErrorCode::InvalidArgument, "bootstrap of an empty sample");
  if (resamples == 0) fail(ErrorCode::InvalidArgument, "bootstrap needs at least one resample");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, values.size() - 1);
  std::vector<double> stats(resamples);
  for (auto& s : stats) {
    double acc = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) acc += values[pick(rng)];
    s = acc / static_cast<double>(values.size());
  }
  std::sort(stats.begin(), stats.end());
  return {quantile_sorted(stats, 0.025), quantile_sorted(stats, 0.975)};
}

double dice(const SpineMask& a, const SpineMask& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw Error(ErrorCode::GeometryMismatch, kStage, "dice needs masks of equal dimensions");
  }
  std::size_t inter = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.bits().size(); ++i) {
    na += a.bits()[i];
    nb += b.bits()[i];
    inter += a.bits()[i] & b.bits()[i];
  }
  if (na + nb == 0) fail(ErrorCode::UndefinedDice, "both masks are empty");
  return 2.0 * static_cast<double>(inter) / static_cast<double>(na + nb);
}

double iou_box(const RoiBox& a, const RoiBox& b) {
  const RoiBox inter{std::max(a.top, b.top), std::max(a.left, b.left), std::min(a.bottom, b.bottom),
                     std::min(a.right, b.right)};
  const double ia = (inter.bottom < inter.top || inter.right < inter.left)
                        ? 0.0
                        : static_cast<double>(inter.height()) * inter.width();
  const double area_a = static_cast<double>(a.height()) * a.width();
  const double area_b = static_cast<double>(b.height()) * b.width();
  return ia / (area_a + area_b - ia);
}

AgreementReport build_agreement_report(const ReaderTable& table, const PipelineConfig& config) {
  table.validate();
  AgreementReport rep;
  rep.config = config;
  rep.case_count = table.case_count();
  rep.labels = table.column_labels();
  const auto cols = table.columns();
  const std::size_t m = table.reader_count();
  const std::size_t c = cols.size();
  const std::size_t n = table.case_count();

  const PairwiseMad mad = pairwise_mad(table);
  rep.mad_matrix = mad.matrix;
  rep.d_readers_bar = mad.d_readers_bar;
  rep.d_readers_dl_bar = mad.d_readers_dl_bar;
  for (std::size_t a = 0; a < c; ++a) {
    double acc = 0.0;
    std::size_t cnt = 0;
    for (std::size_t b = 0; b < m; ++b) {
      if (b == a) continue;
      acc += mad.matrix[a][b];
      ++cnt;
    }
    rep.mean_mad_to_others.push_back(acc / static_cast<double>(cnt));
  }

  std::vector<std::vector<int>> grades;
  for (const auto& col : cols) grades.push_back(grades_of(col));
  rep.pearson_matrix.assign(c, std::vector<double>(c, kNaN));
  rep.icc_matrix.assign(c, std::vector<double>(c, kNaN));
  rep.kappa_matrix.assign(c, std::vector<double>(c, kNaN));
  for (std::size_t a = 0; a < c; ++a) {
    for (std::size_t b = a; b < c; ++b) {
      const double r = or_nan([&] { return pearson(cols[a], cols[b]); });
      const double i = or_nan([&] { return icc(cols[a], cols[b], config.icc_form); });
      const double k = or_nan([&] { return cohen_kappa(grades[a], grades[b], config.kappa_weighting); });
      rep.pearson_matrix[a][b] = rep.pearson_matrix[b][a] = (a == b && std::isfinite(r)) ? 1.0 : r;
      rep.icc_matrix[a][b] = rep.icc_matrix[b][a] = (a == b && std::isfinite(i)) ? 1.0 : i;
      rep.kappa_matrix[a][b] = rep.kappa_matrix[b][a] = (a == b && std::isfinite(k)) ? 1.0 : k;
    }
  }

  std::vector<double> per_case_readers(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& row = table.angles[k];
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        if (i != j) per_case_readers[k] += std::abs(row[i] - row[j]);
      }
    }
    per_case_readers[k] /= static_cast<double>(m * (m - 1));
  }

  std::uint64_t seed = config.seed;
  auto ci = [&](const std::string& name, const std::vector<double>& values) {
    rep.ci_95.emplace_back(name, bootstrap_ci(values, config.bootstrap_resamples, seed++));
  };

  if (table.algorithm) {
    rep.consensus = consensus_distance(table);
    const auto& dl = *table.algorithm;
    std::vector<double> per_mean(n), per_median(n), per_dl(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      per_mean[k] = std::abs(mean_of(table.angles[k]) - dl[k]);
      per_median[k] = std::abs(median(table.angles[k]) - dl[k]);
      for (double r : table.angles[k]) per_dl[k] += std::abs(dl[k] - r);
      per_dl[k] /= static_cast<double>(m);
    }
    ci("d_mean_bar", per_mean);
    ci("d_median_bar", per_median);
    ci("d_readers_bar", per_case_readers);
    ci("d_readers_dl_bar", per_dl);

    double acc = 0.0, f1 = 0.0;
    std::size_t f1_count = 0;
    for (std::size_t r = 0; r < m; ++r) {
      const auto cm = classification_metrics(grades[m], grades[r]);
      acc += cm.accuracy;
      if (cm.f1_binary) {
        f1 += *cm.f1_binary;
        ++f1_count;
      }
    }
    rep.accuracy = acc / static_cast<double>(m);
    if (f1_count > 0) rep.f1_binary = f1 / static_cast<double>(f1_count);
  } else {
    ci("d_readers_bar", per_case_readers);
  }
  return rep;
}

nlohmann::json to_json(const AgreementReport& report) {
  using nlohmann::json;
  auto matrix = [](const Matrix& m) {
    json out = json::array();
    for (const auto& row : m) {
      json r = json::array();
      for (double v : row) r.push_back(std::isfinite(v) ? json(v) : json(nullptr));
      out.push_back(r);
    }
    return out;
  };
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json ci = json::object();
  for (const auto& [name, interval] : report.ci_95) ci[name] = {interval.lo, interval.hi};
  return json{
      {"case_count", report.case_count},
      {"labels", report.labels},
      {"d_mean_bar", report.consensus ? json(report.consensus->d_mean_bar) : json(nullptr)},
      {"d_median_bar", report.consensus ? json(report.consensus->d_median_bar) : json(nullptr)},
      {"d_readers_bar", report.d_readers_bar},
      {"d_readers_dl_bar", opt(report.d_readers_dl_bar)},
      {"mad_matrix", matrix(report.mad_matrix)},
      {"mean_mad_to_others", report.mean_mad_to_others},
      {"pearson_matrix", matrix(report.pearson_matrix)},
      {"icc_matrix", matrix(report.icc_matrix)},
      {"kappa_matrix", matrix(report.kappa_matrix)},
      {"accuracy", opt(report.accuracy)},
      {"f1_binary", opt(report.f1_binary)},
      {"ci_95", ci},
      {"config", to_json(report.config)},
  };
}

std::string format_summary(const AgreementReport& report) {
  std::ostringstream out;
  char buf[128];
  auto line = [&](const char* label, double v, const char* unit) {
    std::snprintf(buf, sizeof(buf), "%-28s %8.2f%s\n", label, v, unit);
    out << buf;
  };
  auto find_ci = [&](const std::string& name) -> const ConfidenceInterval* {
    for (const auto& [n, c] : report.ci_95) {
      if (n == name) return &c;
    }
    return nullptr;
  };
  auto with_ci = [&](const char* label, const std::string& key, double v) {
    if (const auto* c = find_ci(key)) {
      std::snprintf(buf, sizeof(buf), "%-28s %8.2f deg  [95%% CI %.2f, %.2f]\n", label, v, c->lo, c->hi);
      out << buf;
    } else {
      line(label, v, " deg");
    }
  };

  out << "cases: " << report.case_count << ", columns:";
  for (const auto& l : report.labels) out << ' ' << l;
  out << '\n';
  if (report.consensus) {
    with_ci("D_mean (vs reader mean)", "d_mean_bar", report.consensus->d_mean_bar);
    with_ci("D_median (vs reader median)", "d_median_bar", report.consensus->d_median_bar);
  }
  with_ci("D_readers", "d_readers_bar", report.d_readers_bar);
  if (report.d_readers_dl_bar) with_ci("D_readers-DL", "d_readers_dl_bar", *report.d_readers_dl_bar);
  if (report.accuracy) line("severity accuracy", *report.accuracy, "");
  if (report.f1_binary) line("scoliosis F1 (grade >= 1)", *report.f1_binary, "");

  auto print_matrix = [&](const char* title, const Matrix& m) {
    out << title << '\n';
    std::snprintf(buf, sizeof(buf), "%10s", "");
    out << buf;
    for (const auto& l : report.labels) {
      std::snprintf(buf, sizeof(buf), "%10.10s", l.c_str());
      out << buf;
    }
    out << '\n';
    for (std::size_t a = 0; a < m.size(); ++a) {
      std::snprintf(buf, sizeof(buf), "%10.10s", report.labels[a].c_str());
      out << buf;
      for (double v : m[a]) {
        if (std::isfinite(v)) std::snprintf(buf, sizeof(buf), "%10.2f", v);
        else std::snprintf(buf, sizeof(buf), "%10s", "n/a");
        out << buf;
      }
      out << '\n';
    }
  };
  print_matrix("mean absolute difference (deg)", report.mad_matrix);
  print_matrix("pearson", report.pearson_matrix);
  print_matrix("icc", report.icc_matrix);
  print_matrix("cohen kappa (severity)", report.kappa_matrix);
  return out.str();
}

}  // namespace cobb
