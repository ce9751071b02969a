#include "cobb/centerline.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <fstream>
#include <numeric>

#include "cobb/error.hpp"

namespace cobb {
namespace {

constexpr const char* kStage = "centerline";

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

SpineCurve::SpineCurve(std::vector<double> scaled, double lo, double hi)
    : scaled_(std::move(scaled)), lo_(lo), hi_(hi) {
  if (scaled_.empty()) scaled_.push_back(0.0);
}

SpineCurve SpineCurve::from_coefficients(const std::vector<double>& coefficients, double lo, double hi) {
  if (!(hi > lo)) throw Error(ErrorCode::InvalidArgument, kStage, "curve domain must satisfy lo < hi");
  const double c = 0.5 * (lo + hi);
  const double h = 0.5 * (hi - lo);
  const int d = coefficients.empty() ? 0 : static_cast<int>(coefficients.size()) - 1;
  std::vector<double> scaled(static_cast<std::size_t>(d) + 1, 0.0);
  // t^k = (c + h u)^k = sum_j C(k, j) c^(k-j) h^j u^j
  for (int k = 0; k <= d && !coefficients.empty(); ++k) {
    for (int j = 0; j <= k; ++j) {
      scaled[j] += coefficients[k] * binomial(k, j) * std::pow(c, k - j) * std::pow(h, j);
    }
  }
  return SpineCurve(std::move(scaled), lo, hi);
}

double SpineCurve::value(double t) const {
  const double u = (t - center()) / half_span();
  double acc = 0.0;
  for (auto it = scaled_.rbegin(); it != scaled_.rend(); ++it) acc = acc * u + *it;
  return acc;
}

double SpineCurve::slope(double t) const {
  const double u = (t - center()) / half_span();
  double acc = 0.0;
  for (std::size_t j = scaled_.size() - 1; j >= 1; --j) acc = acc * u + static_cast<double>(j) * scaled_[j];
  return acc / half_span();
}

SpineCurve SpineCurve::derivative(int order) const {
  if (order != 1 && order != 2) throw Error(ErrorCode::InvalidArgument, kStage, "derivative order must be 1 or 2");
  std::vector<double> cur = scaled_;
  for (int o = 0; o < order; ++o) {
    if (cur.size() <= 1) {
      cur.assign(1, 0.0);
      continue;
    }
    std::vector<double> next(cur.size() - 1);
    for (std::size_t j = 0; j < next.size(); ++j) next[j] = static_cast<double>(j + 1) * cur[j + 1] / half_span();
    cur = std::move(next);
  }
  return SpineCurve(std::move(cur), lo_, hi_);
}

std::vector<double> SpineCurve::coefficients() const {
  const double c = center();
  const double h = half_span();
  const int d = degree();
  std::vector<double> out(static_cast<std::size_t>(d) + 1, 0.0);
  // ((t - c) / h)^j = h^-j sum_k C(j, k) t^k (-c)^(j-k)
  for (int j = 0; j <= d; ++j) {
    const double a = scaled_[j] / std::pow(h, j);
    for (int k = 0; k <= j; ++k) out[k] += a * binomial(j, k) * std::pow(-c, j - k);
  }
  return out;
}

CurveFunction SpineCurve::as_function() const {
  return CurveFunction{[*this](double t) { return value(t); }, [*this](double t) { return slope(t); }, lo_, hi_};
}

CenterlinePolyline extract_centerline(const SpineMask& mask) {
  CenterlinePolyline line;
  line.points.reserve(static_cast<std::size_t>(mask.height()));
  for (int r = 0; r < mask.height(); ++r) {
    int best_start = -1;
    int best_len = 0;
    int c = 0;
    while (c < mask.width()) {
      if (!mask.at(r, c)) {
        ++c;
        continue;
      }
      const int start = c;
      while (c < mask.width() && mask.at(r, c)) ++c;
      if (c - start > best_len) {
        best_len = c - start;
        best_start = start;
      }
    }
    if (best_start < 0) continue;
    const double mid = 0.5 * (best_start + (best_start + best_len - 1));
    line.points.push_back({static_cast<double>(r), mid});
  }
  if (line.points.size() < kMinCenterlinePoints) {
    throw Error(ErrorCode::CenterlineTooShort, kStage,
                std::to_string(line.points.size()) + " usable rows, need at least " +
                    std::to_string(kMinCenterlinePoints));
  }
  return line;
}

NormalizedCenterline normalize_centerline(const CenterlinePolyline& line, double target_length) {
  const auto& pts = line.points;
  if (pts.size() < 2 || !(pts.back().t > pts.front().t)) {
    throw Error(ErrorCode::CenterlineTooShort, kStage, "centerline needs a positive cranio-caudal span");
  }
  if (!(target_length > 0.0)) throw Error(ErrorCode::InvalidArgument, kStage, "target length must be positive");
  NormalizedCenterline out;
  out.t_origin = pts.front().t;
  out.scale_factor = target_length / (pts.back().t - pts.front().t);
  out.x_center = std::accumulate(pts.begin(), pts.end(), 0.0,
                                 [](double acc, const CenterPoint& p) { return acc + p.x; }) /
                 static_cast<double>(pts.size());
  out.line.points.reserve(pts.size());
  for (const auto& p : pts) {
    out.line.points.push_back({(p.t - out.t_origin) * out.scale_factor, (p.x - out.x_center) * out.scale_factor});
  }
  out.line.points.back().t = target_length;
  return out;
}

SpineCurve fit_curve(const NormalizedCenterline& line, int max_degree) {
  const auto& pts = line.line.points;
  if (max_degree < 1) throw Error(ErrorCode::InvalidArgument, kStage, "max_degree must be at least 1");
  if (pts.size() < 2) throw Error(ErrorCode::FitFailed, kStage, "need at least two points to fit");
  const int d = std::min<int>(max_degree, static_cast<int>(pts.size()) - 1);
  const double lo = pts.front().t;
  const double hi = pts.back().t;
  if (!(hi > lo)) throw Error(ErrorCode::FitFailed, kStage, "degenerate fit domain");
  const double c = 0.5 * (lo + hi);
  const double h = 0.5 * (hi - lo);

  const Eigen::Index n = static_cast<Eigen::Index>(pts.size());
  Eigen::MatrixXd basis(n, d + 1);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = (pts[i].t - c) / h;
    double p = 1.0;
    for (int j = 0; j <= d; ++j) {
      basis(i, j) = p;
      p *= u;
    }
    rhs(i) = pts[i].x;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(basis);
  if (qr.rank() < d + 1) {
    throw Error(ErrorCode::FitFailed, kStage,
                "rank-deficient design matrix (rank " + std::to_string(qr.rank()) + " of " + std::to_string(d + 1) + ")");
  }
  const Eigen::VectorXd sol = qr.solve(rhs);
  if (!sol.allFinite()) throw Error(ErrorCode::FitFailed, kStage, "non-finite least-squares solution");

  SpineCurve curve(std::vector<double>(sol.data(), sol.data() + sol.size()), lo, hi);
  const Eigen::VectorXd resid = basis * sol - rhs;
  curve.rms_residual_ = std::sqrt(resid.squaredNorm() / static_cast<double>(n));
  if (!std::isfinite(curve.rms_residual_)) throw Error(ErrorCode::FitFailed, kStage, "non-finite residual");
  return curve;
}

SpineCurve curve_derivative(const SpineCurve& curve, int order) { return curve.derivative(order); }

void write_centerline_csv(const NormalizedCenterline& line, const SpineCurve& curve,
                          const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Unreadable, kStage, "cannot write " + path.string());
  out.precision(17);
  out << "t,x_raw,f_t\n";
  for (const auto& p : line.line.points) out << p.t << ',' << p.x << ',' << curve.value(p.t) << '\n';
}

}  // namespace cobb
