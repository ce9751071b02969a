#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <random>

#include "cobb/centerline.hpp"
#include "cobb/synth.hpp"
#include "cobb/tilt_finder.hpp"
#include "test_support.hpp"

using namespace cobb;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

CurveFunction sinusoid(double amplitude = 30.0, double period = 572.0) {
  return CurveFunction{[=](double t) { return amplitude * std::sin(kTwoPi * t / period); },
                       [=](double t) { return amplitude * kTwoPi / period * std::cos(kTwoPi * t / period); },
                       0.0, 572.0};
}

CurveFunction negated(const CurveFunction& f) {
  return CurveFunction{[f](double t) { return -f.value(t); }, [f](double t) { return -f.slope(t); }, f.lo, f.hi};
}

std::vector<double> ts(const BreakpointSet& set) {
  std::vector<double> out;
  for (const auto& b : set.points) out.push_back(b.t);
  return out;
}

std::vector<BreakpointKind> kinds(const BreakpointSet& set) {
  std::vector<BreakpointKind> out;
  for (const auto& b : set.points) out.push_back(b.kind);
  return out;
}

// Real roots of f' in the open domain via companion-matrix eigenvalues of
// the derivative expressed in u = (t - c) / h.
std::vector<double> companion_roots(const SpineCurve& curve) {
  const SpineCurve d = curve.derivative(1);
  std::vector<double> a = d.scaled_coefficients();
  while (a.size() > 1 && std::abs(a.back()) < 1e-14 * std::abs(a.front() + 1.0)) a.pop_back();
  const int n = static_cast<int>(a.size()) - 1;
  if (n < 1) return {};
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) comp(i, n - 1) = -a[i] / a[n];
  const Eigen::VectorXcd eig = comp.eigenvalues();
  const double c = 0.5 * (d.domain_lo() + d.domain_hi());
  const double h = 0.5 * (d.domain_hi() - d.domain_lo());
  std::vector<double> roots;
  for (const auto& z : eig) {
    if (std::abs(z.imag()) > 1e-7 || std::abs(z.real()) >= 1.0) continue;
    // Polish with Newton on the t-scale derivative.
    double t = c + h * z.real();
    for (int it = 0; it < 20; ++it) {
      const double f2 = curve.derivative(2)(t);
      if (f2 == 0.0) break;
      t -= curve.slope(t) / f2;
    }
    roots.push_back(t);
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

std::vector<SpineCurve> fitted_grid_curves() {
  std::vector<SpineCurve> out;
  for (const auto& p : synth_test_grid()) {
    const SynthCase sc = generate(p);
    out.push_back(fit_curve(normalize_centerline(extract_centerline(sc.mask))));
  }
  return out;
}

}  // namespace

TEST_CASE("breakpoints of an exact sinusoid") {
  const BreakpointSet set = find_breakpoints(sinusoid());
  REQUIRE(set.points.size() == 5);
  const std::vector<double> expected{0, 143, 286, 429, 572};
  for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs(set.points[i].t - expected[i]) < 1e-5);
  CHECK(kinds(set) == std::vector<BreakpointKind>{BreakpointKind::Endpoint, BreakpointKind::Apex,
                                                  BreakpointKind::MidpointSplit, BreakpointKind::Apex,
                                                  BreakpointKind::Endpoint});
}

TEST_CASE("straight and flat curves are split at midpoints") {
  const std::vector<double> expected{0, 143, 286, 429, 572};
  const std::vector<BreakpointKind> expected_kinds{BreakpointKind::Endpoint, BreakpointKind::MidpointSplit,
                                                   BreakpointKind::MidpointSplit, BreakpointKind::MidpointSplit,
                                                   BreakpointKind::Endpoint};
  const auto line = find_breakpoints(SpineCurve::from_coefficients({2.0, 3.0}, 0.0, 572.0));
  CHECK(ts(line) == expected);
  CHECK(kinds(line) == expected_kinds);
  const auto flat = find_breakpoints(SpineCurve::from_coefficients({5.0}, 0.0, 572.0));
  CHECK(ts(flat) == expected);
  CHECK(kinds(flat) == expected_kinds);
}

TEST_CASE("breakpoint kinds print as lowercase names") {
  CHECK(to_string(BreakpointKind::Endpoint) == "endpoint");
  CHECK(to_string(BreakpointKind::Apex) == "apex");
  CHECK(to_string(BreakpointKind::MidpointSplit) == "midpoint_split");
}

TEST_CASE("most tilted point on sinusoid and degenerate curves") {
  const TiltPoint tp = find_most_tilted(sinusoid(), 143.0, 286.0);
  CHECK(std::abs(tp.t_star - 286.0) < 1e-3);
  CHECK(std::abs(tp.slope - (-30.0 * kTwoPi / 572.0)) < 1e-6);
  CHECK(tp.interval_lo == 143.0);
  CHECK(tp.interval_hi == 286.0);

  const TiltPoint lin = find_most_tilted(SpineCurve::from_coefficients({0.0, 0.7}, 0.0, 572.0), 143.0, 286.0);
  CHECK(lin.t_star == 143.0);
  CHECK(lin.slope == doctest::Approx(0.7));

  const TiltPoint flat = find_most_tilted(SpineCurve::from_coefficients({3.0}, 0.0, 572.0), 429.0, 572.0);
  CHECK(flat.t_star == 429.0);
  CHECK(flat.slope == 0.0);

  CHECK(cobb::testing::code_of([] { find_most_tilted(sinusoid(), 10.0, 10.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("breakpoint partition properties on fitted curves") {
  for (const SpineCurve& c : fitted_grid_curves()) {
    const BreakpointSet set = find_breakpoints(c);
    REQUIRE(set.points.size() >= 2);
    CHECK(set.points.front().t == 0.0);
    CHECK(set.points.back().t == 572.0);
    for (const auto& [lo, hi] : set.intervals()) {
      CHECK(hi > lo);
      CHECK(hi - lo <= 250.0);
    }
    const auto tilts = find_tilt_points(c.as_function(), set);
    CHECK(tilts.size() + 1 == set.points.size());
    for (const auto& tp : tilts) {
      CHECK(tp.t_star >= tp.interval_lo);
      CHECK(tp.t_star <= tp.interval_hi);
      double grid_best = 0.0;
      for (double t = tp.interval_lo; t <= tp.interval_hi; t += 0.1) grid_best = std::max(grid_best, std::abs(c.slope(t)));
      grid_best = std::max(grid_best, std::abs(c.slope(tp.interval_hi)));
      CHECK(std::abs(tp.slope) >= grid_best - 1e-6);
    }
  }
}

TEST_CASE("apex breakpoints match companion-matrix roots") {
  for (const SpineCurve& c : fitted_grid_curves()) {
    const auto roots = companion_roots(c);
    const BreakpointSet set = find_breakpoints(c);
    for (const auto& b : set.points) {
      if (b.kind != BreakpointKind::Apex) continue;
      double nearest = 1e9;
      for (double r : roots) nearest = std::min(nearest, std::abs(r - b.t));
      CHECK(nearest < 1e-5);
    }
    // Every well-separated sign change of f' is reported as an apex.
    for (std::size_t i = 0; i < roots.size(); ++i) {
      const double r = roots[i];
      const bool separated = r > 2.0 && r < 570.0 && (i == 0 || r - roots[i - 1] > 2.0) &&
                             (i + 1 == roots.size() || roots[i + 1] - r > 2.0);
      const bool crosses = c.slope(r - 0.5) * c.slope(r + 0.5) < 0.0 &&
                           std::abs(c.slope(r - 0.5)) > 1e-5 && std::abs(c.slope(r + 0.5)) > 1e-5;
      if (!separated || !crosses) continue;
      bool found = false;
      for (const auto& b : set.points) found |= b.kind == BreakpointKind::Apex && std::abs(b.t - r) < 1e-5;
      CHECK(found);
    }
  }
}

TEST_CASE("mirroring the curve keeps breakpoints and negates slopes") {
  std::vector<CurveFunction> curves{sinusoid(), sinusoid(12.0, 300.0)};
  for (const SpineCurve& c : fitted_grid_curves()) curves.push_back(c.as_function());
  for (const CurveFunction& f : curves) {
    const BreakpointSet a = find_breakpoints(f);
    const BreakpointSet b = find_breakpoints(negated(f));
    CHECK(ts(a) == ts(b));
    CHECK(kinds(a) == kinds(b));
    const auto ta = find_tilt_points(f, a);
    const auto tb = find_tilt_points(negated(f), b);
    REQUIRE(ta.size() == tb.size());
    for (std::size_t i = 0; i < ta.size(); ++i) {
      CHECK(ta[i].t_star == tb[i].t_star);
      CHECK(ta[i].slope == -tb[i].slope);
    }
  }
}

TEST_CASE("max_interval controls the split depth") {
  TiltConfig cfg;
  cfg.max_interval = 600.0;
  CHECK(find_breakpoints(SpineCurve::from_coefficients({0.0, 1.0}, 0.0, 572.0), cfg).points.size() == 2);
  cfg.max_interval = 100.0;
  const auto set = find_breakpoints(SpineCurve::from_coefficients({0.0, 1.0}, 0.0, 572.0), cfg);
  CHECK(set.points.size() == 9);
  for (const auto& [lo, hi] : set.intervals()) CHECK(hi - lo == doctest::Approx(71.5));
}
