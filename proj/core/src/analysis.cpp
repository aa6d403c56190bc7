#include "celldiv/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "celldiv/errors.hpp"
#include "celldiv/parallel.hpp"

namespace celldiv {

namespace {

constexpr double kBoundaryTolerance = 1e-9;

double min_boundary_distance(const Polygon& V, Point p) {
  const auto v = V.vertices();
  const std::size_t n = v.size();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const Point e = v[(i + 1) % n] - v[i];
    best = std::min(best, cross(e, p - v[i]) / norm(e));
  }
  return best;
}

bool probe_inside(const Polygon& V, const Probe& probe) {
  if (const auto* poly = std::get_if<Polygon>(&probe)) return V.contains(*poly);
  const auto& s = std::get<Segment>(probe);
  const double tol = kSnapTolerance * V.diameter();
  return V.contains(s.p, tol) && V.contains(s.q, tol);
}

bool probe_hit(const Probe& probe, const Segment& s) {
  if (const auto* poly = std::get_if<Polygon>(&probe)) return intersects(s, *poly);
  return intersects(s, std::get<Segment>(probe));
}

double mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

}  // namespace

// ---------------------------------------------------------------------------
// Window statistics

WindowStats window_stats(const CroppedTessellation& tessellation, std::span<const Probe> probes) {
  const Polygon& V = tessellation.window;
  for (const Probe& p : probes) {
    if (!probe_inside(V, p)) throw ContainmentViolation("probe is not inside the window");
  }
  WindowStats stats;
  stats.probe_hits.assign(probes.size(), false);
  const double tol = kBoundaryTolerance * V.diameter();
  for (const Segment& s : tessellation.segments) {
    stats.total_length += s.length();
    ++stats.segment_count;
    if (min_boundary_distance(V, s.p) > tol) ++stats.interior_endpoints;
    if (min_boundary_distance(V, s.q) > tol) ++stats.interior_endpoints;
    for (std::size_t j = 0; j < probes.size(); ++j) {
      if (!stats.probe_hits[j] && probe_hit(probes[j], s)) stats.probe_hits[j] = true;
    }
  }
  return stats;
}

std::vector<Probe> default_probes(const Polygon& V) {
  double xmin = V[0].x, xmax = V[0].x, ymin = V[0].y, ymax = V[0].y;
  for (const Point& p : V.vertices()) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  const double w = xmax - xmin;
  const double h = ymax - ymin;
  const double radius = 0.1 * std::min(w, h);
  std::vector<Probe> probes;
  for (int j = 0; j < 3; ++j) {
    for (int i = 0; i < 3; ++i) {
      const Point c{xmin + (i + 0.5) / 3.0 * w, ymin + (j + 0.5) / 3.0 * h};
      Polygon disk = Polygon::regular(c, radius, 32);
      if (V.contains(disk)) probes.emplace_back(std::move(disk));
    }
  }
  return probes;
}

// ---------------------------------------------------------------------------
// Hypothesis tests

double kolmogorov_survival(double lambda) noexcept {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.18) {
    // Small-argument form of the same series, converges quickly here.
    const double y = std::exp(-std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda));
    double sum = 0.0;
    double term = y;
    for (int k = 1; k < 100; ++k) {
      sum += term;
      const double next = std::pow(y, (2.0 * k + 1.0) * (2.0 * k + 1.0));
      if (next < 1e-300) break;
      term = next;
    }
    return std::clamp(1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * sum, 0.0, 1.0);
  }
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k < 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    if (term < 1e-300) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

TestResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 20 || b.size() < 20) {
    throw InsufficientSamples("two-sample KS test needs at least 20 values per sample");
  }
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double n = static_cast<double>(x.size());
  const double m = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  const double ne = std::sqrt(n * m / (n + m));
  return {d, kolmogorov_survival((ne + 0.12 + 0.11 / ne) * d)};
}

TestResult ks_one_sample(std::span<const double> sample,
                         const std::function<double(double)>& cdf) {
  if (sample.size() < 20) throw InsufficientSamples("one-sample KS test needs at least 20 values");
  std::vector<double> x(sample.begin(), sample.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  const double ne = std::sqrt(n);
  return {d, kolmogorov_survival((ne + 0.12 + 0.11 / ne) * d)};
}

TestResult chi_square_2x2(std::size_t hits_a, std::size_t n_a, std::size_t hits_b,
                          std::size_t n_b) {
  if (hits_a > n_a || hits_b > n_b || n_a == 0 || n_b == 0) {
    throw std::invalid_argument("chi-square table counts are inconsistent");
  }
  const double na = static_cast<double>(n_a);
  const double nb = static_cast<double>(n_b);
  const double ha = static_cast<double>(hits_a);
  const double hb = static_cast<double>(hits_b);
  const double hits = ha + hb;
  const double misses = na + nb - hits;
  if (hits == 0.0 || misses == 0.0) return {0.0, 1.0};
  const double det = ha * (nb - hb) - hb * (na - ha);
  const double stat = (na + nb) * det * det / (na * nb * hits * misses);
  return {stat, std::erfc(std::sqrt(0.5 * stat))};
}

std::vector<double> holm_adjust(std::span<const double> p_values) {
  const std::size_t m = p_values.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });
  std::vector<double> adjusted(m);
  double running = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double scaled = std::min(1.0, static_cast<double>(m - k) * p_values[order[k]]);
    running = std::max(running, scaled);
    adjusted[order[k]] = running;
  }
  return adjusted;
}

// ---------------------------------------------------------------------------
// Consistency experiment

std::string to_string(Verdict v) {
  return v == Verdict::ConsistentNotRejected ? "consistent-not-rejected" : "inconsistent-detected";
}

Verdict verdict_from_string(const std::string& s) {
  if (s == "consistent-not-rejected") return Verdict::ConsistentNotRejected;
  if (s == "inconsistent-detected") return Verdict::InconsistentDetected;
  throw std::invalid_argument("unknown verdict: " + s);
}

ConsistencyReport consistency_test(const RulePair& rules, const Polygon& V, const Polygon& W,
                                   const ConsistencyOptions& options) {
  if (!W.contains(V)) throw ContainmentViolation("subwindow is not contained in the window");
  if (options.n_reps < kMinConsistencyReps) {
    throw std::invalid_argument("consistency test needs at least 100 replicates per window");
  }
  if (options.times.empty() || !std::is_sorted(options.times.begin(), options.times.end()) ||
      !(options.times.front() > 0.0)) {
    throw std::invalid_argument("times must be positive and ascending");
  }
  guard_rate_bound(rules, W, options.seed);

  const std::vector<Probe> probes = options.probes ? *options.probes : default_probes(V);
  for (const Probe& p : probes) {
    if (!probe_inside(V, p)) throw ContainmentViolation("probe is not inside the subwindow");
  }

  const std::size_t n = options.n_reps;
  const std::size_t n_times = options.times.size();
  // [side][replicate][time]
  std::vector<std::vector<std::vector<WindowStats>>> stats(
      2, std::vector<std::vector<WindowStats>>(n));
  std::vector<std::vector<char>> aborted(2, std::vector<char>(n, 0));

  parallel_for(2 * n, options.threads, [&](std::size_t task) {
    const std::size_t side = task / n;
    const std::size_t rep = task % n;
    const Polygon& domain = side == 0 ? V : W;
    try {
      ProcessState state(domain, rules, derive_seed(options.seed, side, rep));
      std::vector<WindowStats> row;
      row.reserve(n_times);
      for (double t : options.times) {
        state.advance(t);
        row.push_back(window_stats(crop(state, V), probes));
      }
      stats[side][rep] = std::move(row);
    } catch (const ReplicateAborted&) {
      aborted[side][rep] = 1;
    }
  });

  ConsistencyReport report;
  report.selection = describe(rules.selection);
  report.division = describe(rules.division);
  report.stit = rules.is_stit();
  report.subwindow.assign(V.vertices().begin(), V.vertices().end());
  report.window.assign(W.vertices().begin(), W.vertices().end());
  report.times = options.times;
  report.n_reps = n;
  report.seed = options.seed;
  report.alpha = options.alpha;
  report.aborted_v = static_cast<std::size_t>(std::count(aborted[0].begin(), aborted[0].end(), 1));
  report.aborted_w = static_cast<std::size_t>(std::count(aborted[1].begin(), aborted[1].end(), 1));
  const std::size_t abort_limit = n / 100;
  if (report.aborted_v > abort_limit || report.aborted_w > abort_limit) {
    throw ReplicateAborted("more than 1% of replicates aborted");
  }

  auto column = [&](std::size_t side, std::size_t k, auto&& field) {
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t r = 0; r < n; ++r) {
      if (!aborted[side][r]) out.push_back(field(stats[side][r][k]));
    }
    return out;
  };

  for (std::size_t k = 0; k < n_times; ++k) {
    const double t = options.times[k];
    auto continuous = [&](const std::string& name, auto&& field) {
      const std::vector<double> a = column(0, k, field);
      const std::vector<double> b = column(1, k, field);
      const TestResult ks = ks_two_sample(a, b);
      report.results.push_back(
          {name, t, "ks", ks.statistic, ks.statistic, mean(a), mean(b), ks.p_value, 1.0});
    };
    continuous("total_length", [](const WindowStats& s) { return s.total_length; });
    continuous("segment_count",
               [](const WindowStats& s) { return static_cast<double>(s.segment_count); });
    continuous("interior_endpoints",
               [](const WindowStats& s) { return static_cast<double>(s.interior_endpoints); });
    for (std::size_t j = 0; j < probes.size(); ++j) {
      auto hit = [j](const WindowStats& s) { return s.probe_hits[j] ? 1.0 : 0.0; };
      const std::vector<double> a = column(0, k, hit);
      const std::vector<double> b = column(1, k, hit);
      const auto ha = static_cast<std::size_t>(std::accumulate(a.begin(), a.end(), 0.0));
      const auto hb = static_cast<std::size_t>(std::accumulate(b.begin(), b.end(), 0.0));
      const TestResult chi = chi_square_2x2(ha, a.size(), hb, b.size());
      const double fa = mean(a);
      const double fb = mean(b);
      report.results.push_back({"probe_" + std::to_string(j), t, "chi2", chi.statistic, fa - fb, fa,
                                fb, chi.p_value, 1.0});
    }
  }

  std::vector<double> raw;
  raw.reserve(report.results.size());
  for (const auto& r : report.results) raw.push_back(r.p_value);
  const std::vector<double> adjusted = holm_adjust(raw);
  report.min_adjusted_p = 1.0;
  for (std::size_t i = 0; i < adjusted.size(); ++i) {
    report.results[i].adjusted_p = adjusted[i];
    report.min_adjusted_p = std::min(report.min_adjusted_p, adjusted[i]);
  }
  report.verdict = report.min_adjusted_p < options.alpha ? Verdict::InconsistentDetected
                                                         : Verdict::ConsistentNotRejected;
  return report;
}

// ---------------------------------------------------------------------------
// Rate estimate

RateEstimate rate_estimate(const RulePair& rules, const Polygon& V, const Polygon& B, double dt,
                           std::size_t n_reps, std::uint64_t seed, unsigned threads) {
  if (!V.contains(B)) throw ContainmentViolation("probe B is not contained in V");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (n_reps == 0) throw std::invalid_argument("rate estimate needs at least one replicate");
  validate(rules);
  if (!(rate(rules.selection, V) * dt < 0.1)) {
    throw std::invalid_argument("dt too large: expected divisions in (0, dt) must stay below 0.1");
  }

  std::vector<char> hit(n_reps, 0);
  parallel_for(n_reps, threads, [&](std::size_t rep) {
    ProcessState state(V, rules, derive_seed(seed, 0x7a7e, rep));
    state.advance(dt);
    for (const TimedSegment& s : state.segments()) {
      if (intersects(s.segment, B)) {
        hit[rep] = 1;
        break;
      }
    }
  });

  RateEstimate est;
  est.dt = dt;
  est.n_reps = n_reps;
  est.hits = static_cast<std::size_t>(std::count(hit.begin(), hit.end(), 1));
  const double p = static_cast<double>(est.hits) / static_cast<double>(n_reps);
  est.rate = p / dt;
  est.std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(n_reps)) / dt;
  return est;
}

// ---------------------------------------------------------------------------
// Hitting-measure limit

NuEstimate nu_limit(const RulePair& rules, const Polygon& probe, std::span<const Polygon> windows) {
  validate(rules);
  NuEstimate est;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const Polygon& w = windows[i];
    est.window_sizes.push_back(w.diameter());
    est.values.push_back(rate(rules.selection, w) * division_hit_prob(rules.division, w, probe));
    if (!est.contained_from && w.contains(probe)) est.contained_from = i;
  }
  for (std::size_t i = 1; i < est.values.size(); ++i) {
    const double scale = std::max(std::abs(est.values[i]), std::abs(est.values[i - 1]));
    if (est.values[i] < est.values[i - 1] - kIdentityTolerance * scale) est.monotone = false;
  }
  if (est.contained_from) {
    const double settled = est.values[*est.contained_from];
    est.limit_reached = true;
    for (std::size_t i = *est.contained_from; i < est.values.size(); ++i) {
      if (std::abs(est.values[i] - settled) > kIdentityTolerance * std::abs(settled)) {
        est.limit_reached = false;
      }
    }
  }
  return est;
}

NuEstimate nu_limit(const RulePair& rules, const Polygon& probe, std::span<const double> sides,
                    Point center) {
  if (!std::is_sorted(sides.begin(), sides.end())) {
    throw std::invalid_argument("window sizes must be ascending");
  }
  std::vector<Polygon> windows;
  windows.reserve(sides.size());
  for (double s : sides) windows.push_back(Polygon::centered_square(s, center));
  NuEstimate est = nu_limit(rules, probe, windows);
  est.window_sizes.assign(sides.begin(), sides.end());
  return est;
}

// ---------------------------------------------------------------------------
// Identity suite

std::string to_string(Identity id) {
  switch (id) {
    case Identity::Fundamental: return "fundamental";
    case Identity::NuLimit: return "nu_limit";
    case Identity::Corollary: return "corollary";
    case Identity::LambdaNu: return "lambda_nu";
    case Identity::RateBound: return "rate_bound";
  }
  return "unknown";
}

Identity identity_from_string(const std::string& s) {
  for (Identity id : all_identities()) {
    if (to_string(id) == s) return id;
  }
  throw std::invalid_argument("unknown identity: " + s);
}

std::vector<Identity> all_identities() {
  return {Identity::Fundamental, Identity::NuLimit, Identity::Corollary, Identity::LambdaNu,
          Identity::RateBound};
}

NestedTriple random_nested_triple(Rng& rng) {
  auto hull_in = [&rng](const Polygon& outer, int count) {
    for (;;) {
      std::vector<Point> pts;
      for (int i = 0; i < count; ++i) pts.push_back(sample_uniform_point(outer, rng));
      try {
        Polygon p = convex_hull(pts);
        if (outer.contains(p) && p.area() > 1e-3 * outer.area()) return p;
      } catch (const InvalidPolygon&) {
      }
    }
  };
  const Point center{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
  const double radius = rng.uniform(1.0, 3.0);
  const Polygon disk = Polygon::regular(center, radius, 64);
  Polygon W = hull_in(disk, 10);
  Polygon V = hull_in(W, 8);
  Polygon B = hull_in(V, 6);
  return {std::move(W), std::move(V), std::move(B)};
}

namespace {

double relative(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

std::vector<double> doubling_sides(const Polygon& around) {
  std::vector<double> sides;
  for (int k = -2; k <= 4; ++k) sides.push_back(around.diameter() * std::ldexp(1.0, k));
  return sides;
}

// ν(H) read off the window sequence: its value on a square that contains W
// with room to spare.
NuEstimate nu_sequence(const RulePair& rules, const Polygon& probe, const Polygon& around) {
  const std::vector<double> sides = doubling_sides(around);
  return nu_limit(rules, probe, sides, around.centroid());
}

double bound_for(const SelectionRule& rule, const Polygon& cell) {
  if (is_monotone(rule)) return 1.0;
  const double n = static_cast<double>(vertex_count(cell));
  return (n + 2.0) / n;
}

}  // namespace

std::vector<IdentityCheck> verify_identities(const RulePair& rules, std::span<const Identity> which,
                                             std::size_t n_configs, std::uint64_t seed) {
  validate(rules);
  std::vector<NestedTriple> triples;
  triples.reserve(n_configs);
  Rng rng(seed, 0x1de);
  for (std::size_t i = 0; i < n_configs; ++i) triples.push_back(random_nested_triple(rng));

  const auto& sel = rules.selection;
  const auto& div = rules.division;
  auto lambda_hit = [&](const Polygon& cell, const Polygon& probe) {
    return rate(sel, cell) * division_hit_prob(div, cell, probe);
  };

  std::vector<IdentityCheck> out;
  for (Identity id : which) {
    IdentityCheck check{id, triples.size(), 0.0, kIdentityTolerance, false};
    for (std::size_t i = 0; i < triples.size(); ++i) {
      const NestedTriple& t = triples[i];
      double r = 0.0;
      switch (id) {
        case Identity::Fundamental:
          r = relative(lambda_hit(t.V, t.B), lambda_hit(t.W, t.B));
          break;
        case Identity::NuLimit: {
          const NuEstimate est = nu_sequence(rules, t.B, t.W);
          if (!est.monotone || !est.limit_reached) {
            double worst = 0.0;
            for (std::size_t k = 1; k < est.values.size(); ++k) {
              worst = std::max(worst, relative(est.values[k], est.values[k - 1]));
            }
            r = std::max(worst, kIdentityTolerance * 10.0);
          }
          break;
        }
        case Identity::Corollary:
          r = relative(nu_sequence(rules, t.B, t.W).limit(), lambda_hit(t.W, t.B));
          break;
        case Identity::LambdaNu: {
          const double nu_v = nu_sequence(rules, t.V, t.W).limit();
          const double nu_w = nu_sequence(rules, t.W, t.W).limit();
          const double nu_b = nu_sequence(rules, t.B, t.W).limit();
          r = std::max({relative(rate(sel, t.V), nu_v), relative(rate(sel, t.W), nu_w),
                        relative(division_hit_prob(div, t.V, t.B), nu_b / nu_v)});
          break;
        }
        case Identity::RateBound: {
          Rng bound_rng(seed, 0xb0 + i);
          for (const Polygon* cell : {&t.W, &t.V, &t.B}) {
            const double k_hat = check_bound(sel, *cell, 200, bound_rng);
            r = std::max(r, std::max(0.0, k_hat - bound_for(sel, *cell)));
          }
          break;
        }
      }
      check.residual = std::max(check.residual, r);
    }
    check.passed = check.residual < check.tolerance;
    out.push_back(check);
  }
  return out;
}

}  // namespace celldiv
