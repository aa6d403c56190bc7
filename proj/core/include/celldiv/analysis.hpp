#pragma once

// Statistics of cropped tessellations, two-sample consistency tests, the
// small-Δt hitting-rate estimator and the analytic identity checks that
// characterize spatially consistent cell-division processes.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "celldiv/engine.hpp"
#include "celldiv/geometry.hpp"
#include "celldiv/rules.hpp"

namespace celldiv {

using Probe = std::variant<Polygon, Segment>;

struct WindowStats {
  double total_length = 0.0;
  std::size_t segment_count = 0;
  /// Segment endpoints strictly inside the window.
  std::size_t interior_endpoints = 0;
  std::vector<bool> probe_hits;

  bool operator==(const WindowStats&) const = default;
};

/// Throws ContainmentViolation if a probe is not inside the window.
WindowStats window_stats(const CroppedTessellation& tessellation, std::span<const Probe> probes);

/// 3×3 grid of 32-gon disks of radius 0.1 · side over the bounding box of V;
/// disks that do not fit inside V are left out.
std::vector<Probe> default_probes(const Polygon& V);

// ---------------------------------------------------------------------------
// Hypothesis tests

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Survival function of the Kolmogorov distribution.
double kolmogorov_survival(double lambda) noexcept;

/// Two-sided two-sample Kolmogorov–Smirnov test with the asymptotic p-value
/// (effective-size corrected). Needs at least 20 values per sample.
TestResult ks_two_sample(std::span<const double> a, std::span<const double> b);

/// One-sample KS test of `sample` against a continuous CDF.
TestResult ks_one_sample(std::span<const double> sample, const std::function<double(double)>& cdf);

/// Pearson chi-square test of equal hit frequencies (1 degree of freedom).
TestResult chi_square_2x2(std::size_t hits_a, std::size_t n_a, std::size_t hits_b, std::size_t n_b);

/// Holm step-down adjusted p-values, in input order.
std::vector<double> holm_adjust(std::span<const double> p_values);

// ---------------------------------------------------------------------------
// Consistency experiment

enum class Verdict { ConsistentNotRejected, InconsistentDetected };
std::string to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

struct StatisticResult {
  std::string statistic;  // total_length, segment_count, interior_endpoints, probe_<j>
  double time = 0.0;
  std::string test;  // "ks" or "chi2"
  double test_statistic = 0.0;
  /// KS distance, or difference of hit frequencies (V minus W) for probes.
  double effect_size = 0.0;
  double mean_v = 0.0;
  double mean_w = 0.0;
  double p_value = 1.0;
  double adjusted_p = 1.0;

  bool operator==(const StatisticResult&) const = default;
};

struct ConsistencyReport {
  std::string selection;
  std::string division;
  bool stit = false;
  std::vector<Point> subwindow;
  std::vector<Point> window;
  std::vector<double> times;
  std::size_t n_reps = 0;
  std::size_t aborted_v = 0;
  std::size_t aborted_w = 0;
  std::uint64_t seed = 0;
  double alpha = 0.001;
  std::vector<StatisticResult> results;
  double min_adjusted_p = 1.0;
  Verdict verdict = Verdict::ConsistentNotRejected;

  bool operator==(const ConsistencyReport&) const = default;
};

struct ConsistencyOptions {
  std::vector<double> times;
  std::size_t n_reps = 2000;
  std::optional<std::vector<Probe>> probes;
  double alpha = 0.001;
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

inline constexpr std::size_t kMinConsistencyReps = 100;

/// Compares Y(t, V) with Y(t, W) ∩ V at every requested time over n_reps
/// independent replicates per window. Statistic family: total length,
/// maximal segment count and interior endpoint count (two-sample KS) and
/// one hit indicator per probe (chi-square). p-values are Holm-adjusted
/// across the whole family; the verdict is InconsistentDetected iff the
/// smallest adjusted p-value is below alpha.
///
/// Aborted replicates are excluded and counted; more than 1% aborted on
/// either side raises ReplicateAborted.
ConsistencyReport consistency_test(const RulePair& rules, const Polygon& V, const Polygon& W,
                                   const ConsistencyOptions& options);

// ---------------------------------------------------------------------------
// Small-Δt hitting rate

struct RateEstimate {
  double dt = 0.0;
  std::size_t n_reps = 0;
  std::size_t hits = 0;
  /// hits / (n_reps · dt)
  double rate = 0.0;
  /// Binomial standard error of `rate`.
  double std_error = 0.0;
};

/// Estimates P(Y(V, dt) ∩ B ≠ ∅) / dt, which tends to λ(V) Λ_[V]([B]) as dt → 0.
/// Requires B ⊂ V and λ(V) · dt < 0.1.
RateEstimate rate_estimate(const RulePair& rules, const Polygon& V, const Polygon& B, double dt,
                           std::size_t n_reps, std::uint64_t seed, unsigned threads = 0);

// ---------------------------------------------------------------------------
// Hitting-measure limit

struct NuEstimate {
  std::vector<double> window_sizes;
  /// λ(W_n) Λ_[W_n]([probe] ∩ [W_n])
  std::vector<double> values;
  /// First index with probe ⊂ W_n.
  std::optional<std::size_t> contained_from;
  bool monotone = true;
  /// Contained at some n and constant from there on.
  bool limit_reached = false;

  double limit() const noexcept { return values.empty() ? 0.0 : values.back(); }
};

/// Evaluates the sequence on the given increasing windows.
NuEstimate nu_limit(const RulePair& rules, const Polygon& probe, std::span<const Polygon> windows);
/// Same on squares of the given sides centered at `center`.
NuEstimate nu_limit(const RulePair& rules, const Polygon& probe, std::span<const double> sides,
                    Point center = {0.0, 0.0});

// ---------------------------------------------------------------------------
// Identity suite

enum class Identity {
  Fundamental,  // λ(V) Λ_[V](H) = λ(W) Λ_[W](H) for H ⊂ [V]
  NuLimit,      // the window sequence is non-decreasing and settles
  Corollary,    // ν(H) = λ(W) Λ_[W](H) for H ⊂ [W]
  LambdaNu,     // λ(C) = ν([C]) and Λ_[C](H) = ν(H) / ν([C])
  RateBound,    // sampled k_C within the rule's theoretical bound
};

std::string to_string(Identity id);
Identity identity_from_string(const std::string& s);
std::vector<Identity> all_identities();

struct IdentityCheck {
  Identity identity;
  std::size_t cases = 0;
  double residual = 0.0;  // worst case
  double tolerance = 0.0;
  bool passed = false;

  bool operator==(const IdentityCheck&) const = default;
};

inline constexpr double kIdentityTolerance = 1e-10;

struct NestedTriple {
  Polygon W;
  Polygon V;
  Polygon B;
};

/// Random convex polygons W ⊃ V ⊃ B.
NestedTriple random_nested_triple(Rng& rng);

/// Runs each identity over `n_configs` random nested triples.
std::vector<IdentityCheck> verify_identities(const RulePair& rules, std::span<const Identity> which,
                                             std::size_t n_configs, std::uint64_t seed);

}  // namespace celldiv
