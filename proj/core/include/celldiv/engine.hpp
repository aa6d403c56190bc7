#pragma once

// Continuous-time cell-division process Y(t, W) in a convex window.
//
// Every cell draws its life time τ/λ(C), τ ~ Exp(1), at birth from its own
// random stream keyed by (seed, cell index); the dividing line is drawn from
// the same stream when the cell dies. Trajectories are therefore a pure
// function of (window, rules, seed) and independent of how many times or in
// what increments the process is advanced.

#include <cstdint>
#include <span>
#include <vector>

#include "celldiv/geometry.hpp"
#include "celldiv/rng.hpp"
#include "celldiv/rules.hpp"

namespace celldiv {

/// Hard cap on divisions per replicate.
inline constexpr std::uint64_t kMaxEvents = 10'000'000;

struct Cell {
  Polygon polygon;
  double birth_time;
  double death_time;
  double rate;
  std::uint64_t index;
};

struct TimedSegment {
  Segment segment;
  double birth_time;
};

class ProcessState {
 public:
  /// One live cell (the window) scheduled to die at Exp(1) / λ(W).
  ProcessState(Polygon window, RulePair rules, std::uint64_t seed);

  const Polygon& window() const noexcept { return window_; }
  const RulePair& rules() const noexcept { return rules_; }
  std::uint64_t seed() const noexcept { return seed_; }
  double clock() const noexcept { return clock_; }
  std::uint64_t events() const noexcept { return events_; }

  /// Division traces in the order they were created.
  std::span<const TimedSegment> segments() const noexcept { return segments_; }
  std::size_t cell_count() const noexcept { return heap_.size(); }
  /// Live cells ordered by index.
  std::vector<Cell> live_cells() const;
  /// Death time of the next cell to divide.
  double next_event_time() const noexcept { return heap_.front().cell.death_time; }

  /// Performs every division with death time <= t, then sets the clock to t.
  /// Throws std::invalid_argument if t < clock(), ReplicateAborted if a cell
  /// cannot be divided or the event cap is exceeded.
  void advance(double t);

  /// Throws std::logic_error naming the first violated state invariant.
  void check_invariants() const;

 private:
  struct LiveCell {
    Cell cell;
    Rng stream;
  };

  void spawn(Polygon polygon, double birth_time);

  Polygon window_;
  RulePair rules_;
  std::uint64_t seed_;
  double clock_ = 0.0;
  std::uint64_t events_ = 0;
  std::uint64_t next_index_ = 0;
  std::vector<LiveCell> heap_;  // min-heap on (death_time, index)
  std::vector<TimedSegment> segments_;
};

ProcessState new_process(Polygon window, RulePair rules, std::uint64_t seed);

/// Y(t, W) ∩ V as a set of maximal closed segments; the boundary of V is
/// not part of it.
struct CroppedTessellation {
  Polygon window;
  std::vector<Segment> segments;  // canonical: p < q, sorted
  double time = 0.0;

  friend bool operator==(const CroppedTessellation&, const CroppedTessellation&) = default;
};

/// Throws ContainmentViolation unless V lies in the source window.
CroppedTessellation crop(const ProcessState& state, const Polygon& V);
CroppedTessellation crop(const CroppedTessellation& tessellation, const Polygon& V);

/// Advances `state` through `times` (ascending) and records the full-window
/// tessellation at each one.
std::vector<CroppedTessellation> snapshots(ProcessState& state, std::span<const double> times);

/// Merges collinear segments that overlap or touch into maximal segments and
/// returns them in canonical order. `scale` sets the offset tolerance.
std::vector<Segment> merge_collinear(std::vector<Segment> segments, double scale);

/// Rejects rule pairs whose sampled rate bound k_C on the window exceeds 1e3.
void guard_rate_bound(const RulePair& rules, const Polygon& window, std::uint64_t seed);

}  // namespace celldiv
