#include "celldiv/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "celldiv/errors.hpp"

namespace celldiv {

namespace {

constexpr double kCollinearTolerance = 1e-9;
constexpr double kRateBoundLimit = 1e3;
constexpr int kRateBoundSamples = 64;

struct DeathOrder {
  template <class T>
  bool operator()(const T& a, const T& b) const noexcept {
    if (a.cell.death_time != b.cell.death_time) return a.cell.death_time > b.cell.death_time;
    return a.cell.index > b.cell.index;
  }
};

bool segment_less(const Segment& a, const Segment& b) noexcept {
  if (a.p != b.p) return a.p < b.p;
  return a.q < b.q;
}

Segment canonical(Segment s) noexcept {
  if (s.q < s.p) std::swap(s.p, s.q);
  return s;
}

// True if the segment lies along one edge of V.
bool along_boundary(const Segment& s, const Polygon& V, double tol) {
  const auto v = V.vertices();
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = v[i];
    const Point e = v[(i + 1) % n] - a;
    const double len = norm(e);
    if (std::abs(cross(e, s.p - a)) <= tol * len && std::abs(cross(e, s.q - a)) <= tol * len) {
      return true;
    }
  }
  return false;
}

CroppedTessellation crop_segments(std::span<const Segment> source, const Polygon& source_window,
                                  const Polygon& V, double time) {
  if (!source_window.contains(V)) {
    throw ContainmentViolation("crop window is not contained in the tessellation window");
  }
  const double tol = kCollinearTolerance * V.diameter();
  std::vector<Segment> kept;
  kept.reserve(source.size());
  for (const Segment& s : source) {
    auto clipped = clip_segment(s, V);
    if (!clipped || along_boundary(*clipped, V, tol)) continue;
    kept.push_back(*clipped);
  }
  return {V, merge_collinear(std::move(kept), V.diameter()), time};
}

}  // namespace

// ---------------------------------------------------------------------------
// ProcessState

ProcessState::ProcessState(Polygon window, RulePair rules, std::uint64_t seed)
    : window_(std::move(window)), rules_(std::move(rules)), seed_(seed) {
  validate(rules_);
  spawn(window_, 0.0);
}

ProcessState new_process(Polygon window, RulePair rules, std::uint64_t seed) {
  return ProcessState(std::move(window), std::move(rules), seed);
}

void ProcessState::spawn(Polygon polygon, double birth_time) {
  const std::uint64_t index = next_index_++;
  Rng stream(seed_, index);
  const double r = rate(rules_.selection, polygon);
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw ReplicateAborted("selection rule returned a non-positive rate");
  }
  double death = birth_time + stream.exponential() / r;
  if (!(death > birth_time)) death = std::nextafter(birth_time, std::numeric_limits<double>::infinity());
  heap_.push_back({Cell{std::move(polygon), birth_time, death, r, index}, stream});
  std::push_heap(heap_.begin(), heap_.end(), DeathOrder{});
}

void ProcessState::advance(double t) {
  if (!(t >= clock_)) throw std::invalid_argument("cannot advance a process backwards in time");
  while (!heap_.empty() && heap_.front().cell.death_time <= t) {
    std::pop_heap(heap_.begin(), heap_.end(), DeathOrder{});
    LiveCell dying = std::move(heap_.back());
    heap_.pop_back();
    if (++events_ > kMaxEvents) throw ReplicateAborted("event cap exceeded");

    const double now = dying.cell.death_time;
    Division d = divide_cell(rules_.division, dying.cell.polygon, dying.stream);
    segments_.push_back({d.trace, now});
    spawn(std::move(d.plus), now);
    spawn(std::move(d.minus), now);
#ifndef NDEBUG
    check_invariants();
#endif
  }
  clock_ = t;
}

std::vector<Cell> ProcessState::live_cells() const {
  std::vector<Cell> cells;
  cells.reserve(heap_.size());
  for (const LiveCell& c : heap_) cells.push_back(c.cell);
  std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) { return a.index < b.index; });
  return cells;
}

void ProcessState::check_invariants() const {
  double area = 0.0;
  for (const LiveCell& c : heap_) {
    area += c.cell.polygon.area();
    if (!(c.cell.death_time > c.cell.birth_time)) {
      throw std::logic_error("cell death time does not follow its birth time");
    }
    if (c.cell.death_time < clock_) throw std::logic_error("live cell died before the clock");
    const double r = rate(rules_.selection, c.cell.polygon);
    if (std::abs(r - c.cell.rate) > 1e-10 * std::max(1.0, r)) {
      throw std::logic_error("cell rate differs from the scheduled rate");
    }
  }
  if (std::abs(area - window_.area()) > 1e-9 * window_.area()) {
    throw std::logic_error("live cells do not tile the window");
  }
  const double tol = 1e-9 * window_.diameter();
  for (const TimedSegment& s : segments_) {
    if (!window_.contains(s.segment.p, tol) || !window_.contains(s.segment.q, tol)) {
      throw std::logic_error("segment leaves the window");
    }
  }
}

// ---------------------------------------------------------------------------
// Cropping

std::vector<Segment> merge_collinear(std::vector<Segment> segments, double scale) {
  struct Keyed {
    double theta;
    double offset;
    double s0;
    double s1;
    Point start;
    Point end;
    const Segment* source;
  };
  const double angle_tol = kCollinearTolerance;
  const double offset_tol = kCollinearTolerance * scale;

  std::vector<Keyed> keyed;
  keyed.reserve(segments.size());
  for (const Segment& s : segments) {
    const Point d = s.q - s.p;
    double theta = std::atan2(d.x, -d.y);  // angle of the normal (-dy, dx)
    if (theta < 0.0) theta += std::numbers::pi;
    if (theta >= std::numbers::pi) theta -= std::numbers::pi;
    if (theta > std::numbers::pi - angle_tol) theta -= std::numbers::pi;
    const Point u = unit_normal(theta);
    const Point t{-u.y, u.x};
    const double sp = dot(s.p, t);
    const double sq = dot(s.q, t);
    keyed.push_back({theta, dot(s.p, u), std::min(sp, sq), std::max(sp, sq),
                     sp <= sq ? s.p : s.q, sp <= sq ? s.q : s.p, &s});
  }
  std::sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
    if (a.theta != b.theta) return a.theta < b.theta;
    if (a.offset != b.offset) return a.offset < b.offset;
    return a.s0 < b.s0;
  });

  std::vector<Segment> out;
  out.reserve(segments.size());
  auto flush_line = [&](std::vector<Keyed>& line) {
    std::sort(line.begin(), line.end(), [](const Keyed& a, const Keyed& b) { return a.s0 < b.s0; });
    std::size_t i = 0;
    while (i < line.size()) {
      std::size_t j = i;
      double reach = line[i].s1;
      Point end = line[i].end;
      while (j + 1 < line.size() && line[j + 1].s0 <= reach + offset_tol) {
        ++j;
        if (line[j].s1 > reach) {
          reach = line[j].s1;
          end = line[j].end;
        }
      }
      out.push_back(j == i ? canonical(*line[i].source) : canonical(Segment{line[i].start, end}));
      i = j + 1;
    }
    line.clear();
  };

  // Group by direction, then by offset within a direction group.
  std::size_t i = 0;
  std::vector<Keyed> group;
  std::vector<Keyed> line;
  while (i < keyed.size()) {
    std::size_t j = i + 1;
    while (j < keyed.size() && keyed[j].theta - keyed[j - 1].theta <= angle_tol) ++j;
    group.assign(keyed.begin() + static_cast<std::ptrdiff_t>(i),
                 keyed.begin() + static_cast<std::ptrdiff_t>(j));
    std::sort(group.begin(), group.end(),
              [](const Keyed& a, const Keyed& b) { return a.offset < b.offset; });
    for (std::size_t k = 0; k < group.size(); ++k) {
      if (!line.empty() && group[k].offset - line.back().offset > offset_tol) flush_line(line);
      line.push_back(group[k]);
    }
    flush_line(line);
    i = j;
  }
  std::sort(out.begin(), out.end(), segment_less);
  return out;
}

CroppedTessellation crop(const ProcessState& state, const Polygon& V) {
  std::vector<Segment> segs;
  segs.reserve(state.segments().size());
  for (const TimedSegment& s : state.segments()) segs.push_back(s.segment);
  return crop_segments(segs, state.window(), V, state.clock());
}

CroppedTessellation crop(const CroppedTessellation& tessellation, const Polygon& V) {
  return crop_segments(tessellation.segments, tessellation.window, V, tessellation.time);
}

std::vector<CroppedTessellation> snapshots(ProcessState& state, std::span<const double> times) {
  if (!std::is_sorted(times.begin(), times.end())) {
    throw std::invalid_argument("snapshot times must be ascending");
  }
  std::vector<CroppedTessellation> out;
  out.reserve(times.size());
  for (double t : times) {
    state.advance(t);
    out.push_back(crop(state, state.window()));
  }
  return out;
}

void guard_rate_bound(const RulePair& rules, const Polygon& window, std::uint64_t seed) {
  validate(rules);
  Rng rng(seed, 0x6b5f6b5f6b5fULL);
  const double k_hat = check_bound(rules.selection, window, kRateBoundSamples, rng);
  if (k_hat > kRateBoundLimit) {
    throw ConfigError("selection rule violates the rate bound on the window (k_hat = " +
                      std::to_string(k_hat) + ")");
  }
}

}  // namespace celldiv
