#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace courtmot {

// Exit-code mapping: ConfigError -> 2, DataError -> 3, anything else -> 4.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvariantError : std::logic_error {
  using std::logic_error::logic_error;
};

// Axis-aligned rectangle, half-open in spirit but stored as corner pair.
struct Rect {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
  bool degenerate() const { return width() <= 0.0 || height() <= 0.0; }

  bool contains(double x, double y) const {
    return x >= x0 && x <= x1 && y >= y0 && y <= y1;
  }
};

inline Rect intersect(const Rect& a, const Rect& b) {
  Rect r;
  r.x0 = std::max(a.x0, b.x0);
  r.y0 = std::max(a.y0, b.y0);
  r.x1 = std::min(a.x1, b.x1);
  r.y1 = std::min(a.y1, b.y1);
  return r;
}

inline Rect rect_union(const Rect& a, const Rect& b) {
  Rect r;
  r.x0 = std::min(a.x0, b.x0);
  r.y0 = std::min(a.y0, b.y0);
  r.x1 = std::max(a.x1, b.x1);
  r.y1 = std::max(a.y1, b.y1);
  return r;
}

// Intersection-over-union. Degenerate inputs are a contract violation.
double iou(const Rect& a, const Rect& b);

// Box on the world ground plane, center + extent in meters.
struct PlaneBox {
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;

  Rect rect() const { return Rect{cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2}; }
  double diagonal() const { return std::hypot(w, h); }
};

inline PlaneBox plane_box_from_rect(const Rect& r) {
  return PlaneBox{(r.x0 + r.x1) / 2, (r.y0 + r.y1) / 2, r.width(), r.height()};
}

struct TrackedBox {
  int id = 0;
  PlaneBox box;
};

// Per-frame object table shared by tracker output, GT and metrics.
// frames[i] holds frame number i+1; frame numbers are 1-based throughout.
struct SequenceTable {
  std::vector<std::vector<TrackedBox>> frames;

  int frame_count() const { return static_cast<int>(frames.size()); }

  std::vector<TrackedBox>& frame(int t) { return frames.at(t - 1); }
  const std::vector<TrackedBox>& frame(int t) const { return frames.at(t - 1); }

  const TrackedBox* find(int t, int id) const {
    if (t < 1 || t > frame_count()) return nullptr;
    for (const auto& b : frames[t - 1])
      if (b.id == id) return &b;
    return nullptr;
  }

  std::vector<int> ids_at(int t) const {
    std::vector<int> ids;
    if (t < 1 || t > frame_count()) return ids;
    ids.reserve(frames[t - 1].size());
    for (const auto& b : frames[t - 1]) ids.push_back(b.id);
    std::sort(ids.begin(), ids.end());
    return ids;
  }

  void ensure_frame(int t) {
    if (t > frame_count()) frames.resize(t);
  }

  void sort_frames() {
    for (auto& f : frames)
      std::sort(f.begin(), f.end(),
                [](const TrackedBox& a, const TrackedBox& b) { return a.id < b.id; });
  }
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Stable derivation of stream seeds from (seed, purpose, index) so draw order
// never depends on call interleaving between frames or providers.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  return splitmix64(a ^ splitmix64(b + 0x6a09e667f3bcc909ULL));
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return mix_seed(mix_seed(a, b), c);
}

// Deterministic RNG with fixed transforms (Box-Muller, Knuth Poisson) so the
// byte streams never depend on library internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next() { return eng_(); }

  double uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(static_cast<double>(hi - lo + 1) * uniform());
  }

  double gaussian() {
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  double gaussian(double mu, double sigma) { return mu + sigma * gaussian(); }

  int poisson(double lambda) {
    if (lambda <= 0.0) return 0;
    const double limit = std::exp(-lambda);
    int k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform();
    } while (p > limit);
    return k - 1;
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace courtmot
