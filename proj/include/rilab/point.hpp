#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace rilab {

// Dimensions are runtime values (experiments run at d=3, the math needs d>=3).
// Points carry their dimension; capacity is fixed so everything stays POD-ish.
inline constexpr int kMaxDim = 8;

struct LatticePoint {
  std::array<int32_t, kMaxDim> c{};
  int32_t d = 3;

  static LatticePoint zero(int dim) {
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("LatticePoint: dimension out of range");
    LatticePoint p;
    p.d = dim;
    return p;
  }
  static LatticePoint of(std::initializer_list<int32_t> xs) {
    LatticePoint p = zero(static_cast<int>(xs.size()));
    int i = 0;
    for (int32_t v : xs) p.c[i++] = v;
    return p;
  }
  static LatticePoint unit(int dim, int axis, int32_t s = 1) {
    LatticePoint p = zero(dim);
    p.c[axis] = s;
    return p;
  }

  int32_t operator[](int i) const { return c[i]; }
  int32_t& operator[](int i) { return c[i]; }

  friend bool operator==(const LatticePoint& a, const LatticePoint& b) {
    if (a.d != b.d) return false;
    for (int i = 0; i < a.d; ++i)
      if (a.c[i] != b.c[i]) return false;
    return true;
  }
  friend bool operator!=(const LatticePoint& a, const LatticePoint& b) { return !(a == b); }
  friend bool operator<(const LatticePoint& a, const LatticePoint& b) {
    for (int i = 0; i < a.d; ++i)
      if (a.c[i] != b.c[i]) return a.c[i] < b.c[i];
    return false;
  }

  friend LatticePoint operator+(LatticePoint a, const LatticePoint& b) {
    for (int i = 0; i < a.d; ++i) a.c[i] += b.c[i];
    return a;
  }
  friend LatticePoint operator-(LatticePoint a, const LatticePoint& b) {
    for (int i = 0; i < a.d; ++i) a.c[i] -= b.c[i];
    return a;
  }

  int64_t linf() const {
    int64_t m = 0;
    for (int i = 0; i < d; ++i) m = std::max<int64_t>(m, std::abs(static_cast<int64_t>(c[i])));
    return m;
  }
  int64_t l1() const {
    int64_t s = 0;
    for (int i = 0; i < d; ++i) s += std::abs(static_cast<int64_t>(c[i]));
    return s;
  }
  int64_t norm2_sq() const {
    int64_t s = 0;
    for (int i = 0; i < d; ++i) s += static_cast<int64_t>(c[i]) * c[i];
    return s;
  }
  double norm2() const { return std::sqrt(static_cast<double>(norm2_sq())); }

  // Neighbor k of 2d: axis k>>1, direction +1 for even k.
  LatticePoint neighbor(int k) const {
    LatticePoint p = *this;
    p.c[k >> 1] += (k & 1) ? -1 : 1;
    return p;
  }
  std::vector<LatticePoint> neighbors() const {
    std::vector<LatticePoint> out;
    out.reserve(2 * d);
    for (int k = 0; k < 2 * d; ++k) out.push_back(neighbor(k));
    return out;
  }

  std::string str() const {
    std::ostringstream os;
    os << '(';
    for (int i = 0; i < d; ++i) os << c[i] << (i + 1 < d ? "," : "");
    os << ')';
    return os.str();
  }
  friend std::ostream& operator<<(std::ostream& os, const LatticePoint& p) { return os << p.str(); }
};

struct PointHash {
  size_t operator()(const LatticePoint& p) const {
    // FNV-1a over the active coordinates; good enough for our map sizes.
    uint64_t h = 1469598103934665603ull;
    for (int i = 0; i < p.d; ++i) {
      h ^= static_cast<uint32_t>(p.c[i]);
      h *= 1099511628211ull;
    }
    return static_cast<size_t>(h);
  }
};

// Half-open axis-aligned lattice box: { x : anchor[i] <= x[i] < anchor[i]+extent[i] }.
struct DiscreteBox {
  LatticePoint anchor;
  std::array<int32_t, kMaxDim> extent{};

  int dim() const { return anchor.d; }

  static DiscreteBox cube(const LatticePoint& a, int32_t side) {
    if (side <= 0) throw std::invalid_argument("DiscreteBox: side must be positive");
    DiscreteBox b;
    b.anchor = a;
    for (int i = 0; i < a.d; ++i) b.extent[i] = side;
    return b;
  }
  // Closed sup-norm ball B(center, r) as a box.
  static DiscreteBox linf_ball(const LatticePoint& center, int32_t r) {
    if (r < 0) throw std::invalid_argument("DiscreteBox: radius must be nonnegative");
    DiscreteBox b;
    b.anchor = center;
    for (int i = 0; i < center.d; ++i) {
      b.anchor.c[i] -= r;
      b.extent[i] = 2 * r + 1;
    }
    return b;
  }
  static DiscreteBox from_corners(const LatticePoint& lo, const LatticePoint& hi_exclusive) {
    DiscreteBox b;
    b.anchor = lo;
    for (int i = 0; i < lo.d; ++i) {
      int64_t e = static_cast<int64_t>(hi_exclusive.c[i]) - lo.c[i];
      if (e <= 0) throw std::invalid_argument("DiscreteBox: empty extent");
      b.extent[i] = static_cast<int32_t>(e);
    }
    return b;
  }

  bool contains(const LatticePoint& p) const {
    for (int i = 0; i < dim(); ++i) {
      int32_t t = p.c[i] - anchor.c[i];
      if (t < 0 || t >= extent[i]) return false;
    }
    return true;
  }
  int64_t volume() const {
    int64_t v = 1;
    for (int i = 0; i < dim(); ++i) v *= extent[i];
    return v;
  }
  // Row-major linear index; callers must ensure contains(p).
  int64_t index_of(const LatticePoint& p) const {
    int64_t idx = 0;
    for (int i = 0; i < dim(); ++i) idx = idx * extent[i] + (p.c[i] - anchor.c[i]);
    return idx;
  }
  LatticePoint site_at(int64_t idx) const {
    LatticePoint p = LatticePoint::zero(dim());
    for (int i = dim() - 1; i >= 0; --i) {
      p.c[i] = anchor.c[i] + static_cast<int32_t>(idx % extent[i]);
      idx /= extent[i];
    }
    return p;
  }
  template <typename F>
  void for_each(F&& f) const {
    const int64_t n = volume();
    for (int64_t i = 0; i < n; ++i) f(site_at(i));
  }
  DiscreteBox expanded(int32_t r) const {
    DiscreteBox b = *this;
    for (int i = 0; i < dim(); ++i) {
      b.anchor.c[i] -= r;
      b.extent[i] += 2 * r;
    }
    return b;
  }
  bool contains_box(const DiscreteBox& inner) const {
    for (int i = 0; i < dim(); ++i) {
      if (inner.anchor.c[i] < anchor.c[i]) return false;
      if (inner.anchor.c[i] + inner.extent[i] > anchor.c[i] + extent[i]) return false;
    }
    return true;
  }
  // Sites of the box adjacent to its complement (outermost layer).
  std::vector<LatticePoint> inner_boundary() const {
    std::vector<LatticePoint> out;
    for_each([&](const LatticePoint& p) {
      for (int i = 0; i < dim(); ++i) {
        int32_t t = p.c[i] - anchor.c[i];
        if (t == 0 || t == extent[i] - 1) {
          out.push_back(p);
          return;
        }
      }
    });
    return out;
  }
};

inline std::vector<LatticePoint> linf_sphere(int dim, const LatticePoint& center, int32_t r) {
  std::vector<LatticePoint> out;
  if (r == 0) {
    out.push_back(center);
    return out;
  }
  DiscreteBox::linf_ball(center, r).for_each([&](const LatticePoint& p) {
    if ((p - center).linf() == r) out.push_back(p);
  });
  return out;
}

}  // namespace rilab
