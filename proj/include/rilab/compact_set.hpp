#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "rilab/point.hpp"

namespace rilab {

struct ContinuumBox {
  std::array<double, kMaxDim> lo{};
  std::array<double, kMaxDim> hi{};
};

// Compact subset of R^d used as the base shape for blow-ups, Brownian
// capacities and harmonic potentials. Membership is inclusive on boundaries.
struct CompactSetSpec {
  enum class Kind { kBox, kBall, kUnionOfBoxes };

  Kind kind = Kind::kBall;
  int d = 3;
  ContinuumBox box;                  // kBox
  std::array<double, kMaxDim> center{};  // kBall
  double radius = 1.0;               // kBall
  std::vector<ContinuumBox> boxes;   // kUnionOfBoxes

  static CompactSetSpec make_ball(int d, std::array<double, kMaxDim> c, double r) {
    if (r <= 0) throw std::invalid_argument("CompactSetSpec: ball radius must be positive");
    CompactSetSpec s;
    s.kind = Kind::kBall;
    s.d = d;
    s.center = c;
    s.radius = r;
    return s;
  }
  static CompactSetSpec make_box(int d, ContinuumBox b) {
    for (int i = 0; i < d; ++i)
      if (!(b.lo[i] < b.hi[i])) throw std::invalid_argument("CompactSetSpec: degenerate box");
    CompactSetSpec s;
    s.kind = Kind::kBox;
    s.d = d;
    s.box = b;
    return s;
  }
  static CompactSetSpec make_union(int d, std::vector<ContinuumBox> bs) {
    if (bs.empty()) throw std::invalid_argument("CompactSetSpec: empty union");
    CompactSetSpec s;
    s.kind = Kind::kUnionOfBoxes;
    s.d = d;
    s.boxes = std::move(bs);
    for (const auto& b : s.boxes)
      for (int i = 0; i < d; ++i)
        if (!(b.lo[i] < b.hi[i])) throw std::invalid_argument("CompactSetSpec: degenerate box in union");
    return s;
  }

  bool contains(const std::array<double, kMaxDim>& z) const {
    switch (kind) {
      case Kind::kBox:
        return box_contains(box, z);
      case Kind::kBall: {
        double s = 0;
        for (int i = 0; i < d; ++i) {
          double t = z[i] - center[i];
          s += t * t;
        }
        return s <= radius * radius;
      }
      case Kind::kUnionOfBoxes:
        for (const auto& b : boxes)
          if (box_contains(b, z)) return true;
        return false;
    }
    return false;
  }

  // Euclidean distance from z to the set (0 inside).
  double dist(const std::array<double, kMaxDim>& z) const {
    switch (kind) {
      case Kind::kBox:
        return box_dist(box, z);
      case Kind::kBall: {
        double s = 0;
        for (int i = 0; i < d; ++i) {
          double t = z[i] - center[i];
          s += t * t;
        }
        return std::max(0.0, std::sqrt(s) - radius);
      }
      case Kind::kUnionOfBoxes: {
        double m = std::numeric_limits<double>::infinity();
        for (const auto& b : boxes) m = std::min(m, box_dist(b, z));
        return m;
      }
    }
    return 0;
  }

  ContinuumBox bounding_box() const {
    ContinuumBox bb;
    switch (kind) {
      case Kind::kBox:
        return box;
      case Kind::kBall:
        for (int i = 0; i < d; ++i) {
          bb.lo[i] = center[i] - radius;
          bb.hi[i] = center[i] + radius;
        }
        return bb;
      case Kind::kUnionOfBoxes:
        bb = boxes.front();
        for (const auto& b : boxes)
          for (int i = 0; i < d; ++i) {
            bb.lo[i] = std::min(bb.lo[i], b.lo[i]);
            bb.hi[i] = std::max(bb.hi[i], b.hi[i]);
          }
        return bb;
    }
    return bb;
  }

  // Center and radius of a Euclidean ball enclosing the set (not minimal).
  void enclosing_ball(std::array<double, kMaxDim>& c, double& r) const {
    ContinuumBox bb = bounding_box();
    double s = 0;
    for (int i = 0; i < d; ++i) {
      c[i] = 0.5 * (bb.lo[i] + bb.hi[i]);
      double h = 0.5 * (bb.hi[i] - bb.lo[i]);
      s += h * h;
    }
    r = std::sqrt(s);
  }

  double euclid_diam() const {
    ContinuumBox bb = bounding_box();
    double s = 0;
    for (int i = 0; i < d; ++i) {
      double t = bb.hi[i] - bb.lo[i];
      s += t * t;
    }
    return std::sqrt(s);
  }

  bool strictly_inside_sym_box(double M) const {
    ContinuumBox bb = bounding_box();
    for (int i = 0; i < d; ++i)
      if (!(bb.lo[i] > -M && bb.hi[i] < M)) return false;
    return true;
  }

 private:
  bool box_contains(const ContinuumBox& b, const std::array<double, kMaxDim>& z) const {
    for (int i = 0; i < d; ++i)
      if (z[i] < b.lo[i] || z[i] > b.hi[i]) return false;
    return true;
  }
  double box_dist(const ContinuumBox& b, const std::array<double, kMaxDim>& z) const {
    double s = 0;
    for (int i = 0; i < d; ++i) {
      double t = std::max({b.lo[i] - z[i], 0.0, z[i] - b.hi[i]});
      s += t * t;
    }
    return std::sqrt(s);
  }
};

}  // namespace rilab
