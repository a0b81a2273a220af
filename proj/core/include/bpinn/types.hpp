#pragma once

#include <array>
#include <string_view>

namespace bpinn {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

/// Network outputs / exact solution at one point.
struct FieldState {
  double u = 0.0;
  double v = 0.0;
  double p = 0.0;
  double theta = 0.0;

  friend bool operator==(const FieldState&, const FieldState&) = default;
};

/// A scalar together with its spatial derivatives up to second order.
/// The mixed partial is stored once.
struct Jet2 {
  double value = 0.0;
  double dx = 0.0;
  double dy = 0.0;
  double dxx = 0.0;
  double dxy = 0.0;
  double dyy = 0.0;

  double laplacian() const { return dxx + dyy; }

  friend bool operator==(const Jet2&, const Jet2&) = default;
};

inline constexpr int kJetComponents = 6;

/// Component access in storage order (value, dx, dy, dxx, dxy, dyy).
inline double& component(Jet2& j, int c) {
  switch (c) {
    case 0: return j.value;
    case 1: return j.dx;
    case 2: return j.dy;
    case 3: return j.dxx;
    case 4: return j.dxy;
    default: return j.dyy;
  }
}
inline double component(const Jet2& j, int c) { return component(const_cast<Jet2&>(j), c); }

enum class Field { U = 0, V = 1, P = 2, Theta = 3 };

inline constexpr std::array<Field, 4> kFields = {Field::U, Field::V, Field::P, Field::Theta};
inline constexpr std::array<std::string_view, 4> kFieldNames = {"u", "v", "p", "theta"};

inline std::string_view field_name(Field f) { return kFieldNames[static_cast<int>(f)]; }

/// Second-order jets of all four solution fields at one point.
struct FieldJet2 {
  Jet2 u;
  Jet2 v;
  Jet2 p;
  Jet2 theta;

  FieldState values() const { return {u.value, v.value, p.value, theta.value}; }

  Jet2& operator[](Field f) {
    switch (f) {
      case Field::U: return u;
      case Field::V: return v;
      case Field::P: return p;
      default: return theta;
    }
  }
  const Jet2& operator[](Field f) const { return const_cast<FieldJet2&>(*this)[f]; }

  friend bool operator==(const FieldJet2&, const FieldJet2&) = default;
};

inline double value_of(const FieldState& s, Field f) {
  switch (f) {
    case Field::U: return s.u;
    case Field::V: return s.v;
    case Field::P: return s.p;
    default: return s.theta;
  }
}

}  // namespace bpinn
