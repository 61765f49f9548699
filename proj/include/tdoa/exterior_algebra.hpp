#pragma once

// Coordinate-level exterior algebra of the Euclidean plane (signature (2,0))
// and of the 3D Minkowski space M^{2,1} (signature (2,1)), in the fixed
// orthonormal basis (e1, e2, e3).
//
// Covectors are stored as MinkVec3 holding their values on (e1, e2, e3), so
// the musical maps flat/sharp are the sign flip of the third component.
// Bivector components are ordered (e1^e2, e1^e3, e2^e3).

#include <cmath>

#include "tdoa/errors.hpp"

namespace tdoa {

template <typename T>
struct BasicEucVec2 {
  T u1{};
  T u2{};

  constexpr BasicEucVec2 operator+(const BasicEucVec2& o) const { return {u1 + o.u1, u2 + o.u2}; }
  constexpr BasicEucVec2 operator-(const BasicEucVec2& o) const { return {u1 - o.u1, u2 - o.u2}; }
  constexpr BasicEucVec2 operator-() const { return {-u1, -u2}; }
  constexpr BasicEucVec2 operator*(T s) const { return {u1 * s, u2 * s}; }
  constexpr BasicEucVec2 operator/(T s) const { return {u1 / s, u2 / s}; }
  friend constexpr BasicEucVec2 operator*(T s, const BasicEucVec2& v) { return v * s; }
  constexpr bool operator==(const BasicEucVec2&) const = default;
};

template <typename T>
struct BasicMinkVec3 {
  T u1{};
  T u2{};
  T u3{};

  constexpr BasicMinkVec3 operator+(const BasicMinkVec3& o) const {
    return {u1 + o.u1, u2 + o.u2, u3 + o.u3};
  }
  constexpr BasicMinkVec3 operator-(const BasicMinkVec3& o) const {
    return {u1 - o.u1, u2 - o.u2, u3 - o.u3};
  }
  constexpr BasicMinkVec3 operator-() const { return {-u1, -u2, -u3}; }
  constexpr BasicMinkVec3 operator*(T s) const { return {u1 * s, u2 * s, u3 * s}; }
  constexpr BasicMinkVec3 operator/(T s) const { return {u1 / s, u2 / s, u3 / s}; }
  friend constexpr BasicMinkVec3 operator*(T s, const BasicMinkVec3& v) { return v * s; }
  constexpr bool operator==(const BasicMinkVec3&) const = default;
};

template <typename T>
struct BasicMinkBivec3 {
  T c12{};
  T c13{};
  T c23{};

  constexpr BasicMinkBivec3 operator+(const BasicMinkBivec3& o) const {
    return {c12 + o.c12, c13 + o.c13, c23 + o.c23};
  }
  constexpr BasicMinkBivec3 operator-(const BasicMinkBivec3& o) const {
    return {c12 - o.c12, c13 - o.c13, c23 - o.c23};
  }
  constexpr BasicMinkBivec3 operator*(T s) const { return {c12 * s, c13 * s, c23 * s}; }
  friend constexpr BasicMinkBivec3 operator*(T s, const BasicMinkBivec3& b) { return b * s; }
  constexpr bool operator==(const BasicMinkBivec3&) const = default;
};

// Coefficient on omega = e1^e2^e3.
template <typename T>
struct BasicMinkTrivec3 {
  T c123{};
  constexpr bool operator==(const BasicMinkTrivec3&) const = default;
};

using EucVec2 = BasicEucVec2<double>;
using MinkVec3 = BasicMinkVec3<double>;
using MinkBivec3 = BasicMinkBivec3<double>;
using MinkTrivec3 = BasicMinkTrivec3<double>;

inline constexpr MinkVec3 e1{1.0, 0.0, 0.0};
inline constexpr MinkVec3 e2{0.0, 1.0, 0.0};
inline constexpr MinkVec3 e3{0.0, 0.0, 1.0};

// ---------------------------------------------------------------------------
// Euclidean plane

template <typename T>
constexpr T dot(const BasicEucVec2<T>& u, const BasicEucVec2<T>& v) {
  return u.u1 * v.u1 + u.u2 * v.u2;
}

template <typename T>
T norm(const BasicEucVec2<T>& u) {
  return std::hypot(u.u1, u.u2);
}

/// *(u ^ v) in the Euclidean plane, i.e. det[u v].
template <typename T>
constexpr T wedge2(const BasicEucVec2<T>& u, const BasicEucVec2<T>& v) {
  return u.u1 * v.u2 - u.u2 * v.u1;
}

/// Hodge star on plane vectors: *e1 = e2, *e2 = -e1 (rotation by +90 degrees).
template <typename T>
constexpr BasicEucVec2<T> hodge_star(const BasicEucVec2<T>& u) {
  return {-u.u2, u.u1};
}

// Grade 0 and grade 2 of the plane are both one-dimensional; *1 = omega and
// *omega = 1, so the star acts as the identity on their coefficients.
template <typename T>
constexpr T hodge_star_plane_scalar(T s) {
  return s;
}

// ---------------------------------------------------------------------------
// Minkowski space

template <typename T>
constexpr T mink_inner(const BasicMinkVec3<T>& u, const BasicMinkVec3<T>& v) {
  return u.u1 * v.u1 + u.u2 * v.u2 - u.u3 * v.u3;
}

template <typename T>
constexpr T mink_norm2(const BasicMinkVec3<T>& u) {
  return mink_inner(u, u);
}

/// Gram-determinant inner product on 2-forms; signature (1,2) on the basis.
template <typename T>
constexpr T mink_inner(const BasicMinkBivec3<T>& a, const BasicMinkBivec3<T>& b) {
  return a.c12 * b.c12 - a.c13 * b.c13 - a.c23 * b.c23;
}

template <typename T>
constexpr T mink_norm2(const BasicMinkBivec3<T>& a) {
  return mink_inner(a, a);
}

/// ||omega||^2 = -1.
template <typename T>
constexpr T mink_inner(const BasicMinkTrivec3<T>& a, const BasicMinkTrivec3<T>& b) {
  return -a.c123 * b.c123;
}

template <typename T>
constexpr BasicMinkBivec3<T> wedge(const BasicMinkVec3<T>& u, const BasicMinkVec3<T>& v) {
  return {u.u1 * v.u2 - u.u2 * v.u1, u.u1 * v.u3 - u.u3 * v.u1, u.u2 * v.u3 - u.u3 * v.u2};
}

template <typename T>
constexpr BasicMinkTrivec3<T> wedge(const BasicMinkBivec3<T>& b, const BasicMinkVec3<T>& w) {
  return {b.c12 * w.u3 - b.c13 * w.u2 + b.c23 * w.u1};
}

template <typename T>
constexpr BasicMinkTrivec3<T> wedge(const BasicMinkVec3<T>& u, const BasicMinkVec3<T>& v,
                                    const BasicMinkVec3<T>& w) {
  return wedge(wedge(u, v), w);
}

// Star tables:
//   *1 = omega, *omega = -1,
//   *e1 = e2^e3, *e2 = -e1^e3, *e3 = -e1^e2,
//   *(e1^e2) = e3, *(e1^e3) = e2, *(e2^e3) = -e1.

template <typename T>
constexpr BasicMinkBivec3<T> hodge_star(const BasicMinkVec3<T>& u) {
  return {-u.u3, -u.u2, u.u1};
}

template <typename T>
constexpr BasicMinkVec3<T> hodge_star(const BasicMinkBivec3<T>& b) {
  return {-b.c23, b.c13, b.c12};
}

template <typename T>
constexpr T hodge_star(const BasicMinkTrivec3<T>& t) {
  return -t.c123;
}

template <typename T>
constexpr BasicMinkTrivec3<T> hodge_star_scalar(T s) {
  return {s};
}

/// *(u ^ v); the zero vector iff u, v are linearly dependent.
template <typename T>
constexpr BasicMinkVec3<T> star_wedge(const BasicMinkVec3<T>& u, const BasicMinkVec3<T>& v) {
  return hodge_star(wedge(u, v));
}

template <typename T>
constexpr BasicMinkVec3<T> flat(const BasicMinkVec3<T>& u) {
  return {u.u1, u.u2, -u.u3};
}

template <typename T>
constexpr BasicMinkVec3<T> sharp(const BasicMinkVec3<T>& alpha) {
  return {alpha.u1, alpha.u2, -alpha.u3};
}

/// Covector evaluation alpha(u).
template <typename T>
constexpr T apply(const BasicMinkVec3<T>& alpha, const BasicMinkVec3<T>& u) {
  return alpha.u1 * u.u1 + alpha.u2 * u.u2 + alpha.u3 * u.u3;
}

/// i_u(alpha ^ beta) for a 2-form given in the dual basis e^i ^ e^j.
template <typename T>
constexpr BasicMinkVec3<T> interior(const BasicMinkVec3<T>& u, const BasicMinkBivec3<T>& form) {
  return {-form.c12 * u.u2 - form.c13 * u.u3, form.c12 * u.u1 - form.c23 * u.u3,
          form.c13 * u.u1 + form.c23 * u.u2};
}

/// i_u(theta e^1^e^2^e^3).
template <typename T>
constexpr BasicMinkBivec3<T> interior(const BasicMinkVec3<T>& u, const BasicMinkTrivec3<T>& form) {
  return {form.c123 * u.u3, -form.c123 * u.u2, form.c123 * u.u1};
}

/// Sharp of a 2-form in the dual basis (e^3 = -e3 flat).
template <typename T>
constexpr BasicMinkBivec3<T> sharp(const BasicMinkBivec3<T>& form) {
  return {form.c12, -form.c13, -form.c23};
}

template <typename T>
constexpr BasicMinkBivec3<T> flat(const BasicMinkBivec3<T>& b) {
  return sharp(b);
}

/// Hodge star of a 3-form in the dual basis: e^1^e^2^e^3 = -omega flat.
template <typename T>
constexpr T covector_star(const BasicMinkTrivec3<T>& form) {
  return form.c123;
}

/// Hodge star of a 2-form in the dual basis, returned as a covector.
template <typename T>
constexpr BasicMinkVec3<T> covector_star(const BasicMinkBivec3<T>& form) {
  return flat(hodge_star(sharp(form)));
}

template <typename T>
T euclid_norm(const BasicMinkVec3<T>& u) {
  return std::sqrt(u.u1 * u.u1 + u.u2 * u.u2 + u.u3 * u.u3);
}

template <typename T>
T euclid_norm(const BasicMinkBivec3<T>& b) {
  return std::sqrt(b.c12 * b.c12 + b.c13 * b.c13 + b.c23 * b.c23);
}

/// Vectors count as dependent when |u ^ v| <= tol * |u| |v| (Euclidean norms).
template <typename T>
bool linearly_dependent(const BasicMinkVec3<T>& u, const BasicMinkVec3<T>& v, T rel_tol = T(1e-12)) {
  return euclid_norm(wedge(u, v)) <= rel_tol * euclid_norm(u) * euclid_norm(v);
}

/// Generator (*(alpha ^ beta))^sharp of the solutions u of i_u(alpha ^ beta) = 0.
/// alpha and beta are covectors (values on e1, e2, e3).
template <typename T>
BasicMinkVec3<T> interior_product_solve(const BasicMinkVec3<T>& alpha, const BasicMinkVec3<T>& beta) {
  if (linearly_dependent(alpha, beta)) {
    throw DependentForms("interior_product_solve: alpha and beta are linearly dependent");
  }
  return star_wedge(sharp(alpha), sharp(beta));
}

}  // namespace tdoa
