#pragma once

#include <array>
#include <cstddef>
#include <type_traits>

namespace gravitensor {

enum class Variance { Up, Down };

constexpr Variance flip(Variance v) { return v == Variance::Up ? Variance::Down : Variance::Up; }

constexpr std::size_t pow4(int rank) {
  std::size_t n = 1;
  for (int i = 0; i < rank; ++i) n *= 4;
  return n;
}

/// Dense rank-R tensor at a single lattice point, components in row-major
/// order over its four-valued indices.
template <int Rank>
struct Tensor {
  static constexpr int kRank = Rank;
  static constexpr std::size_t kSize = pow4(Rank);

  std::array<double, kSize> c{};

  template <class... I>
    requires(sizeof...(I) == Rank && (std::is_integral_v<I> && ...))
  double& operator()(I... idx) {
    return c[flat(static_cast<std::size_t>(idx)...)];
  }

  template <class... I>
    requires(sizeof...(I) == Rank && (std::is_integral_v<I> && ...))
  double operator()(I... idx) const {
    return c[flat(static_cast<std::size_t>(idx)...)];
  }

  template <class... I>
  static constexpr std::size_t flat(I... idx) {
    std::size_t f = 0;
    ((f = f * 4 + idx), ...);
    return f;
  }

  /// Index digits of a flat component number.
  static constexpr std::array<int, Rank> digits(std::size_t f) {
    std::array<int, Rank> d{};
    for (int s = Rank - 1; s >= 0; --s) {
      d[s] = static_cast<int>(f % 4);
      f /= 4;
    }
    return d;
  }

  static constexpr std::size_t from_digits(const std::array<int, Rank>& d) {
    std::size_t f = 0;
    for (int s = 0; s < Rank; ++s) f = f * 4 + static_cast<std::size_t>(d[s]);
    return f;
  }

  Tensor& operator+=(const Tensor& o) {
    for (std::size_t i = 0; i < kSize; ++i) c[i] += o.c[i];
    return *this;
  }
  Tensor& operator-=(const Tensor& o) {
    for (std::size_t i = 0; i < kSize; ++i) c[i] -= o.c[i];
    return *this;
  }
  Tensor& operator*=(double s) {
    for (auto& x : c) x *= s;
    return *this;
  }
  friend Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
  friend Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }
  friend Tensor operator*(double s, Tensor a) { return a *= s; }
  friend bool operator==(const Tensor&, const Tensor&) = default;
};

template <>
struct Tensor<0> {
  static constexpr int kRank = 0;
  static constexpr std::size_t kSize = 1;
  std::array<double, 1> c{};

  double& operator()() { return c[0]; }
  double operator()() const { return c[0]; }
  static constexpr std::array<int, 0> digits(std::size_t) { return {}; }
  static constexpr std::size_t from_digits(const std::array<int, 0>&) { return 0; }

  Tensor& operator+=(const Tensor& o) { c[0] += o.c[0]; return *this; }
  Tensor& operator-=(const Tensor& o) { c[0] -= o.c[0]; return *this; }
  Tensor& operator*=(double s) { c[0] *= s; return *this; }
  friend Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
  friend Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }
  friend Tensor operator*(double s, Tensor a) { return a *= s; }
  friend bool operator==(const Tensor&, const Tensor&) = default;
};

using Matrix4 = Tensor<2>;

inline constexpr double kEtaDiag[4] = {1.0, -1.0, -1.0, -1.0};

/// Minkowski metric, signature (+,-,-,-). Its own inverse.
inline Matrix4 minkowski() {
  Matrix4 m;
  for (int a = 0; a < 4; ++a) m(a, a) = kEtaDiag[a];
  return m;
}

inline Matrix4 kronecker() {
  Matrix4 m;
  for (int a = 0; a < 4; ++a) m(a, a) = 1.0;
  return m;
}

inline constexpr double delta(int a, int b) { return a == b ? 1.0 : 0.0; }

inline Matrix4 matmul(const Matrix4& a, const Matrix4& b) {
  Matrix4 r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double s = 0.0;
      for (int k = 0; k < 4; ++k) s += a(i, k) * b(k, j);
      r(i, j) = s;
    }
  return r;
}

inline Matrix4 transpose(const Matrix4& a) {
  Matrix4 r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r(i, j) = a(j, i);
  return r;
}

inline double trace_product(const Matrix4& a, const Matrix4& b) {
  double s = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) s += a(i, j) * b(i, j);
  return s;
}

/// Pair (a,b), a <= b, for each of the ten independent components of a
/// symmetric rank-2 tensor.
inline constexpr std::array<std::array<int, 2>, 10> kSymmetricPairs{{
    {0, 0}, {0, 1}, {0, 2}, {0, 3}, {1, 1}, {1, 2}, {1, 3}, {2, 2}, {2, 3}, {3, 3}}};

constexpr int symmetric_index(int a, int b) {
  if (a > b) {
    const int t = a;
    a = b;
    b = t;
  }
  // rows start at 0, 4, 7, 9
  constexpr int row_start[4] = {0, 4, 7, 9};
  return row_start[a] + (b - a);
}

}  // namespace gravitensor
