#pragma once

#include <cmath>
#include <cstddef>

#include "gravitensor/field.hpp"

namespace gravitensor {

namespace detail {

template <int Rank>
std::array<int, Rank> insert_two(const std::array<int, Rank - 2>& rest, int sa, int va, int sb, int vb) {
  std::array<int, Rank> d{};
  for (int s = 0, t = 0; s < Rank; ++s) {
    if (s == sa)
      d[s] = va;
    else if (s == sb)
      d[s] = vb;
    else
      d[s] = rest[t++];
  }
  return d;
}

}  // namespace detail

/// Trace over two slots of opposite variance.
template <int Rank>
TensorField<Rank - 2> contract(const TensorField<Rank>& f, int slot_a, int slot_b) {
  static_assert(Rank >= 2);
  if (slot_a == slot_b || slot_a < 0 || slot_b < 0 || slot_a >= Rank || slot_b >= Rank)
    throw IndexError("contract: invalid slot pair");
  if (f.slots()[slot_a] == f.slots()[slot_b])
    throw IndexError("contract: slots have the same variance; raise or lower explicitly first");
  Slots<Rank - 2> slots{};
  for (int s = 0, t = 0; s < Rank; ++s)
    if (s != slot_a && s != slot_b) slots[t++] = f.slots()[s];
  TensorField<Rank - 2> out(f.grid(), slots);
  for (std::size_t oc = 0; oc < TensorField<Rank - 2>::kComponents; ++oc) {
    const auto rest = Tensor<Rank - 2>::digits(oc);
    std::array<std::size_t, 4> ic{};
    for (int k = 0; k < 4; ++k) ic[k] = Tensor<Rank>::from_digits(detail::insert_two<Rank>(rest, slot_a, k, slot_b, k));
    for (std::size_t p = 0; p < f.points(); ++p) {
      double s = 0.0;
      for (int k = 0; k < 4; ++k) s += f.value(p, ic[k]);
      out.value(p, oc) = s;
    }
  }
  return out;
}

/// Contraction of slot_a of `a` with slot_b of `b`; free slots of `a` come
/// first, then those of `b`.
template <int RA, int RB>
TensorField<RA + RB - 2> contract(const TensorField<RA>& a, int slot_a, const TensorField<RB>& b, int slot_b) {
  require_same_grid(a, b, "contract");
  if (slot_a < 0 || slot_a >= RA || slot_b < 0 || slot_b >= RB) throw IndexError("contract: slot out of range");
  if (a.slots()[slot_a] == b.slots()[slot_b])
    throw IndexError("contract: slots have the same variance; raise or lower explicitly first");
  constexpr int R = RA + RB - 2;
  Slots<R> slots{};
  int t = 0;
  for (int s = 0; s < RA; ++s)
    if (s != slot_a) slots[t++] = a.slots()[s];
  for (int s = 0; s < RB; ++s)
    if (s != slot_b) slots[t++] = b.slots()[s];
  TensorField<R> out(a.grid(), slots);
  for (std::size_t oc = 0; oc < TensorField<R>::kComponents; ++oc) {
    const auto d = Tensor<R>::digits(oc);
    std::array<std::size_t, 4> ia{}, ib{};
    for (int k = 0; k < 4; ++k) {
      std::array<int, RA> da{};
      std::array<int, RB> db{};
      for (int s = 0, u = 0; s < RA; ++s) da[s] = (s == slot_a) ? k : d[u++];
      for (int s = 0, u = RA - 1; s < RB; ++s) db[s] = (s == slot_b) ? k : d[u++];
      ia[k] = Tensor<RA>::from_digits(da);
      ib[k] = Tensor<RB>::from_digits(db);
    }
    for (std::size_t p = 0; p < a.points(); ++p) {
      double s = 0.0;
      for (int k = 0; k < 4; ++k) s += a.value(p, ia[k]) * b.value(p, ib[k]);
      out.value(p, oc) = s;
    }
  }
  return out;
}

enum class IndexMove { Raise, Lower };

/// Flips the variance of one slot by contracting with a symmetric metric:
/// g^{ab} to raise, g_{ab} to lower. Which metric (g, eta, h) is the caller's
/// choice.
template <int Rank>
TensorField<Rank> raise_lower(const TensorField<Rank>& f, int slot, const TensorField<2>& metric, IndexMove move) {
  require_same_grid(f, metric, "raise_lower");
  if (slot < 0 || slot >= Rank) throw IndexError("raise_lower: slot out of range");
  const Variance need_slot = move == IndexMove::Raise ? Variance::Down : Variance::Up;
  const Variance need_metric = flip(need_slot);
  if (f.slots()[slot] != need_slot) throw IndexError("raise_lower: slot already has the target variance");
  if (metric.slots()[0] != need_metric || metric.slots()[1] != need_metric)
    throw IndexError("raise_lower: metric variance does not match the move");
  for (std::size_t p = 0; p < metric.points(); ++p) {
    const auto m = metric.at(p);
    for (int a = 0; a < 4; ++a)
      for (int b = a + 1; b < 4; ++b)
        if (m(a, b) != m(b, a)) throw IndexError("raise_lower: metric argument is not symmetric");
  }
  Slots<Rank> slots = f.slots();
  slots[slot] = flip(slots[slot]);
  TensorField<Rank> out(f.grid(), slots);
  for (std::size_t p = 0; p < f.points(); ++p) {
    const auto t = f.at(p);
    const auto m = metric.at(p);
    Tensor<Rank> r;
    for (std::size_t c = 0; c < Tensor<Rank>::kSize; ++c) {
      auto d = Tensor<Rank>::digits(c);
      const int free = d[slot];
      double s = 0.0;
      for (int k = 0; k < 4; ++k) {
        d[slot] = k;
        s += m(free, k) * t.c[Tensor<Rank>::from_digits(d)];
      }
      r.c[c] = s;
    }
    out.set(p, r);
  }
  return out;
}

template <int Rank>
TensorField<Rank> raise_lower(const TensorField<Rank>& f, int slot, const SymmetricField& metric, IndexMove move) {
  return raise_lower(f, slot, metric.dense(), move);
}

/// Constant Minkowski field with the given variance (numerically identical).
inline SymmetricField minkowski_field(const Grid& grid, Variance v) {
  return make_symmetric(grid, v, [](std::size_t) { return minkowski(); });
}

inline TensorField<2> kronecker_field(const Grid& grid) {
  return make_field<2>(grid, {Variance::Up, Variance::Down}, [](std::size_t) { return kronecker(); });
}

}  // namespace gravitensor
