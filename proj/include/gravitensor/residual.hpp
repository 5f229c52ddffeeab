#pragma once

#include <algorithm>
#include <initializer_list>
#include <utility>

#include "gravitensor/field.hpp"

namespace gravitensor {

/// An identity evaluated on the lattice: the residual field (continuum value
/// zero) and the reference scale, the largest L-infinity norm among the terms
/// that were summed to form it.
template <int Rank>
struct Residual {
  TensorField<Rank> field;
  double scale = 0.0;
};

struct ResidualNorms {
  double linf = 0.0;
  double rms = 0.0;
  double scale = 0.0;

  double relative() const { return linf / std::max(scale, 1e-30); }
};

template <int Rank>
ResidualNorms norms(const Residual<Rank>& r) {
  return {linf(r.field), rms(r.field), r.scale};
}

/// Signed sum of terms, each weighted by its coefficient; the scale is the
/// largest weighted term norm.
template <int Rank>
Residual<Rank> combine(std::initializer_list<std::pair<double, const TensorField<Rank>*>> terms) {
  Residual<Rank> r;
  bool first = true;
  for (const auto& [coef, term] : terms) {
    if (first) {
      r.field = term->like();
      first = false;
    } else {
      require_same_grid(r.field, *term, "combine");
      if (term->slots() != r.field.slots()) throw IndexError("combine: terms have different index variance");
    }
    for (std::size_t i = 0; i < r.field.values().size(); ++i) r.field.values()[i] += coef * term->values()[i];
    r.scale = std::max(r.scale, std::abs(coef) * linf(*term));
  }
  return r;
}

}  // namespace gravitensor
