#pragma once

#include <string_view>

namespace gravitensor {

/// Text of DEVIATIONS.md, printed by --deviations.
inline constexpr std::string_view kDeviations = R"(# Formula deviations

Formulas whose printed form is inconsistent, next to the form implemented here.
`gravitensor --deviations` prints this file.

## W_0 auxiliary tensor
- as printed:  W_0^{lma} = d_s[eta^{as} h^{ml} + eta^{ms} h^{al} - eta^{ma} h^{ml} - eta^{sl} h^{ma}]
- implemented: W_0^{lma} = d_s[eta^{as} h^{ml} + eta^{ms} h^{al} - eta^{ma} h^{sl} - eta^{sl} h^{ma}]
- reason: the printed third term repeats the free index m; the implemented term is the one whose second divergence gives t^{ma}.

## Matter energy tensor
- as printed:  E_M^m_s = H_{M s}^m phi_s - delta^m_s L_M
- implemented: E_M^m_s = H_M^{a,m} phi_{a,s} - delta^m_s L_M
- reason: the printed form repeats s; the implemented contraction runs over the field index and equals 2 sqrt(g) (D^m phi^a) phi_{a,s} - delta^m_s L_M.

## Gravitational energy balance
- as printed:  E_0^m_s - 2 M^{mb} g_{as} + d_l K_0^{lm}_s = 0
- implemented: E_0^m_s - 2 M^{mb} g_{bs} + d_l K_0^{lm}_s = 0
- reason: b must be contracted; the implemented index matches the gravitational energy identity.

## Gravitational energy identity restated
- as printed:  E_0 + 2 G_0 g d_l K_0 = 0
- implemented: E_0^m_s + 2 G_0^{ma} g_{as} + d_l K_0^{lm}_s = 0
- reason: a plus sign is missing; the statement is the same identity and is not implemented twice.

## Boundary-vector metric partial
- as printed:  dB^m/dg_{ar,b} g_{rl} = -delta^a_l h^{mb} + 1/2 delta^b_l h^{ma} + 1/2 g^m_l h^{ab}
- implemented: dB^m/dg_{ar,b} g_{rl} = -delta^a_l h^{mb} + 1/2 delta^b_l h^{ma} + 1/2 delta^m_l h^{ab}
- reason: g^m_l read as the Kronecker delta; the pointwise oracle agrees to about 1e-11.

## Stress tensor density weight
- as printed:  last term 1/2 sqrt(g) D_m[...], sqrt(g) outside the covariant derivative
- implemented: as printed (stress_form = sqrt_outside, the default)
- alternative: 1/2 D_m[sqrt(g) ...] (stress_form = sqrt_inside)
- reason: with the printed weight the closed form converges to the oracle-confirmed Euler derivative at stencil order; the alternative stays about 4e-2 relative away at every resolution.

## Total energy-tensor identity
- as printed:  the vanishing statement for the total Z lacks an operator between two terms
- implemented: no separate check; the matter and gravity Z identities cover it.
)";

}  // namespace gravitensor
