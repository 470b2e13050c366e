#pragma once

#include <span>

#include "laneforge/types.hpp"

namespace laneforge {

/// Least-squares cubic through (u, v) samples, minimizing
/// sum (v - (a u^3 + b u^2 + c u + d))^2.
/// Throws RankDeficient when fewer than four distinct abscissae are present.
CubicCurve fit_cubic(std::span<const Vec2> samples);

/// Horner evaluation of a u^3 + b u^2 + c u + d.
double eval_cubic(const CubicCurve& curve, double u);

}  // namespace laneforge
