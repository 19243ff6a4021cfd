#pragma once

#include <cstdint>
#include <iosfwd>
#include <numbers>
#include <optional>
#include <span>

#include "stratshap/core.h"
#include "stratshap/models.h"
#include "stratshap/valuefn.h"

// Closed-form ground truth for the two-feature linear spline
//   f(X) = beta0 + beta1*X1 + beta12*X1*X2,  X1 ~ N(0,1),  X2 = I(X1 > 0).
// The point x1 = 0 belongs to the x2 = 0 region throughout.
namespace stratshap::oracle {

// gamma = E[X1*X2] = E[X1 * I(X1 > 0)] = 1/sqrt(2*pi).
inline constexpr double kGamma = std::numbers::inv_sqrtpi / std::numbers::sqrt2;
// corr(X1, X2) = sqrt(2/pi) = 2*gamma; also the half-normal mean.
inline constexpr double kCorrelation = std::numbers::sqrt2 * std::numbers::inv_sqrtpi;

struct ValueQuad {
  double v_empty = 0.0;
  double v1 = 0.0;
  double v2 = 0.0;
  double v12 = 0.0;
};

// Bitset-indexed table {v(empty), v({1}), v({2}), v({1,2})}; feature 0 is X1.
TableValueFunction as_value_function(const ValueQuad& q, ValueKind kind);

// Throws InvalidInput unless x = (x1, x2) with x2 == I(x1 > 0).
void require_on_manifold(std::span<const double> x);
bool on_manifold(std::span<const double> x);

// Marginal values under linear extrapolation.
ValueQuad value_functions_linear(const SplineParams& p, std::span<const double> x,
                                 bool allow_off_manifold = false);
// Marginal values under constant extrapolation (tree-shaped spline).
ValueQuad value_functions_constant(const SplineParams& p, std::span<const double> x,
                                   bool allow_off_manifold = false);
// Conditional-expectation values E[f(X) | X_S = x_S].
ValueQuad conditional_values(const SplineParams& p, std::span<const double> x);

// Marginal game inside the instance's x2 stratum: X2 is pinned to x2 and X1
// follows the half-normal of that side, so v(S without X1) is the stratum
// mean beta0 + (beta1 + beta12*x2) * (+-2 gamma) and v(S with X1) = f(x).
TableValueFunction stratum_value_function(const SplineParams& p, std::span<const double> x);

enum class Table { kT1, kT2, kT3, kT4, kT6 };
enum class CausalDirection { kX1CausesX2, kX2CausesX1 };

std::string_view table_label(Table t);
Table parse_table_label(std::string_view label);

// Attributions transcribed from the closed-form tables. T4 needs a direction
// and xi; T6 needs a direction. T3 reports the per-region reference as phi0
// and phi2 = 0.
AttributionReport table_attributions(Table which, const SplineParams& p, std::span<const double> x,
                                     std::optional<CausalDirection> direction = std::nullopt,
                                     std::optional<double> xi = std::nullopt);

// n rows (x1, x2, y) with x1 ~ N(0,1) via Box-Muller, x2 = I(x1 > 0) and
// y = f(x1, x2). Deterministic per seed; x2 is marked categorical.
Dataset sample_spline_data(std::size_t n, std::uint64_t seed, const SplineParams& p);

// Golden rows (table, direction, beta0, beta1, beta12, x1, x2, xi, phi0, phi1,
// phi2) for `cases` random parameter draws.
void write_golden_fixtures(std::ostream& out, std::size_t cases, std::uint64_t seed);

struct RandomCase {
  SplineParams params;
  double x[2] = {0.0, 0.0};
};
// beta ~ U(-3, 3)^3, x1 ~ U(-3, 3), x2 = I(x1 > 0).
RandomCase random_case(std::uint64_t seed, std::uint64_t index);

}  // namespace stratshap::oracle
