#include "stratshap/oracle.h"

#include <ostream>

#include "stratshap/csv.h"
#include "stratshap/rng.h"

namespace stratshap::oracle {
namespace {

double spline(const SplineParams& p, double x1, double x2) {
  return p.beta0 + p.beta1 * x1 + p.beta12 * x1 * x2;
}

bool upper(std::span<const double> x) { return x[0] > 0.0; }

void require_pair(std::span<const double> x) {
  if (x.size() != 2) throw InvalidInput("spline oracle needs exactly two features");
}

}  // namespace

TableValueFunction as_value_function(const ValueQuad& q, ValueKind kind) {
  return TableValueFunction(2, {q.v_empty, q.v1, q.v2, q.v12}, kind);
}

bool on_manifold(std::span<const double> x) {
  return x.size() == 2 && x[1] == (x[0] > 0.0 ? 1.0 : 0.0);
}

void require_on_manifold(std::span<const double> x) {
  require_pair(x);
  if (!on_manifold(x)) {
    throw InvalidInput("point (" + format_double(x[0]) + ", " + format_double(x[1]) +
                       ") is off the data manifold x2 = I(x1 > 0)");
  }
}

ValueQuad value_functions_linear(const SplineParams& p, std::span<const double> x,
                                 bool allow_off_manifold) {
  require_pair(x);
  if (!allow_off_manifold) require_on_manifold(x);
  const double x1 = x[0];
  return {p.beta0 + p.beta12 * kGamma, p.beta0 + p.beta1 * x1 + p.beta12 * x1 / 2.0, p.beta0,
          spline(p, x1, x[1])};
}

ValueQuad value_functions_constant(const SplineParams& p, std::span<const double> x,
                                   bool allow_off_manifold) {
  require_pair(x);
  if (!allow_off_manifold) require_on_manifold(x);
  const double x1 = x[0];
  const double x2 = x[1];
  const double v1 = p.beta0 + p.beta1 * x1 / 2.0 + (x1 > 0.0 ? p.beta12 * x1 / 2.0 : 0.0);
  const double v2 = p.beta0 - 2.0 * p.beta1 * kGamma * (0.5 - x2) + p.beta12 * kGamma * x2;
  // The tree evaluated at x: equal to the spline on the manifold.
  const double v12 = x2 > 0.5 ? p.beta0 + (x1 > 0.0 ? (p.beta1 + p.beta12) * x1 : 0.0)
                              : p.beta0 + (x1 <= 0.0 ? p.beta1 * x1 : 0.0);
  return {p.beta0 + p.beta12 * kGamma, v1, v2, v12};
}

ValueQuad conditional_values(const SplineParams& p, std::span<const double> x) {
  require_on_manifold(x);
  const double x1 = x[0];
  const double x2 = x[1];
  const double x2_given_x1 = upper(x) ? 1.0 : 0.0;
  const double x1_given_x2 = (x2 > 0.5 ? 2.0 : -2.0) * kGamma;
  return {p.beta0 + p.beta12 * kGamma, p.beta0 + p.beta1 * x1 + p.beta12 * x1 * x2_given_x1,
          p.beta0 + (p.beta1 + p.beta12 * x2) * x1_given_x2, spline(p, x1, x2)};
}

TableValueFunction stratum_value_function(const SplineParams& p, std::span<const double> x) {
  require_on_manifold(x);
  const double half_normal_mean = upper(x) ? 2.0 * kGamma : -2.0 * kGamma;
  const double slope = upper(x) ? p.beta1 + p.beta12 : p.beta1;
  const double reference = p.beta0 + slope * half_normal_mean;
  const double f = spline(p, x[0], x[1]);
  return TableValueFunction(2, {reference, f, reference, f}, ValueKind::kMarginal);
}

std::string_view table_label(Table t) {
  switch (t) {
    case Table::kT1: return "T1";
    case Table::kT2: return "T2";
    case Table::kT3: return "T3";
    case Table::kT4: return "T4";
    case Table::kT6: return "T6";
  }
  return "?";
}

Table parse_table_label(std::string_view label) {
  for (Table t : {Table::kT1, Table::kT2, Table::kT3, Table::kT4, Table::kT6}) {
    if (table_label(t) == label) return t;
  }
  throw InvalidInput("unknown table '" + std::string(label) + "'");
}

AttributionReport table_attributions(Table which, const SplineParams& p, std::span<const double> x,
                                     std::optional<CausalDirection> direction,
                                     std::optional<double> xi) {
  require_on_manifold(x);
  const double b0 = p.beta0, b1 = p.beta1, b12 = p.beta12;
  const double x1 = x[0];
  const double g = kGamma;
  const bool up = upper(x);

  AttributionReport r;
  r.feature_names = {"x1", "x2"};
  r.prediction = spline(p, x1, x[1]);
  double phi1 = 0.0, phi2 = 0.0;
  switch (which) {
    case Table::kT1:
      r.method = Method::kExactMarginal;
      r.phi0 = b0 + b12 * g;
      phi1 = up ? (b1 + 3.0 * b12 / 4.0) * x1 - g * b12 / 2.0 : (b1 + b12 / 4.0) * x1 - g * b12 / 2.0;
      phi2 = up ? b12 / 4.0 * x1 - g * b12 / 2.0 : -b12 / 4.0 * x1 - g * b12 / 2.0;
      break;
    case Table::kT2:
      r.method = Method::kExactMarginal;
      r.phi0 = b0 + b12 * g;
      phi1 = up ? 3.0 * (b1 + b12) * x1 / 4.0 - (b12 + b1 / 2.0) * g
                : 3.0 * b1 * x1 / 4.0 + (b1 - b12) * g / 2.0;
      phi2 = up ? (b1 + b12) * x1 / 4.0 + b1 * g / 2.0 : b1 * x1 / 4.0 - (b1 + b12) * g / 2.0;
      break;
    case Table::kT3:
      r.method = Method::kStratified;
      r.phi0 = up ? b0 + 2.0 * (b1 + b12) * g : b0 - 2.0 * b1 * g;
      phi1 = up ? (b1 + b12) * (x1 - 2.0 * g) : b1 * (x1 + 2.0 * g);
      break;
    case Table::kT4: {
      if (!direction || !xi) throw InvalidArgument("T4 attributions need a causal direction and xi");
      r.method = Method::kStratified;
      r.phi0 = *xi;
      if (*direction == CausalDirection::kX1CausesX2) {
        phi1 = up ? b0 + (b1 + b12) * x1 - *xi : b0 + b1 * x1 - *xi;
      } else {
        phi1 = up ? (b1 + b12) * (x1 - 2.0 * g) : b1 * (x1 + 2.0 * g);
        phi2 = up ? b0 + 2.0 * (b1 + b12) * g - *xi : b0 - 2.0 * b1 * g - *xi;
      }
      break;
    }
    case Table::kT6:
      if (!direction) throw InvalidArgument("T6 attributions need a causal direction");
      r.method = Method::kAsymmetric;
      r.phi0 = b0 + b12 * g;
      if (*direction == CausalDirection::kX1CausesX2) {
        phi1 = up ? (b1 + b12) * x1 - b12 * g : b1 * x1 - b12 * g;
      } else {
        phi1 = up ? (b1 + b12) * (x1 - 2.0 * g) : b1 * (x1 + 2.0 * g);
        phi2 = up ? (2.0 * b1 + b12) * g : -(2.0 * b1 + b12) * g;
      }
      break;
  }
  r.phi = {phi1, phi2};
  r.update_residual();
  return r;
}

Dataset sample_spline_data(std::size_t n, std::uint64_t seed, const SplineParams& p) {
  if (n < 1) throw InvalidArgument("sample size must be at least 1");
  Rng rng(seed);
  std::vector<double> values;
  values.reserve(3 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x1 = rng.normal();
    const double x2 = x1 > 0.0 ? 1.0 : 0.0;
    values.insert(values.end(), {x1, x2, spline(p, x1, x2)});
  }
  return Dataset({"x1", "x2", "y"}, std::move(values),
                 {ColumnKind::kContinuous, ColumnKind::kCategorical, ColumnKind::kContinuous});
}

RandomCase random_case(std::uint64_t seed, std::uint64_t index) {
  Rng rng(derive_seed(seed, index));
  auto u = [&rng] { return -3.0 + 6.0 * rng.uniform01(); };
  RandomCase c;
  c.params = {u(), u(), u()};
  c.x[0] = u();
  c.x[1] = c.x[0] > 0.0 ? 1.0 : 0.0;
  return c;
}

void write_golden_fixtures(std::ostream& out, std::size_t cases, std::uint64_t seed) {
  out << "table,direction,beta0,beta1,beta12,x1,x2,xi,phi0,phi1,phi2\n";
  auto emit = [&](const RandomCase& c, Table t, std::string_view dir, std::optional<CausalDirection> d,
                  std::optional<double> xi) {
    const AttributionReport r = table_attributions(t, c.params, c.x, d, xi);
    out << table_label(t) << ',' << dir << ',' << format_double(c.params.beta0) << ','
        << format_double(c.params.beta1) << ',' << format_double(c.params.beta12) << ','
        << format_double(c.x[0]) << ',' << format_double(c.x[1]) << ','
        << (xi ? format_double(*xi) : std::string()) << ',' << format_double(r.phi0) << ','
        << format_double(r.phi[0]) << ',' << format_double(r.phi[1]) << '\n';
  };
  for (std::size_t i = 0; i < cases; ++i) {
    const RandomCase c = random_case(seed, i);
    const double xi = c.params.beta0 + c.params.beta12 * kGamma;
    emit(c, Table::kT1, "", std::nullopt, std::nullopt);
    emit(c, Table::kT2, "", std::nullopt, std::nullopt);
    emit(c, Table::kT3, "", std::nullopt, std::nullopt);
    for (auto [label, d] : {std::pair{"x1->x2", CausalDirection::kX1CausesX2},
                            std::pair{"x2->x1", CausalDirection::kX2CausesX1}}) {
      emit(c, Table::kT4, label, d, xi);
      emit(c, Table::kT6, label, d, std::nullopt);
    }
  }
}

}  // namespace stratshap::oracle
