#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "orlicz/quadrature.hpp"

namespace orlicz {

/// Exponent vector alpha of a monomial (t - c)^alpha; unused axes are 0.
struct MultiIndex {
  std::array<int, 2> exps{0, 0};

  int order() const noexcept { return exps[0] + exps[1]; }
  /// alpha! = alpha_1! alpha_2!
  double factorial() const noexcept;
  std::string label(int dim) const;

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
};

/// The space Pi^m of polynomials of degree <= m in n variables.
struct PolynomialSpace {
  int dim = 1;
  int degree = 0;

  /// C(n + m, n).
  std::size_t size() const;
  /// Graded order: total degree ascending, first exponent descending.
  std::vector<MultiIndex> multi_indices() const;

  friend bool operator==(const PolynomialSpace&, const PolynomialSpace&) = default;
};

/// Dense polynomial over the multi-index simplex, expanded around an explicit
/// centre: P(t) = sum_alpha a_alpha (t - center)^alpha.
class Polynomial {
 public:
  Polynomial(PolynomialSpace space, std::vector<double> center, std::vector<double> coeffs);
  /// The constant 0 in one variable.
  Polynomial() : Polynomial(PolynomialSpace{1, 0}) {}
  /// Zero polynomial centred at the origin.
  explicit Polynomial(PolynomialSpace space);
  Polynomial(PolynomialSpace space, std::vector<double> center);

  const PolynomialSpace& space() const noexcept { return space_; }
  int dim() const noexcept { return space_.dim; }
  int degree() const noexcept { return space_.degree; }
  const std::vector<double>& center() const noexcept { return center_; }
  std::span<const double> coeffs() const noexcept { return coeffs_; }
  std::span<double> coeffs() noexcept { return coeffs_; }

  double coefficient(const MultiIndex& alpha) const;
  double& coefficient(const MultiIndex& alpha);

  /// Exact evaluation by nested Horner per axis.
  double operator()(std::span<const double> t) const;

  /// Same polynomial expanded around another centre.
  Polynomial recentered(std::span<const double> new_center) const;

  bool is_zero() const noexcept;

  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(double c);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(double c, Polynomial a) { return a *= c; }
  friend Polynomial operator-(Polynomial a) { return a *= -1.0; }

 private:
  void require_compatible(const Polynomial& other) const;

  PolynomialSpace space_;
  std::vector<double> center_;
  std::vector<double> coeffs_;
};

/// Index of alpha in the graded order of `space`.
std::size_t index_of(const PolynomialSpace& space, const MultiIndex& alpha);

/// Evaluations at a flat list of points (stride = P.dim()).
std::vector<double> poly_eval(const Polynomial& P, std::span<const double> pts, int pts_dim);

/// Evaluations at every quadrature point of a domain.
std::vector<double> poly_eval(const Polynomial& P, const QuadDomain& domain);

struct PolyNorms {
  double sup_norm;
  double l1_norm;
};

/// Grid sup norm and quadrature L^1 norm.
PolyNorms poly_norms(const Polynomial& P, const QuadDomain& domain);

/// max |a - b| over coefficients after expanding both around a's centre.
double coefficient_distance(const Polynomial& a, const Polynomial& b);

/// Smallest observed ||P||_1 / (|Omega| ||P||_inf) over `trials` random
/// polynomials (coefficients uniform in [-1, 1] in coordinates scaled to the
/// domain's half widths). Deterministic in `seed`; a longer run extends the
/// same sample sequence.
double estimate_norm_equivalence(const PolynomialSpace& space, const QuadDomain& domain, std::size_t trials,
                                 std::uint64_t seed);

}  // namespace orlicz
