#include "orlicz/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "orlicz/errors.hpp"

namespace orlicz {

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

}  // namespace

double MultiIndex::factorial() const noexcept {
  double r = 1.0;
  for (int e : exps) {
    for (int i = 2; i <= e; ++i) r *= i;
  }
  return r;
}

std::string MultiIndex::label(int dim) const {
  std::string s = "a";
  for (int k = 0; k < dim; ++k) s += (k ? "_" : "") + std::to_string(exps[k]);
  return s;
}

std::size_t PolynomialSpace::size() const {
  if (dim < 1 || dim > 2 || degree < 0) throw DomainError("polynomial space needs n in {1,2} and m >= 0");
  return static_cast<std::size_t>(std::llround(binomial(dim + degree, dim)));
}

std::vector<MultiIndex> PolynomialSpace::multi_indices() const {
  std::vector<MultiIndex> out;
  out.reserve(size());
  for (int d = 0; d <= degree; ++d) {
    if (dim == 1) {
      out.push_back({{d, 0}});
    } else {
      for (int a = d; a >= 0; --a) out.push_back({{a, d - a}});
    }
  }
  return out;
}

std::size_t index_of(const PolynomialSpace& space, const MultiIndex& alpha) {
  const int d = alpha.order();
  if (d > space.degree || alpha.exps[0] < 0 || alpha.exps[1] < 0 || (space.dim == 1 && alpha.exps[1] != 0)) {
    throw DomainError("multi-index outside the polynomial space");
  }
  if (space.dim == 1) return static_cast<std::size_t>(alpha.exps[0]);
  // degrees 0..d-1 occupy d(d+1)/2 slots; within degree d, first exponent descends.
  return static_cast<std::size_t>(d * (d + 1) / 2 + (d - alpha.exps[0]));
}

Polynomial::Polynomial(PolynomialSpace space, std::vector<double> center, std::vector<double> coeffs)
    : space_(space), center_(std::move(center)), coeffs_(std::move(coeffs)) {
  if (center_.size() != static_cast<std::size_t>(space_.dim)) throw DomainError("polynomial centre dimension mismatch");
  if (coeffs_.size() != space_.size()) throw DomainError("polynomial coefficient count does not match C(n+m, n)");
}

Polynomial::Polynomial(PolynomialSpace space)
    : Polynomial(space, std::vector<double>(static_cast<std::size_t>(space.dim), 0.0)) {}

Polynomial::Polynomial(PolynomialSpace space, std::vector<double> center)
    : Polynomial(space, std::move(center), std::vector<double>(space.size(), 0.0)) {}

double Polynomial::coefficient(const MultiIndex& alpha) const { return coeffs_[index_of(space_, alpha)]; }
double& Polynomial::coefficient(const MultiIndex& alpha) { return coeffs_[index_of(space_, alpha)]; }

double Polynomial::operator()(std::span<const double> t) const {
  if (t.size() != static_cast<std::size_t>(space_.dim)) throw DomainError("poly_eval: point dimension mismatch");
  const int m = space_.degree;
  const double u = t[0] - center_[0];
  if (space_.dim == 1) {
    double acc = 0.0;
    for (int k = m; k >= 0; --k) acc = acc * u + coeffs_[static_cast<std::size_t>(k)];
    return acc;
  }
  // P = sum_i u^i * (sum_j a_{ij} v^j); inner and outer Horner.
  const double v = t[1] - center_[1];
  double outer = 0.0;
  for (int i = m; i >= 0; --i) {
    double inner = 0.0;
    for (int j = m - i; j >= 0; --j) inner = inner * v + coeffs_[index_of(space_, {{i, j}})];
    outer = outer * u + inner;
  }
  return outer;
}

Polynomial Polynomial::recentered(std::span<const double> new_center) const {
  if (new_center.size() != center_.size()) throw DomainError("recentered: dimension mismatch");
  // (t - c)^a = ((t - c') + d)^a with d = c' - c.
  Polynomial out(space_, std::vector<double>(new_center.begin(), new_center.end()));
  std::vector<double> shift(center_.size());
  for (std::size_t k = 0; k < center_.size(); ++k) shift[k] = new_center[k] - center_[k];
  for (const auto& alpha : space_.multi_indices()) {
    const double a = coefficient(alpha);
    if (a == 0.0) continue;
    if (space_.dim == 1) {
      for (int i = 0; i <= alpha.exps[0]; ++i) {
        out.coefficient({{i, 0}}) += a * binomial(alpha.exps[0], i) * std::pow(shift[0], alpha.exps[0] - i);
      }
    } else {
      for (int i = 0; i <= alpha.exps[0]; ++i) {
        for (int j = 0; j <= alpha.exps[1]; ++j) {
          out.coefficient({{i, j}}) += a * binomial(alpha.exps[0], i) * std::pow(shift[0], alpha.exps[0] - i) *
                                       binomial(alpha.exps[1], j) * std::pow(shift[1], alpha.exps[1] - j);
        }
      }
    }
  }
  return out;
}

bool Polynomial::is_zero() const noexcept {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](double c) { return c == 0.0; });
}

void Polynomial::require_compatible(const Polynomial& other) const {
  if (!(space_ == other.space_)) throw DomainError("polynomial arithmetic across different spaces");
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  require_compatible(other);
  const Polynomial rhs = other.center_ == center_ ? other : other.recentered(center_);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += rhs.coeffs_[i];
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  require_compatible(other);
  const Polynomial rhs = other.center_ == center_ ? other : other.recentered(center_);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= rhs.coeffs_[i];
  return *this;
}

Polynomial& Polynomial::operator*=(double c) {
  for (double& a : coeffs_) a *= c;
  return *this;
}

std::vector<double> poly_eval(const Polynomial& P, std::span<const double> pts, int pts_dim) {
  if (pts_dim != P.dim()) throw DomainError("poly_eval: point dimension mismatch");
  const auto d = static_cast<std::size_t>(pts_dim);
  std::vector<double> out(pts.size() / d);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = P(pts.subspan(i * d, d));
  return out;
}

std::vector<double> poly_eval(const Polynomial& P, const QuadDomain& domain) {
  return poly_eval(P, domain.points(), domain.dim());
}

PolyNorms poly_norms(const Polynomial& P, const QuadDomain& domain) {
  auto vals = poly_eval(P, domain);
  double sup = 0.0;
  for (double& v : vals) {
    v = std::abs(v);
    sup = std::max(sup, v);
  }
  return {sup, integrate(domain, vals)};
}

double coefficient_distance(const Polynomial& a, const Polynomial& b) {
  const Polynomial diff = a - b;
  double m = 0.0;
  for (double c : diff.coeffs()) m = std::max(m, std::abs(c));
  return m;
}

double estimate_norm_equivalence(const PolynomialSpace& space, const QuadDomain& domain, std::size_t trials,
                                 std::uint64_t seed) {
  if (trials < 1000) throw DomainError("estimate_norm_equivalence needs at least 1000 trials");
  if (!(domain.measure() > 0.0)) throw DomainError("estimate_norm_equivalence: degenerate domain");
  if (space.dim != domain.dim()) throw DomainError("estimate_norm_equivalence: dimension mismatch");

  const auto alphas = space.multi_indices();
  const auto& hw = domain.half_widths();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> coeffs(alphas.size());
  for (std::size_t t = 0; t < trials; ++t) {
    for (std::size_t i = 0; i < alphas.size(); ++i) {
      double scale = 1.0;
      for (int k = 0; k < space.dim; ++k) scale *= std::pow(hw[static_cast<std::size_t>(k)], alphas[i].exps[k]);
      coeffs[i] = unif(rng) / scale;
    }
    const Polynomial P(space, domain.center(), coeffs);
    const auto norms = poly_norms(P, domain);
    if (!(norms.sup_norm > 0.0)) continue;
    best = std::min(best, norms.l1_norm / (domain.measure() * norms.sup_norm));
  }
  if (!std::isfinite(best) || !(best > 0.0)) throw NumericError("estimate_norm_equivalence: no usable sample");
  return best;
}

}  // namespace orlicz
