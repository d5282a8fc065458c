#include "orlicz/registry.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include <Eigen/Dense>

#include "orlicz/errors.hpp"

namespace orlicz {

namespace {

double falling(double g, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= g - i;
  return r;
}

double sgn(double t) { return t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0); }

bool is_integer(double v) { return std::floor(v) == v; }

// int_lo^hi t^k s(t) |t|^g dt with s = sign (odd) or 1.
std::optional<double> pow_moment(int k, double g, bool odd, double lo, double hi) {
  auto piece = [&](double a, double b) -> std::optional<double> {
    // int_a^b u^(k+g) du for 0 <= a <= b
    if (b <= a) return 0.0;
    const double e = k + g + 1.0;
    if (a == 0.0 && e <= 0.0) return std::nullopt;
    if (e == 0.0) return std::log(b / a);
    return (std::pow(b, e) - std::pow(a, e)) / e;
  };
  const auto pos = piece(std::max(lo, 0.0), std::max(hi, 0.0));
  const auto neg = piece(-std::min(hi, 0.0), -std::min(lo, 0.0));
  if (!pos || !neg) return std::nullopt;
  const double sign_neg = ((k % 2) ? -1.0 : 1.0) * (odd ? -1.0 : 1.0);
  return *pos + sign_neg * *neg;
}

// d^k/dt^k of s(t)|t|^g at t (s = sign when odd).
std::optional<double> pow_derivative(int k, double g, bool odd, double t) {
  if (t != 0.0) {
    const double s = sgn(t);
    const double parity = ((k + (odd ? 1 : 0)) % 2) ? s : 1.0;
    return falling(g, k) * std::pow(std::abs(t), g - k) * parity;
  }
  if (k < g) return 0.0;
  // s(t)|t|^g is the monomial t^g exactly when g has the matching parity.
  const bool monomial = is_integer(g) && ((static_cast<long long>(g) % 2 == 1) == odd);
  if (!monomial) return std::nullopt;
  return k == static_cast<int>(g) ? falling(g, k) : 0.0;
}

double scalar(const Params& p, const std::string& name, double fallback) {
  const auto it = p.find(name);
  if (it == p.end()) return fallback;
  if (it->second.size() != 1) throw DomainError("parameter '" + name + "' must be a single number");
  return it->second.front();
}

void check_keys(const Params& p, const std::string& id, std::initializer_list<const char*> allowed) {
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : p) {
    if (!ok.count(k)) throw DomainError("unknown parameter '" + k + "' for test function " + id);
  }
}

Membership bounded_membership() { return {true, true, true, "bounded: in every L^phi on bounded domains"}; }

// Functions of t_1 alone: only alpha = (k, 0) derivatives are non-zero.
TestFunction one_variable(std::string id, Params params, int dim, std::function<double(double)> g,
                          std::function<std::optional<double>(int, double)> dg,
                          std::function<std::optional<double>(int, double, double)> moment) {
  TestFunction f;
  f.id = std::move(id);
  f.params = std::move(params);
  f.dim = dim;
  f.eval = [g](std::span<const double> t) { return g(t[0]); };
  f.derivative = [dg](const MultiIndex& a, std::span<const double> x) -> std::optional<double> {
    if (a.exps[1] != 0) return 0.0;
    return dg(a.exps[0], x[0]);
  };
  if (dim == 1) {
    f.moment = std::move(moment);
  } else {
    f.moment = [](int, double, double) -> std::optional<double> { return std::nullopt; };
  }
  f.membership = [](const OrliczFunction&) { return bounded_membership(); };
  return f;
}

std::size_t degree_for(std::size_t count, int dim) {
  for (int m = 0; m < 64; ++m) {
    const std::size_t s = PolynomialSpace{dim, m}.size();
    if (s == count) return static_cast<std::size_t>(m);
    if (s > count) break;
  }
  throw DomainError("poly: coefficient count is not C(n+m, n) for any m");
}

}  // namespace

TestFunction make_test_function(const std::string& id, const Params& params, int dim) {
  if (dim != 1 && dim != 2) throw DomainError("test functions live in R^1 or R^2");

  if (id == "poly") {
    check_keys(params, id, {"coeffs", "center"});
    std::vector<double> coeffs = params.count("coeffs") ? params.at("coeffs") : std::vector<double>{0.0};
    std::vector<double> center =
        params.count("center") ? params.at("center") : std::vector<double>(static_cast<std::size_t>(dim), 0.0);
    if (center.size() != static_cast<std::size_t>(dim)) throw DomainError("poly: centre dimension mismatch");
    const PolynomialSpace space{dim, static_cast<int>(degree_for(coeffs.size(), dim))};
    const Polynomial P(space, center, coeffs);
    TestFunction f;
    f.id = id;
    f.params = params;
    f.dim = dim;
    f.eval = [P](std::span<const double> t) { return P(t); };
    f.derivative = [P](const MultiIndex& a, std::span<const double> x) -> std::optional<double> {
      const Polynomial R = P.recentered(x);
      if (a.order() > R.degree()) return 0.0;
      return R.coefficient(a) * a.factorial();
    };
    f.moment = [P, dim](int k, double lo, double hi) -> std::optional<double> {
      if (dim != 1) return std::nullopt;
      const Polynomial R = P.recentered(std::vector<double>{0.0});
      double s = 0.0;
      for (int j = 0; j <= R.degree(); ++j) {
        const double e = j + k + 1;
        s += R.coeffs()[static_cast<std::size_t>(j)] * (std::pow(hi, e) - std::pow(lo, e)) / e;
      }
      return s;
    };
    f.membership = [](const OrliczFunction&) { return bounded_membership(); };
    return f;
  }
  if (id == "abs_pow" || id == "signed_pow") {
    check_keys(params, id, {"gamma"});
    const bool odd = id == "signed_pow";
    const double g = scalar(params, "gamma", odd ? 2.0 : 1.0);
    if (!(g > 0.0)) throw DomainError(id + ": gamma must be positive");
    return one_variable(
        id, params, dim, [g, odd](double t) { return (odd ? sgn(t) : 1.0) * std::pow(std::abs(t), g); },
        [g, odd](int k, double x) { return pow_derivative(k, g, odd, x); },
        [g, odd](int k, double lo, double hi) { return pow_moment(k, g, odd, lo, hi); });
  }
  if (id == "sign") {
    check_keys(params, id, {"amplitude"});
    const double a = scalar(params, "amplitude", 1.0);
    return one_variable(
        id, params, dim, [a](double t) { return a * sgn(t); },
        [a](int k, double x) -> std::optional<double> {
          if (x == 0.0) return std::nullopt;
          return k == 0 ? a * sgn(x) : 0.0;
        },
        [a](int k, double lo, double hi) -> std::optional<double> {
          const auto m = pow_moment(k, 0.0, true, lo, hi);
          if (!m) return std::nullopt;
          return a * *m;
        });
  }
  if (id == "sign_perturbed_pow") {
    check_keys(params, id, {"k", "delta"});
    const double kd = scalar(params, "k", 2.0);
    const double delta = scalar(params, "delta", 0.1);
    if (!(kd >= 0.0) || !is_integer(kd)) throw DomainError("sign_perturbed_pow: k must be a non-negative integer");
    const int k = static_cast<int>(kd);
    // t^k (1 + delta sign t) = t^k + delta s(t)|t|^k with s = sign for even k.
    const bool odd_part = k % 2 == 0;
    return one_variable(
        id, params, dim, [k, delta](double t) { return std::pow(t, k) * (1.0 + delta * sgn(t)); },
        [k, delta, odd_part](int j, double x) -> std::optional<double> {
          const double base = j <= k ? falling(k, j) * std::pow(x, k - j) : 0.0;
          if (delta == 0.0) return base;
          const auto pert = pow_derivative(j, k, odd_part, x);
          if (!pert) return std::nullopt;
          return base + delta * *pert;
        },
        [k, delta, odd_part](int j, double lo, double hi) -> std::optional<double> {
          const double e = j + k + 1;
          const double base = (std::pow(hi, e) - std::pow(lo, e)) / e;
          const auto pert = pow_moment(j, k, odd_part, lo, hi);
          if (!pert) return std::nullopt;
          return base + delta * *pert;
        });
  }
  if (id == "sing_pow") {
    check_keys(params, id, {"beta"});
    const double beta = scalar(params, "beta", 0.75);
    if (!(beta > 0.0)) throw DomainError("sing_pow: beta must be positive");
    auto f = one_variable(
        id, params, dim, [beta](double t) { return std::pow(std::abs(t), -beta); },
        [beta](int k, double x) -> std::optional<double> {
          if (x == 0.0) return std::nullopt;
          return pow_derivative(k, -beta, false, x);
        },
        [beta](int k, double lo, double hi) { return pow_moment(k, -beta, false, lo, hi); });
    f.membership = [beta](const OrliczFunction& F) {
      Membership m;
      const auto q = F.growth_exponent();
      if (!q) {
        m.note = "unknown: phi has no closed-form growth exponent";
        return m;
      }
      // |t_1|^(-beta) against s^q near the hyperplane t_1 = 0.
      m.known = true;
      m.in_phi = beta * *q < 1.0;
      m.in_psi_plus = beta * (*q - 1.0) < 1.0;
      if (m.in_phi) {
        m.note = "in L^phi";
      } else if (m.in_psi_plus) {
        m.note = "in L^{psi+} \\ L^phi";
      } else {
        m.note = "not in L^{psi+}";
      }
      return m;
    };
    return f;
  }
  if (id == "bump") {
    check_keys(params, id, {"center", "width", "amplitude"});
    const double c = scalar(params, "center", 0.25);
    const double w = scalar(params, "width", 0.05);
    const double a = scalar(params, "amplitude", 1.0);
    if (!(w > 0.0)) throw DomainError("bump: width must be positive");
    const double om = std::numbers::pi / w;
    return one_variable(
        id, params, dim,
        [c, w, a](double t) {
          const double u = t - c;
          if (std::abs(u) >= w) return 0.0;
          const double v = std::cos(std::numbers::pi * u / (2.0 * w));
          return a * v * v;
        },
        [c, w, a, om](int k, double x) -> std::optional<double> {
          const double u = x - c;
          if (std::abs(u) > w) return 0.0;
          if (std::abs(u) == w) {
            if (k <= 1) return 0.0;
            return std::nullopt;
          }
          // a/2 (1 + cos(om u))
          const double d = std::pow(om, k) * std::cos(om * u + k * std::numbers::pi / 2.0);
          return k == 0 ? 0.5 * a * (1.0 + std::cos(om * u)) : 0.5 * a * d;
        },
        [](int, double, double) -> std::optional<double> { return std::nullopt; });
  }
  if (id == "exp") {
    check_keys(params, id, {"rate"});
    const double r = scalar(params, "rate", 1.0);
    return one_variable(
        id, params, dim, [r](double t) { return std::exp(r * t); },
        [r](int k, double x) -> std::optional<double> { return std::pow(r, k) * std::exp(r * x); },
        [r](int k, double lo, double hi) -> std::optional<double> {
          if (r == 0.0) return (std::pow(hi, k + 1) - std::pow(lo, k + 1)) / (k + 1);
          // I_j = [t^j e^{rt}/r] - (j/r) I_{j-1}
          double I = (std::exp(r * hi) - std::exp(r * lo)) / r;
          for (int j = 1; j <= k; ++j) {
            I = (std::pow(hi, j) * std::exp(r * hi) - std::pow(lo, j) * std::exp(r * lo)) / r - j / r * I;
          }
          return I;
        });
  }
  throw DomainError("unknown test function id '" + id + "'");
}

std::optional<Polynomial> taylor_polynomial(const TestFunction& f, const PolynomialSpace& space,
                                            std::span<const double> x) {
  if (space.dim != f.dim || x.size() != static_cast<std::size_t>(f.dim)) {
    throw DomainError("taylor_polynomial: dimension mismatch");
  }
  Polynomial P(space, std::vector<double>(x.begin(), x.end()));
  for (const auto& a : space.multi_indices()) {
    const auto d = f.derivative(a, x);
    if (!d) return std::nullopt;
    P.coefficient(a) = *d / a.factorial();
  }
  return P;
}

SampledFunction sample(std::shared_ptr<const QuadDomain> domain, const TestFunction& f) {
  if (domain->dim() != f.dim) throw DomainError("test function and domain dimensions differ");
  std::ostringstream src;
  src << f.id;
  if (!f.params.empty()) {
    src << '(';
    bool first = true;
    for (const auto& [k, v] : f.params) {
      src << (first ? "" : ",") << k << '=';
      for (std::size_t i = 0; i < v.size(); ++i) src << (i ? ";" : "") << v[i];
      first = false;
    }
    src << ')';
  }
  auto out = sample(std::move(domain), f.eval, src.str());
  out.provenance = Provenance::closed_form;
  return out;
}

std::optional<Polynomial> l2_projection(const TestFunction& f, double lo, double hi, int degree) {
  if (f.dim != 1 || !f.moment) return std::nullopt;
  const double c = 0.5 * (lo + hi);
  const int d = degree + 1;
  std::vector<double> mom(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) {
    const auto v = f.moment(k, lo, hi);
    if (!v) return std::nullopt;
    mom[static_cast<std::size_t>(k)] = *v;
  }
  Eigen::MatrixXd G(d, d);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const int e = i + j + 1;
      G(i, j) = (std::pow(hi - c, e) - std::pow(lo - c, e)) / e;
    }
    // int f (t - c)^i = sum_l C(i, l) (-c)^(i-l) int f t^l
    double binom = 1.0;
    for (int l = 0; l <= i; ++l) {
      b(i) += binom * std::pow(-c, i - l) * mom[static_cast<std::size_t>(l)];
      binom = binom * (i - l) / (l + 1);
    }
  }
  const Eigen::VectorXd a = G.colPivHouseholderQr().solve(b);
  return Polynomial(PolynomialSpace{1, degree}, {c}, std::vector<double>(a.data(), a.data() + d));
}

std::vector<RegistryEntry> registry_list() {
  return {
      {"poly", "sum_alpha a_alpha (t - c)^alpha, every element of Pi^m", {{"coeffs", {0.0}}, {"center", {0.0}}},
       "all orders", "n = 1", "bounded"},
      {"abs_pow", "|t_1|^gamma", {{"gamma", {1.0}}}, "t != 0; at 0 for orders < gamma", "n = 1", "bounded"},
      {"signed_pow", "t_1 |t_1|^(gamma - 1)  (gamma = 2: x|x|)", {{"gamma", {2.0}}},
       "t != 0; at 0 for orders < gamma", "n = 1", "bounded"},
      {"sign", "amplitude * sign(t_1)", {{"amplitude", {1.0}}}, "t != 0", "n = 1", "bounded"},
      {"sign_perturbed_pow", "t_1^k (1 + delta sign(t_1))", {{"k", {2.0}}, {"delta", {0.1}}},
       "t != 0; at 0 for orders < k", "n = 1", "bounded"},
      {"sing_pow", "|t_1|^(-beta)", {{"beta", {0.75}}}, "t != 0", "n = 1, k > beta - 1",
       "in L^phi iff beta q < 1, in L^{psi+} iff beta (q - 1) < 1 (phi ~ s^q); phi = s^2, "
       "beta in [1/2, 1): L^{psi+} \\ L^phi"},
      {"bump", "amplitude cos^2(pi (t_1 - center) / (2 width)) on |t_1 - center| < width",
       {{"center", {0.25}}, {"width", {0.05}}, {"amplitude", {1.0}}}, "all orders off the support edge", "none",
       "bounded"},
      {"exp", "exp(rate t_1)", {{"rate", {1.0}}}, "all orders", "n = 1", "bounded"},
  };
}

}  // namespace orlicz
