#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "orlicz/generator.hpp"
#include "orlicz/polynomial.hpp"
#include "orlicz/sampled_function.hpp"

namespace orlicz {

/// Named numeric parameters; scalars are one-element lists.
using Params = std::map<std::string, std::vector<double>>;

struct Membership {
  bool known = false;
  bool in_phi = false;
  bool in_psi_plus = false;
  std::string note;
};

/// A closed-form test function on R^n with its analytic metadata. Apart
/// from poly, entries depend on t_1 only.
struct TestFunction {
  std::string id;
  Params params;
  int dim = 1;
  PointFunction eval;
  /// d^alpha f(x), or nullopt where the derivative does not exist.
  std::function<std::optional<double>(const MultiIndex&, std::span<const double>)> derivative;
  /// int_lo^hi t^k f(t) dt for n = 1, when known in closed form.
  std::function<std::optional<double>(int, double, double)> moment;
  /// Local integrability of f against phi and psi^+ on bounded domains in R^n.
  std::function<Membership(const OrliczFunction&)> membership;

  double operator()(std::span<const double> t) const { return eval(t); }
};

/// Builds a registry entry; unknown ids or parameters are a DomainError.
TestFunction make_test_function(const std::string& id, const Params& params = {}, int dim = 1);

/// sum_alpha d^alpha f(x)/alpha! (t - x)^alpha when every derivative of
/// order <= m exists at x.
std::optional<Polynomial> taylor_polynomial(const TestFunction& f, const PolynomialSpace& space,
                                            std::span<const double> x);

SampledFunction sample(std::shared_ptr<const QuadDomain> domain, const TestFunction& f);

/// L^2([lo, hi]) projection onto Pi^m from the closed-form moments (n = 1),
/// centred at the midpoint; nullopt when a moment is not available.
std::optional<Polynomial> l2_projection(const TestFunction& f, double lo, double hi, int degree);

struct RegistryParam {
  std::string name;
  std::vector<double> default_value;
};

struct RegistryEntry {
  std::string id;
  std::string formula;
  std::vector<RegistryParam> params;
  std::string derivatives;
  std::string moments;
  std::string membership;
};

std::vector<RegistryEntry> registry_list();

}  // namespace orlicz
