#include "cycleweights/saddle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include "cycleweights/errors.hpp"
#include "cycleweights/simd/kernels.hpp"
#include "cycleweights/special.hpp"

namespace cycleweights {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSeriesTailRatio = 1e-14;
constexpr int kMaxIterations = 200;

double integrate(auto&& f, double lo, double hi) {
  using boost::math::quadrature::gauss_kronrod;
  return gauss_kronrod<double, 61>::integrate(f, lo, hi, 20, 1e-14);
}

// Algebraic family: I_0(z) = Gamma(g+1) ((1-z)^{-g-1} - 1).
double algebraic_imu(double g, int mu, double r) {
  const double G1 = std::tgamma(g + 1.0);
  const double G2 = std::tgamma(g + 2.0);
  const double l1m = std::log1p(-r);  // log(1 - r)
  switch (mu) {
    case -1: {
      // I_{-1}(z) = Gamma(g+1) int_0^z ((1-t)^{-g-1} - 1)/t dt; with
      // u = -log(1-t) the integrand becomes expm1((g+1)u)/expm1(u).
      const double U = -l1m;
      auto f = [g](double u) { return u < 1e-300 ? g + 1.0 : std::expm1((g + 1.0) * u) / std::expm1(u); };
      return G1 * integrate(f, 0.0, U);
    }
    case 0: return G1 * std::expm1(-(g + 1.0) * l1m);
    case 1: return G2 * r * std::exp(-(g + 2.0) * l1m);
    case 2: return G2 * r * (std::exp(-(g + 2.0) * l1m) + (g + 2.0) * r * std::exp(-(g + 3.0) * l1m));
    default: break;
  }
  throw ConfigError(fmt::format("eval_Imu: mu = {} not supported", mu));
}

double subexp_log_G(const SubExpParams& p, double r) {
  return std::log(p.A) - p.c * std::log1p(-r) + p.a * std::pow(1.0 - r, -p.b);
}

double subexp_alpha_raw(const SubExpParams& p, double r) {
  const double q = 1.0 - r;
  return r * (p.c / q + p.a * p.b * std::pow(q, -p.b - 1.0));
}

double subexp_alpha_prime_raw(const SubExpParams& p, double r) {
  const double q = 1.0 - r;
  const double ab = p.a * p.b;
  return p.c / q + p.c * r / (q * q) + ab * std::pow(q, -p.b - 1.0) + ab * (p.b + 1.0) * r * std::pow(q, -p.b - 2.0);
}

double subexp_imu(const SubExpParams& p, int mu, double r) {
  const double I0 = r * std::exp(subexp_log_G(p, r));
  switch (mu) {
    case -1: return integrate([&p](double t) { return std::exp(subexp_log_G(p, t)); }, 0.0, r);
    case 0: return I0;
    case 1: return I0 * (subexp_alpha_raw(p, r) + 1.0);
    case 2: {
      const double alpha = subexp_alpha_raw(p, r);
      return I0 * (alpha + 1.0) * (alpha + 1.0) + r * I0 * subexp_alpha_prime_raw(p, r);
    }
    default: break;
  }
  throw ConfigError(fmt::format("eval_Imu: mu = {} not supported", mu));
}

// Returns nullopt when the last available term is not negligible.
std::optional<double> series_imu(const WeightTable& w, int mu, double r) {
  if (mu < -1 || mu > 2) throw ConfigError(fmt::format("eval_Imu: mu = {} not supported", mu));
  const std::size_t N = w.size();
  const double lr = std::log(r);
  std::vector<double> terms(N);
  for (std::size_t n = 1; n <= N; ++n) {
    const double nd = static_cast<double>(n);
    terms[n - 1] = mu * std::log(nd) + w.log_theta(n) + nd * lr;
  }
  const double total = simd::logsumexp(terms);
  auto last = std::find_if(terms.rbegin(), terms.rend(), [](double t) { return t != kNegInf; });
  if (last != terms.rend() && *last > total + std::log(kSeriesTailRatio)) return std::nullopt;
  return std::exp(total);
}

void check_radius(const GenFnSpec& spec, double r) {
  if (!(r >= 0.0 && r < spec.radius())) {
    throw ConfigError(fmt::format("eval_Imu: r = {} outside [0, {})", r, spec.radius()));
  }
}

struct Evaluation {
  double f = 0.0;
  double df = 0.0;
};

// Target function of the saddle equation and its derivative.
std::optional<Evaluation> saddle_target(const GenFnSpec& spec, double r) {
  switch (spec.kind()) {
    case GenFnKind::SubExpGrowthClosedForm:
      return Evaluation{subexp_alpha_raw(spec.subexp(), r), subexp_alpha_prime_raw(spec.subexp(), r)};
    case GenFnKind::AlgebraicClosedForm:
      return Evaluation{algebraic_imu(spec.gamma(), 0, r), algebraic_imu(spec.gamma(), 1, r) / r};
    case GenFnKind::SeriesTruncated: {
      const auto i0 = series_imu(spec.series_weights(), 0, r);
      if (!i0) return std::nullopt;
      const auto i1 = series_imu(spec.series_weights(), 1, r);
      if (!i1) return std::nullopt;
      return Evaluation{*i0, *i1 / r};
    }
  }
  return std::nullopt;
}

}  // namespace

GenFnSpec GenFnSpec::algebraic(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ConfigError("algebraic generating function needs gamma > 0");
  GenFnSpec s;
  s.kind_ = GenFnKind::AlgebraicClosedForm;
  s.gamma_ = gamma;
  s.radius_ = 1.0;
  return s;
}

GenFnSpec GenFnSpec::subexp_growth(double gamma) {
  GenFnSpec s;
  s.kind_ = GenFnKind::SubExpGrowthClosedForm;
  s.gamma_ = gamma;
  s.subexp_ = SubExpParams::from_gamma(gamma);
  s.radius_ = 1.0;
  return s;
}

GenFnSpec GenFnSpec::series(WeightTable weights, std::optional<double> radius) {
  GenFnSpec s;
  s.kind_ = GenFnKind::SeriesTruncated;
  s.gamma_ = weights.params().gamma;
  if (radius) {
    if (!(*radius > 0.0)) throw ConfigError("series radius must be positive");
    s.radius_ = *radius;
  } else {
    switch (weights.params().kind) {
      case FamilyKind::SuperExpDecay: s.radius_ = kInf; break;
      case FamilyKind::SuperExpGrowth:
        throw ConfigError("super-exponential growth has zero radius of convergence; no saddle point exists");
      default: s.radius_ = 1.0; break;
    }
  }
  s.series_ = std::move(weights);
  return s;
}

double eval_Imu(const GenFnSpec& spec, int mu, double r) {
  check_radius(spec, r);
  if (mu < -1 || mu > 2) throw ConfigError(fmt::format("eval_Imu: mu = {} not supported", mu));
  if (r == 0.0) return 0.0;
  switch (spec.kind()) {
    case GenFnKind::AlgebraicClosedForm: return algebraic_imu(spec.gamma(), mu, r);
    case GenFnKind::SubExpGrowthClosedForm: return subexp_imu(spec.subexp(), mu, r);
    case GenFnKind::SeriesTruncated: {
      const auto v = series_imu(spec.series_weights(), mu, r);
      if (!v) throw NumericError(fmt::format("eval_Imu: series truncated at N = {} has not converged at r = {}",
                                             spec.series_weights().size(), r));
      return *v;
    }
  }
  return 0.0;
}

double subexp_alpha(const GenFnSpec& spec, double r) {
  if (spec.kind() != GenFnKind::SubExpGrowthClosedForm) throw ConfigError("alpha requires the sub-exp closed form");
  check_radius(spec, r);
  return subexp_alpha_raw(spec.subexp(), r);
}

double subexp_alpha_prime(const GenFnSpec& spec, double r) {
  if (spec.kind() != GenFnKind::SubExpGrowthClosedForm) throw ConfigError("alpha requires the sub-exp closed form");
  check_radius(spec, r);
  return subexp_alpha_prime_raw(spec.subexp(), r);
}

SaddleSolution solve_saddle(const GenFnSpec& spec, std::size_t n) {
  if (n < 1) throw ConfigError("solve_saddle: n must be >= 1");
  const double target = static_cast<double>(n);
  const double tol = 1e-9 * target;

  double lo = 0.0;
  double hi = 0.0;
  if (std::isfinite(spec.radius())) {
    hi = spec.radius() * (1.0 - std::sqrt(std::numeric_limits<double>::epsilon()));
    if (const auto e = saddle_target(spec, hi); e && e->f < target) {
      throw NumericError(fmt::format("solve_saddle: no sign change in bracket for n = {}", n));
    }
  } else {
    hi = 1.0;
    for (int k = 0;; ++k) {
      const auto e = saddle_target(spec, hi);
      if (!e) throw NumericError("solve_saddle: series truncation failed while expanding the bracket");
      if (e->f >= target) break;
      if (k > 2000) throw NumericError("solve_saddle: could not bracket the saddle point");
      lo = hi;
      hi *= 2.0;
    }
  }

  int iterations = 0;
  while (hi - lo > 1e-6 * std::max(1.0, hi)) {
    if (++iterations > kMaxIterations) throw NumericError("solve_saddle: iteration cap reached in bisection");
    const double mid = 0.5 * (lo + hi);
    const auto e = saddle_target(spec, mid);
    if (!e || e->f >= target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }

  double r = 0.5 * (lo + hi);
  double best_r = r;
  double best_res = std::numeric_limits<double>::infinity();
  int polish = 0;
  while (true) {
    if (++iterations > kMaxIterations) {
      if (std::abs(best_res) <= tol) break;
      throw NumericError(fmt::format("solve_saddle: iteration cap reached for n = {}", n));
    }
    const auto e = saddle_target(spec, r);
    if (!e) {
      hi = r;
      r = 0.5 * (lo + hi);
      continue;
    }
    const double res = e->f - target;
    if (std::abs(res) < std::abs(best_res)) {
      best_res = res;
      best_r = r;
    } else if (std::abs(best_res) <= tol) {
      break;  // no further progress
    }
    if (res < 0.0) {
      lo = r;
    } else {
      hi = r;
    }
    if (std::abs(best_res) <= tol && ++polish > 3) break;
    double next = r - res / e->df;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == r) {
      if (std::abs(best_res) <= tol) break;
      throw NumericError("solve_saddle: Newton stalled before reaching tolerance");
    }
    r = next;
  }
  if (!std::isfinite(spec.radius()) && !(best_r > 0.0)) throw NumericError("solve_saddle: invalid root");

  SaddleSolution sol;
  sol.n = n;
  sol.r = best_r;
  sol.residual = best_res;
  sol.I_m1 = eval_Imu(spec, -1, best_r);
  sol.I_0 = eval_Imu(spec, 0, best_r);
  sol.I_1 = eval_Imu(spec, 1, best_r);
  return sol;
}

double asymptotic_hn(const GenFnSpec& spec, const SaddleSolution& sol) {
  if (spec.kind() == GenFnKind::SubExpGrowthClosedForm) {
    throw Unsupported("asymptotic_hn: the sub-exp closed form carries the G_theta saddle; use a series spec");
  }
  return sol.I_m1 - static_cast<double>(sol.n) * std::log(sol.r) -
         0.5 * std::log(2.0 * std::numbers::pi * sol.I_1);
}

double asymptotic_theta(const GenFnSpec& spec, std::size_t n) {
  if (spec.kind() != GenFnKind::SubExpGrowthClosedForm) {
    throw ConfigError("asymptotic_theta requires the sub-exp closed form");
  }
  const SaddleSolution sol = solve_saddle(spec, n);
  const double rho = sol.r;
  return subexp_log_G(spec.subexp(), rho) - (static_cast<double>(n) + 0.5) * std::log(rho) -
         0.5 * std::log(2.0 * std::numbers::pi * subexp_alpha_prime_raw(spec.subexp(), rho));
}

RatioBounds ratio_bounds(const GenFnSpec& spec, std::size_t n, std::size_t j) {
  if (spec.kind() == GenFnKind::SubExpGrowthClosedForm) {
    throw Unsupported("ratio_bounds: needs the G_h saddle; use a series spec");
  }
  if (j == 0) return {0.0, 0.0};
  if (j >= n) throw ConfigError(fmt::format("ratio_bounds: need j < n (j = {}, n = {})", j, n));
  const SaddleSolution at_n = solve_saddle(spec, n);
  const SaddleSolution at_nj = solve_saddle(spec, n - j);
  const double half = 0.5 * (std::log(at_n.I_1) - std::log(at_nj.I_1));
  const double jd = static_cast<double>(j);
  return {half + jd * std::log(at_nj.r), half + jd * std::log(at_n.r)};
}

}  // namespace cycleweights
