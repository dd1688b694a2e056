// SPDX-License-Identifier: Apache-2.0
//
// Concave-over-affine fractional programming.
//
//   maximize  f(x) / g(x)   s.t.  h_j(x) >= 0,  lower <= x <= upper
//
// with f and every h_j concave and g affine and positive. Dinkelbach's method
// reduces the ratio to a sequence of parametric problems max f - mu g, each of
// which is solved here by a log-barrier Newton method. The concave functions
// are restricted to a form that covers everything the relay problem needs:
// affine + a negative semidefinite quadratic + univariate log-ratio terms
//
//   w * log2((q + (p + r) x_k) / (q + r x_k)),   w, p, r >= 0,  q > 0,
//
// which is exactly the shape of one eigenmode's rate.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace eerelay::fractional {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct LogRatioTerm {
  std::size_t var = 0;
  double weight = 1.0;
  double gain = 0.0;
  double base = 1.0;
  double slope = 0.0;

  bool active() const { return gain != 0.0 && weight != 0.0; }

  double value(double x) const {
    if (!active()) return 0.0;
    return weight * std::log2((base + (gain + slope) * x) / (base + slope * x));
  }
  double d1(double x) const {
    if (!active()) return 0.0;
    const double u = base + (gain + slope) * x, v = base + slope * x;
    return weight / std::numbers::ln2 * ((gain + slope) / u - slope / v);
  }
  double d2(double x) const {
    if (!active()) return 0.0;
    const double u = base + (gain + slope) * x, v = base + slope * x;
    const double a = (gain + slope) / u, b = slope / v;
    return weight / std::numbers::ln2 * (b * b - a * a);
  }
  bool in_domain(double x) const {
    return !active() || (base + (gain + slope) * x > 0.0 && base + slope * x > 0.0);
  }
};

/// constant + linear.x + 0.5 x'Qx + sum of log-ratio terms. Empty `linear` or
/// `quadratic` mean zero.
struct ConcaveFunction {
  double constant = 0.0;
  Vec linear;
  Mat quadratic;
  std::vector<LogRatioTerm> terms;

  double value(const Vec& x) const {
    double v = constant;
    if (linear.size()) v += linear.dot(x);
    if (quadratic.size()) v += 0.5 * x.dot(quadratic * x);
    for (const auto& t : terms) v += t.value(x(t.var));
    return v;
  }
  bool in_domain(const Vec& x) const {
    return std::all_of(terms.begin(), terms.end(), [&](const LogRatioTerm& t) { return t.in_domain(x(t.var)); });
  }
  /// grad += scale * df
  void add_gradient(const Vec& x, double scale, Vec& grad) const {
    if (linear.size()) grad += scale * linear;
    if (quadratic.size()) grad += scale * (quadratic * x);
    for (const auto& t : terms) grad(t.var) += scale * t.d1(x(t.var));
  }
  void add_hessian(const Vec& x, double scale, Mat& hess) const {
    if (quadratic.size()) hess += scale * quadratic;
    for (const auto& t : terms) hess(t.var, t.var) += scale * t.d2(x(t.var));
  }
  bool is_zero() const {
    return constant == 0.0 && (linear.size() == 0 || linear.isZero(0.0)) &&
           (quadratic.size() == 0 || quadratic.isZero(0.0)) &&
           std::none_of(terms.begin(), terms.end(), [](const LogRatioTerm& t) { return t.active(); });
  }
};

struct AffineFunction {
  double constant = 0.0;
  Vec linear;

  double value(const Vec& x) const { return constant + (linear.size() ? linear.dot(x) : 0.0); }
};

struct FractionalProblem {
  ConcaveFunction numerator;
  AffineFunction denominator;
  std::vector<ConcaveFunction> constraints;  // each h_j(x) >= 0
  std::vector<double> constraint_scale;      // phase-I normalisation; empty means 1 for all
  Vec lower;
  Vec upper;  // +inf allowed; upper == lower pins the variable

  std::size_t dim() const { return static_cast<std::size_t>(lower.size()); }

  double scale(std::size_t j) const { return j < constraint_scale.size() ? constraint_scale[j] : 1.0; }

  double ratio(const Vec& x) const { return numerator.value(x) / denominator.value(x); }

  double min_constraint(const Vec& x) const {
    double m = kInf;
    for (const auto& h : constraints) m = std::min(m, h.value(x));
    return m;
  }

  /// All constraints >= -tol and bounds respected.
  bool feasible(const Vec& x, double tol = 1e-9) const {
    for (Eigen::Index i = 0; i < x.size(); ++i)
      if (x(i) < lower(i) - tol || x(i) > upper(i) + tol) return false;
    return min_constraint(x) >= -tol;
  }
};

struct BarrierOptions {
  double mu0 = 1.0;        // initial barrier weight 1/t
  double shrink = 0.2;     // barrier weight multiplier per stage
  double gap_tol = 1e-9;   // stop once (#barrier terms) / t falls below this
  double newton_tol = 1e-10;
  int max_newton = 200;    // per centering step
};

enum class Status { Converged, NotConverged, Infeasible };

struct InnerResult {
  Vec x;
  Status status = Status::Converged;
  int newton_steps = 0;
  double kkt_residual = 0.0;  // ||grad Lagrangian||_inf + duality gap bound
};

struct InteriorResult {
  Vec x;
  bool found = false;
  double min_scaled_slack = -kInf;  // best value of min_j h_j(x) / scale_j reached
  int newton_steps = 0;
};

struct DinkelbachResult {
  Vec x;
  double mu = 0.0;  // f(x)/g(x) at the returned point
  int iterations = 0;
  Status status = Status::Converged;
  std::vector<double> mu_history;  // mu^(n) used in each parametric solve
  std::vector<double> f_history;   // F(mu^(n))
  int newton_steps = 0;
  double kkt_residual = 0.0;
};

namespace detail {

/// Maps the free (non-pinned) coordinates of x to a reduced vector.
class FreeSet {
 public:
  explicit FreeSet(const FractionalProblem& p) {
    for (std::size_t i = 0; i < p.dim(); ++i)
      if (p.upper(i) > p.lower(i)) idx_.push_back(static_cast<Eigen::Index>(i));
  }
  Eigen::Index size() const { return static_cast<Eigen::Index>(idx_.size()); }
  Eigen::Index operator[](Eigen::Index k) const { return idx_[static_cast<std::size_t>(k)]; }

  Vec gather(const Vec& full) const {
    Vec z(size());
    for (Eigen::Index k = 0; k < size(); ++k) z(k) = full((*this)[k]);
    return z;
  }
  void scatter(const Vec& z, Vec& full) const {
    for (Eigen::Index k = 0; k < size(); ++k) full((*this)[k]) = z(k);
  }
  Vec reduce(const Vec& g) const { return gather(g); }
  Mat reduce(const Mat& h) const {
    Mat r(size(), size());
    for (Eigen::Index a = 0; a < size(); ++a)
      for (Eigen::Index b = 0; b < size(); ++b) r(a, b) = h((*this)[a], (*this)[b]);
    return r;
  }

 private:
  std::vector<Eigen::Index> idx_;
};

/// Damped Newton ascent on a concave model. `Model::evaluate(z, val, grad, hess)`
/// returns false outside the barrier domain; grad/hess may be null. After an
/// evaluation `model.magnitude` holds the sum of absolute term values, which sets
/// the rounding floor for the stopping test.
/// Newton direction for the concave model: solves (-H + reg I) d = g, regularising
/// only when -H is not positive definite. Returns false if no usable direction exists.
inline bool newton_direction(const Mat& hess, const Vec& grad, Vec& dir, double& decrement) {
  const Eigen::Index n = grad.size();
  Mat neg = -hess;
  Eigen::LDLT<Mat> ldlt(neg);
  double reg = 0.0;
  const double diag_scale = std::max(1.0, neg.diagonal().cwiseAbs().maxCoeff());
  while (ldlt.info() != Eigen::Success || !ldlt.isPositive() || ldlt.vectorD().minCoeff() <= 0.0) {
    reg = reg == 0.0 ? 1e-12 * diag_scale : reg * 10.0;
    if (reg > 1e6 * diag_scale) return false;
    ldlt.compute(neg + reg * Mat::Identity(n, n));
  }
  dir = ldlt.solve(grad);
  decrement = grad.dot(dir);
  return decrement >= 0.0 && std::isfinite(decrement);
}

/// Damped Newton ascent on a concave model. `Model::evaluate(z, val, grad, hess)`
/// returns false outside the barrier domain; grad/hess may be null. After an
/// evaluation `model.magnitude` holds the sum of absolute term values.
///
/// Once the decrement reaches the rounding floor of the objective value, the
/// line search on values is no longer informative; the remaining steps are
/// full Newton steps accepted while the decrement keeps shrinking.
template <class Model>
int newton_maximize(const Model& model, Vec& z, int max_iter, double tol, bool& converged) {
  const Eigen::Index n = z.size();
  Vec grad(n), dir(n);
  Mat hess(n, n);
  double val = 0.0, decrement = 0.0;
  converged = false;
  if (n == 0) {
    converged = true;
    return 0;
  }
  int it = 0;
  for (; it < max_iter; ++it) {
    if (!model.evaluate(z, val, &grad, &hess)) return it;
    if (!newton_direction(hess, grad, dir, decrement)) return it;
    if (0.5 * decrement <= tol) {
      converged = true;
      return it;
    }
    if (0.5 * decrement <= 1e-13 * model.magnitude) break;
    double step = 1.0;
    bool accepted = false;
    const double slack = 1e-13 * (1.0 + model.magnitude);
    for (int ls = 0; ls < 60; ++ls) {
      const Vec trial = z + step * dir;
      double tv = 0.0;
      if (model.evaluate(trial, tv, nullptr, nullptr) && tv >= val + 0.25 * step * decrement - slack) {
        z = trial;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  if (it == max_iter) return it;

  // Gradient-driven polish.
  Vec tg(n);
  Mat th(n, n);
  for (int k = 0; k < 8 && it < max_iter; ++k, ++it) {
    double step = 1.0, tv = 0.0, tdec = 0.0;
    Vec tdir(n);
    bool moved = false;
    for (int ls = 0; ls < 30; ++ls) {
      const Vec trial = z + step * dir;
      if (model.evaluate(trial, tv, &tg, &th) && newton_direction(th, tg, tdir, tdec) && tdec < decrement) {
        z = trial;
        dir = tdir;
        decrement = tdec;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved || 0.5 * decrement <= tol) break;
  }
  model.evaluate(z, val, nullptr, nullptr);
  converged = 0.5 * decrement <= tol + 1e-11 * model.magnitude;
  return it;
}

/// Centering objective t (w_f f - mu g) + sum log h_j + sum log(bound slacks).
struct BarrierModel {
  const FractionalProblem& p;
  const FreeSet& free;
  Vec& full;  // scratch, carries pinned coordinates
  double t = 1.0;
  double mu = 0.0;
  double fw = 1.0;  // weight on the numerator (0 for pure power minimisation)
  mutable double magnitude = 0.0;

  bool evaluate(const Vec& z, double& val, Vec* grad, Mat* hess) const {
    free.scatter(z, full);
    const Eigen::Index n = static_cast<Eigen::Index>(p.dim());
    for (Eigen::Index k = 0; k < free.size(); ++k) {
      const auto i = free[k];
      if (!(full(i) > p.lower(i)) || !(full(i) < p.upper(i))) return false;
    }
    if (!p.numerator.in_domain(full)) return false;
    double v = 0.0;
    const double fv = fw != 0.0 ? t * fw * p.numerator.value(full) : 0.0;
    const double gv = t * mu * p.denominator.value(full);
    v += fv - gv;
    double mag = std::abs(fv) + std::abs(gv);
    std::vector<double> hv(p.constraints.size());
    for (std::size_t j = 0; j < p.constraints.size(); ++j) {
      if (!p.constraints[j].in_domain(full)) return false;
      hv[j] = p.constraints[j].value(full);
      if (!(hv[j] > 0.0)) return false;
      v += std::log(hv[j]);
      mag += std::abs(std::log(hv[j]));
    }
    for (Eigen::Index k = 0; k < free.size(); ++k) {
      const auto i = free[k];
      v += std::log(full(i) - p.lower(i));
      if (std::isfinite(p.upper(i))) v += std::log(p.upper(i) - full(i));
    }
    if (!std::isfinite(v)) return false;
    val = v;
    magnitude = mag + std::abs(v);
    if (!grad) return true;

    Vec g = Vec::Zero(n);
    Mat h = Mat::Zero(n, n);
    if (fw != 0.0) {
      p.numerator.add_gradient(full, t * fw, g);
      p.numerator.add_hessian(full, t * fw, h);
    }
    if (p.denominator.linear.size()) g -= t * mu * p.denominator.linear;
    for (std::size_t j = 0; j < p.constraints.size(); ++j) {
      Vec gj = Vec::Zero(n);
      p.constraints[j].add_gradient(full, 1.0, gj);
      g += gj / hv[j];
      h -= (gj * gj.transpose()) / (hv[j] * hv[j]);
      p.constraints[j].add_hessian(full, 1.0 / hv[j], h);
    }
    Vec gz = free.reduce(g);
    Mat hz = free.reduce(h);
    for (Eigen::Index k = 0; k < free.size(); ++k) {
      const auto i = free[k];
      const double dl = full(i) - p.lower(i);
      gz(k) += 1.0 / dl;
      hz(k, k) -= 1.0 / (dl * dl);
      if (std::isfinite(p.upper(i))) {
        const double du = p.upper(i) - full(i);
        gz(k) -= 1.0 / du;
        hz(k, k) -= 1.0 / (du * du);
      }
    }
    *grad = gz;
    if (hess) *hess = hz;
    return true;
  }
};

inline int barrier_term_count(const FractionalProblem& p, const FreeSet& free) {
  int m = static_cast<int>(p.constraints.size());
  for (Eigen::Index k = 0; k < free.size(); ++k) {
    ++m;
    if (std::isfinite(p.upper(free[k]))) ++m;
  }
  return m;
}

/// Phase-I model over (z, s): t s + sum log(h_j - s w_j) + log(1 - s) + bound logs.
struct PhaseOneModel {
  const FractionalProblem& p;
  const FreeSet& free;
  Vec& full;
  double t = 1.0;
  mutable double magnitude = 0.0;

  bool evaluate(const Vec& zs, double& val, Vec* grad, Mat* hess) const {
    const Eigen::Index nz = free.size();
    const double s = zs(nz);
    free.scatter(zs.head(nz), full);
    const Eigen::Index n = static_cast<Eigen::Index>(p.dim());
    for (Eigen::Index k = 0; k < nz; ++k) {
      const auto i = free[k];
      if (!(full(i) > p.lower(i)) || !(full(i) < p.upper(i))) return false;
    }
    if (!(s < 1.0)) return false;
    double v = t * s + std::log(1.0 - s);
    std::vector<double> hv(p.constraints.size());
    for (std::size_t j = 0; j < p.constraints.size(); ++j) {
      if (!p.constraints[j].in_domain(full)) return false;
      hv[j] = p.constraints[j].value(full) - s * p.scale(j);
      if (!(hv[j] > 0.0)) return false;
      v += std::log(hv[j]);
    }
    for (Eigen::Index k = 0; k < nz; ++k) {
      const auto i = free[k];
      v += std::log(full(i) - p.lower(i));
      if (std::isfinite(p.upper(i))) v += std::log(p.upper(i) - full(i));
    }
    if (!std::isfinite(v)) return false;
    val = v;
    magnitude = std::abs(t * s) + std::abs(v);
    if (!grad) return true;

    Vec g = Vec::Zero(nz + 1);
    Mat h = Mat::Zero(nz + 1, nz + 1);
    g(nz) = t - 1.0 / (1.0 - s);
    h(nz, nz) = -1.0 / ((1.0 - s) * (1.0 - s));
    for (std::size_t j = 0; j < p.constraints.size(); ++j) {
      Vec gfull = Vec::Zero(n);
      Mat hfull = Mat::Zero(n, n);
      p.constraints[j].add_gradient(full, 1.0, gfull);
      p.constraints[j].add_hessian(full, 1.0, hfull);
      Vec gj(nz + 1);
      gj.head(nz) = free.reduce(gfull);
      gj(nz) = -p.scale(j);
      g += gj / hv[j];
      h -= (gj * gj.transpose()) / (hv[j] * hv[j]);
      h.topLeftCorner(nz, nz) += free.reduce(hfull) / hv[j];
    }
    for (Eigen::Index k = 0; k < nz; ++k) {
      const auto i = free[k];
      const double dl = full(i) - p.lower(i);
      g(k) += 1.0 / dl;
      h(k, k) -= 1.0 / (dl * dl);
      if (std::isfinite(p.upper(i))) {
        const double du = p.upper(i) - full(i);
        g(k) -= 1.0 / du;
        h(k, k) -= 1.0 / (du * du);
      }
    }
    *grad = g;
    if (hess) *hess = h;
    return true;
  }
};

/// Moves free coordinates strictly inside their box and pins the others.
inline Vec push_into_box(const FractionalProblem& p, Vec x) {
  for (std::size_t i = 0; i < p.dim(); ++i) {
    const double lo = p.lower(i), hi = p.upper(i);
    if (!(hi > lo)) {
      x(i) = lo;
      continue;
    }
    const double width = std::isfinite(hi) ? hi - lo : kInf;
    const double margin = std::min(1e-6 * std::max(1.0, std::abs(x(i))), 0.25 * width);
    x(i) = std::clamp(x(i), lo + margin, std::isfinite(hi) ? hi - margin : kInf);
  }
  return x;
}

inline double min_scaled_slack(const FractionalProblem& p, const Vec& x) {
  double m = kInf;
  for (std::size_t j = 0; j < p.constraints.size(); ++j) {
    if (!p.constraints[j].in_domain(x)) return -kInf;
    m = std::min(m, p.constraints[j].value(x) / p.scale(j));
  }
  return m;
}

}  // namespace detail

/// True when x is strictly inside the box (free coordinates) and every h_j(x) > 0.
inline bool strictly_feasible(const FractionalProblem& p, const Vec& x) {
  for (std::size_t i = 0; i < p.dim(); ++i) {
    if (p.upper(i) > p.lower(i)) {
      if (!(x(i) > p.lower(i) && x(i) < p.upper(i))) return false;
    } else if (x(i) != p.lower(i)) {
      return false;
    }
  }
  return detail::min_scaled_slack(p, x) > 0.0;
}

/// Phase I: finds a point with every constraint strictly positive by maximising
/// the smallest scaled slack s. With `stop_when_found` the search returns as soon
/// as a centred iterate has s > 0; otherwise it maximises s to tolerance.
inline InteriorResult find_interior(const FractionalProblem& p, const Vec& start, const BarrierOptions& opt = {},
                                    bool stop_when_found = true) {
  InteriorResult res;
  res.x = detail::push_into_box(p, start);
  detail::FreeSet free(p);
  res.min_scaled_slack = detail::min_scaled_slack(p, res.x);
  if (p.constraints.empty()) {
    res.found = true;
    res.min_scaled_slack = kInf;
    return res;
  }
  if (stop_when_found && res.min_scaled_slack > 0.0) {
    res.found = true;
    return res;
  }
  if (!std::isfinite(res.min_scaled_slack)) return res;

  Vec full = res.x;
  detail::PhaseOneModel model{p, free, full, 1.0 / opt.mu0};
  Vec zs(free.size() + 1);
  zs.head(free.size()) = free.gather(res.x);
  zs(free.size()) = std::min(res.min_scaled_slack, 0.0) - 1.0;
  const int m = detail::barrier_term_count(p, free) + 1;

  for (int stage = 0; stage < 200; ++stage) {
    bool ok = false;
    res.newton_steps += detail::newton_maximize(model, zs, opt.max_newton, opt.newton_tol, ok);
    free.scatter(zs.head(free.size()), full);
    const double s = detail::min_scaled_slack(p, full);
    if (s > res.min_scaled_slack) {
      res.min_scaled_slack = s;
      res.x = full;
    }
    if (stop_when_found && s > 0.0) {
      res.found = true;
      return res;
    }
    const double bound = static_cast<double>(m) / model.t;
    if (zs(free.size()) + bound < -1e-9 && ok) break;  // optimum of s is certifiably negative
    if (bound < opt.gap_tol) break;
    model.t /= opt.shrink;
  }
  res.found = res.min_scaled_slack > 0.0;
  return res;
}

/// Maximises f(x) - mu g(x) over the constraint set, starting from a strictly
/// feasible x. `numerator_weight` = 0 turns this into power minimisation.
inline InnerResult solve_inner(double mu, const FractionalProblem& p, const Vec& start, const BarrierOptions& opt = {},
                               double numerator_weight = 1.0) {
  InnerResult res;
  res.x = start;
  if (!strictly_feasible(p, start)) {
    res.status = Status::Infeasible;
    return res;
  }
  detail::FreeSet free(p);
  Vec full = start;
  detail::BarrierModel model{p, free, full, 1.0 / opt.mu0, mu, numerator_weight};
  Vec z = free.gather(start);
  const int m = detail::barrier_term_count(p, free);
  bool ok = true;
  for (int stage = 0; stage < 400; ++stage) {
    bool centred = false;
    res.newton_steps += detail::newton_maximize(model, z, opt.max_newton, opt.newton_tol, centred);
    ok = centred;
    if (m == 0 || static_cast<double>(m) / model.t <= opt.gap_tol) break;
    model.t /= opt.shrink;
  }
  free.scatter(z, full);
  res.x = full;
  res.status = ok ? Status::Converged : Status::NotConverged;

  // KKT residual with the barrier multipliers 1/(t h_j).
  const Eigen::Index n = static_cast<Eigen::Index>(p.dim());
  Vec g = Vec::Zero(n);
  if (numerator_weight != 0.0) p.numerator.add_gradient(full, numerator_weight, g);
  if (p.denominator.linear.size()) g -= mu * p.denominator.linear;
  for (const auto& h : p.constraints) {
    Vec gj = Vec::Zero(n);
    h.add_gradient(full, 1.0, gj);
    g += gj / (model.t * h.value(full));
  }
  Vec gz = free.reduce(g);
  for (Eigen::Index k = 0; k < free.size(); ++k) {
    const auto i = free[k];
    gz(k) += 1.0 / (model.t * (full(i) - p.lower(i)));
    if (std::isfinite(p.upper(i))) gz(k) -= 1.0 / (model.t * (p.upper(i) - full(i)));
  }
  res.kkt_residual = (gz.size() ? gz.cwiseAbs().maxCoeff() : 0.0) + static_cast<double>(m) / model.t;
  return res;
}

struct DinkelbachOptions {
  double tol = 1e-6;      // stop once F(mu) <= tol
  int max_iters = 50;
  bool warm_start = true; // mu^(0) = f(x0)/g(x0) instead of 0
  BarrierOptions barrier;
};

/// Dinkelbach iteration: mu^(n+1) = f(x^(n))/g(x^(n)) until F(mu^(n)) <= tol.
/// When the optimal ratio is zero the least-power point is returned.
inline DinkelbachResult dinkelbach(const FractionalProblem& p, const Vec& start, const DinkelbachOptions& opt = {}) {
  DinkelbachResult res;
  res.x = start;
  Vec x = start;
  if (!strictly_feasible(p, x)) {
    auto interior = find_interior(p, x, opt.barrier);
    res.newton_steps += interior.newton_steps;
    if (!interior.found) {
      res.status = Status::Infeasible;
      res.mu = p.feasible(start) ? p.ratio(start) : 0.0;
      return res;
    }
    x = interior.x;
  }
  double mu = opt.warm_start ? std::max(0.0, p.ratio(x)) : 0.0;
  res.status = Status::NotConverged;
  for (int n = 0; n < opt.max_iters; ++n) {
    auto inner = solve_inner(mu, p, x, opt.barrier);
    res.newton_steps += inner.newton_steps;
    res.kkt_residual = inner.kkt_residual;
    x = inner.x;
    const double f = p.numerator.value(x);
    const double big_f = f - mu * p.denominator.value(x);
    res.mu_history.push_back(mu);
    res.f_history.push_back(big_f);
    ++res.iterations;
    const double next = f / p.denominator.value(x);
    if (big_f <= opt.tol) {
      res.status = inner.status == Status::Converged ? Status::Converged : Status::NotConverged;
      break;
    }
    mu = next;
  }
  if (p.numerator.value(x) <= 1e-12) {
    // Zero-rate optimum: every feasible point ties, take the least-power one.
    auto least = solve_inner(1.0, p, x, opt.barrier, 0.0);
    res.newton_steps += least.newton_steps;
    if (least.status != Status::Infeasible) x = least.x;
  }
  res.x = x;
  res.mu = p.ratio(x);
  return res;
}

}  // namespace eerelay::fractional
