#include "mh/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mh/hydride.hpp"

namespace mh {

Sdirk4::Sdirk4(Rhs f, OdeOptions opt, Branch branch)
    : f_(std::move(f)), opt_(std::move(opt)), branch_(std::move(branch)) {}

void Sdirk4::restart() {
  h_ = -1;
  ++stats_.restarts;
}

Eigen::VectorXd Sdirk4::eval(const Eigen::VectorXd& x) {
  ++stats_.rhs_evals;
  return f_(x);
}

double Sdirk4::scale(int i, double a, double b) const {
  const double atol = opt_.atol.size() ? opt_.atol[i] : 1e-10;
  return atol + opt_.rtol * std::max(std::abs(a), std::abs(b));
}

void Sdirk4::jacobian(const Eigen::VectorXd& x, const Eigen::VectorXd& fx) {
  const Eigen::Index n = x.size();
  J_.resize(n, n);
  Eigen::VectorXd xp = x;
  const double root_eps = std::sqrt(std::numeric_limits<double>::epsilon());
  for (Eigen::Index j = 0; j < n; ++j) {
    const double dj = root_eps * std::max(std::abs(x[j]), 1e-6);
    xp[j] = x[j] + dj;
    J_.col(j) = (eval(xp) - fx) / dj;
    xp[j] = x[j];
  }
  ++stats_.jacobians;
}

bool Sdirk4::attempt(const Eigen::VectorXd& x, double h, Eigen::VectorXd& x_new, double& err) {
  const Eigen::Index n = x.size();
  const double hg = h * kGamma;
  if (lu_h_ != h) {
    lu_.compute(Eigen::MatrixXd::Identity(n, n) - hg * J_);
    lu_h_ = h;
  }
  Eigen::MatrixXd K(n, 5);
  Eigen::VectorXd g(n), base(n);
  try {
    for (int i = 0; i < 5; ++i) {
      base = x;
      for (int j = 0; j < i; ++j) base += h * kA[i][j] * K.col(j);
      g = base + hg * (i == 0 ? fx_ : Eigen::VectorXd(K.col(i - 1)));
      double prev = std::numeric_limits<double>::infinity();
      bool converged = false;
      for (int it = 0; it < 12; ++it) {
        const Eigen::VectorXd res = g - base - hg * eval(g);
        const Eigen::VectorXd dg = lu_.solve(-res);
        g += dg;
        double nrm = 0;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double s = dg[k] / scale(static_cast<int>(k), x[k], g[k]);
          nrm += s * s;
        }
        nrm = std::sqrt(nrm / n);
        if (!std::isfinite(nrm)) return false;
        if (nrm < 1e-3) {
          converged = true;
          break;
        }
        if (it >= 2 && nrm > 0.9 * prev) return false;
        prev = nrm;
      }
      if (!converged) return false;
      K.col(i) = (g - base) / hg;
    }
  } catch (const DomainError&) {
    return false;
  }
  x_new = g;
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < 5; ++i) e += h * (kA[4][i] - kBhat[i]) * K.col(i);
  e = lu_.solve(e);
  double sum = 0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double s = e[k] / scale(static_cast<int>(k), x[k], x_new[k]);
    sum += s * s;
  }
  err = std::sqrt(sum / n);
  return std::isfinite(err) && x_new.allFinite();
}

void Sdirk4::advance(Eigen::VectorXd& x, double t0, double t1) {
  if (h_ <= 0) h_ = opt_.h_init;
  double t = t0;
  long sig = branch_ ? branch_(x) : 0;
  const double tiny = 1e-12 * std::max(1.0, std::abs(t1));
  bool fresh = false;
  long switches = 0;
  while (t1 - t > tiny) {
    if (stats_.accepted + stats_.rejected >= opt_.max_steps)
      throw IntegrationError("step limit reached", t, x);
    double h = std::min(h_, opt_.h_max);
    bool truncated = false;
    if (t + h >= t1 - tiny) {
      h = t1 - t;
      truncated = true;
    } else if (t + 1.5 * h > t1) {
      h = 0.5 * (t1 - t);  // avoid a sliver step at the end
    }
    if (!fresh) {
      try {
        fx_ = eval(x);
        jacobian(x, fx_);
      } catch (const DomainError& e) {
        throw IntegrationError(e.what(), t, x);
      }
      lu_h_ = -1;
      fresh = true;
    }
    Eigen::VectorXd x_new;
    double err = 0;
    if (!attempt(x, h, x_new, err)) {
      ++stats_.rejected;
      h_ = 0.25 * h;
      if (h_ < opt_.h_min) throw IntegrationError("step size underflow (Newton failure)", t, x);
      continue;
    }
    const double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.25);
    if (err <= 1.0 && branch_ && h > opt_.branch_locate && branch_(x_new) != sig) {
      // Pin the crossing down before accepting; the error estimate cannot see a kink.
      ++stats_.rejected;
      h_ = 0.5 * h;
    } else if (err <= 1.0) {
      ++stats_.accepted;
      t = truncated ? t1 : t + h;
      x = x_new;
      fresh = false;
      const double next = h * std::clamp(fac, 0.2, 4.0);
      h_ = truncated ? std::max(h_, next) : next;
      if (branch_) {
        const long s = branch_(x);
        if (s != sig) {
          if (++switches > opt_.max_branch_switches)
            throw IntegrationError("chattering across a reaction-branch boundary", t, x);
          sig = s;
          restart();
          h_ = opt_.h_init;
        }
      }
    } else {
      ++stats_.rejected;
      h_ = h * std::clamp(fac, 0.1, 0.9);
    }
    if (h_ < opt_.h_min) throw IntegrationError("step size underflow", t, x);
  }
}

}  // namespace mh
