#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <string>

namespace mh {

class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double t, Eigen::VectorXd x)
      : std::runtime_error(what), time(t), state(std::move(x)) {}
  double time;
  Eigen::VectorXd state;
};

struct OdeOptions {
  double rtol = 1e-8;
  Eigen::VectorXd atol;  // per component; empty means 1e-10 for all
  double h_init = 1e-3;
  double h_min = 1e-12;
  double h_max = 1e300;
  long max_steps = 10'000'000;
  long max_branch_switches = 1000;  // per advance() call
  double branch_locate = 1e-6;       // a crossing step is halved until shorter than this
};

struct OdeStats {
  long accepted = 0;
  long rejected = 0;
  long rhs_evals = 0;
  long jacobians = 0;
  long restarts = 0;
};

/// L-stable, stiffly accurate five-stage SDIRK of order 4 with an embedded
/// order-3 solution for step control. Newton iterations on a forward
/// difference Jacobian.
///
/// The optional `branch` function reports a discrete regime signature of the
/// state; when it changes across an accepted step the integrator restarts
/// with a small step.
class Sdirk4 {
 public:
  using Rhs = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
  using Branch = std::function<long(const Eigen::VectorXd&)>;

  // Butcher tableau.
  static constexpr double kGamma = 0.25;
  static constexpr double kA[5][5] = {
      {1.0 / 4, 0, 0, 0, 0},
      {1.0 / 2, 1.0 / 4, 0, 0, 0},
      {17.0 / 50, -1.0 / 25, 1.0 / 4, 0, 0},
      {371.0 / 1360, -137.0 / 2720, 15.0 / 544, 1.0 / 4, 0},
      {25.0 / 24, -49.0 / 48, 125.0 / 16, -85.0 / 12, 1.0 / 4}};
  static constexpr double kC[5] = {1.0 / 4, 3.0 / 4, 11.0 / 20, 1.0 / 2, 1.0};
  static constexpr double kBhat[5] = {59.0 / 48, -17.0 / 96, 225.0 / 32, -85.0 / 12, 0.0};

  Sdirk4(Rhs f, OdeOptions opt, Branch branch = nullptr);

  /// Advances x from t0 to t1 (autonomous rhs). The step size carries over
  /// between calls so a caller can march along an output grid.
  void advance(Eigen::VectorXd& x, double t0, double t1);

  /// Forces the next step to start small with a fresh Jacobian.
  void restart();

  const OdeStats& stats() const { return stats_; }

 private:
  Eigen::VectorXd eval(const Eigen::VectorXd& x);
  void jacobian(const Eigen::VectorXd& x, const Eigen::VectorXd& fx);
  bool attempt(const Eigen::VectorXd& x, double h, Eigen::VectorXd& x_new, double& err);
  double scale(int i, double a, double b) const;

  Rhs f_;
  OdeOptions opt_;
  Branch branch_;
  Eigen::MatrixXd J_;
  Eigen::VectorXd fx_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  double lu_h_ = -1;
  double h_ = -1;
  OdeStats stats_;
};

}  // namespace mh
