#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace mh {

/// minimize 0.5 z'Hz + q'z  subject to  G z <= h.
struct QPProblem {
  Eigen::MatrixXd H;
  Eigen::VectorXd q;
  Eigen::MatrixXd G;
  Eigen::VectorXd h;
};

struct QPResult {
  Eigen::VectorXd z;
  Eigen::VectorXd lambda;  // one multiplier per inequality row
  int iterations = 0;
  double stationarity = 0;  // scaled ||Hz + q + G'lambda||_inf
  double infeasibility = 0; // max(Gz - h, 0)
};

class QPError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Primal active-set method from a feasible starting point z0. H must be
/// positive definite; variables are rescaled internally to unit Hessian
/// diagonal.
QPResult solve_qp(const QPProblem& qp, const Eigen::VectorXd& z0, double tol = 1e-8,
                  int max_iter = 0);

}  // namespace mh
