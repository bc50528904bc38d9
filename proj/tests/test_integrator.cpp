#include <cmath>

#include "doctest.h"
#include "mh/integrator.hpp"

using namespace mh;
using Eigen::VectorXd;

namespace {

OdeOptions opts(double rtol, double atol, int n = 1) {
  OdeOptions o;
  o.rtol = rtol;
  o.atol = VectorXd::Constant(n, atol);
  return o;
}

}  // namespace

TEST_CASE("tableau is consistent and stiffly accurate") {
  double sb = 0, sbh = 0;
  for (int j = 0; j < 5; ++j) {
    double row = 0;
    for (int k = 0; k < 5; ++k) row += Sdirk4::kA[j][k];
    CHECK(row == doctest::Approx(Sdirk4::kC[j]).epsilon(1e-15));
    CHECK(Sdirk4::kA[j][j] == Sdirk4::kGamma);
    sb += Sdirk4::kA[4][j];
    sbh += Sdirk4::kBhat[j];
  }
  CHECK(sb == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(sbh == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("exponential decay x' = -x reaches e^-1 at t = 1") {
  Sdirk4 ode([](const VectorXd& x) { VectorXd d = -x; return d; }, opts(1e-8, 1e-12));
  VectorXd x = VectorXd::Ones(1);
  ode.advance(x, 0.0, 1.0);
  CHECK(std::abs(x[0] - std::exp(-1.0)) < 1e-6);
}

TEST_CASE("global error shrinks with the tolerance") {
  double prev = 1;
  for (double tol : {1e-4, 1e-6, 1e-8, 1e-10}) {
    Sdirk4 ode([](const VectorXd& x) { VectorXd d(2); d << x[1], -x[0]; return d; }, opts(tol, tol * 1e-2, 2));
    VectorXd x(2);
    x << 1.0, 0.0;
    ode.advance(x, 0.0, 5.0);
    const double err = std::hypot(x[0] - std::cos(5.0), x[1] + std::sin(5.0));
    CHECK(err < prev);
    CHECK(err < 100 * tol);
    prev = err;
  }
}

TEST_CASE("stiff forcing x' = -1e6 (x - cos t) follows the quasi-steady solution") {
  const double lam = 1e6;
  double now = 0;
  // Autonomous form: state [x, t].
  Sdirk4 ode([&](const VectorXd& s) { VectorXd d(2); d << -lam * (s[0] - std::cos(s[1])), 1.0; return d; },
             [] { OdeOptions o; o.rtol = 1e-6; o.atol = VectorXd::Constant(2, 1e-8); return o; }());
  VectorXd s(2);
  s << 1.0, 0.0;
  for (int k = 1; k <= 10; ++k) {
    ode.advance(s, now, now + 1.0);
    now += 1.0;
    const double xp = (lam * lam * std::cos(now) + lam * std::sin(now)) / (lam * lam + 1);
    CHECK(std::abs(s[0] - xp) < 1e-4);
  }
  CHECK(ode.stats().accepted < 10000);
  MESSAGE("stiff test: " << ode.stats().accepted << " steps, " << ode.stats().rejected << " rejected");
}

TEST_CASE("blow-up is reported with the failure time") {
  Sdirk4 ode([](const VectorXd& x) { VectorXd d = x.cwiseProduct(x); return d; }, opts(1e-8, 1e-10));
  VectorXd x = VectorXd::Ones(1);
  try {
    ode.advance(x, 0.0, 2.0);
    FAIL("expected IntegrationError");
  } catch (const IntegrationError& e) {
    CHECK(e.time > 0.9);
    CHECK(e.time < 1.01);
  }
}

TEST_CASE("branch changes restart the integrator") {
  int calls = 0;
  Sdirk4 ode([](const VectorXd& x) { VectorXd d = VectorXd::Constant(1, x[0] < 1 ? 1.0 : 2.0 - x[0]); return d; },
             opts(1e-8, 1e-10), [&](const VectorXd& x) { ++calls; return static_cast<long>(x[0] < 1); });
  VectorXd x = VectorXd::Zero(1);
  ode.advance(x, 0.0, 2.0);
  // Reaches 1 at t = 1, then relaxes toward 2.
  CHECK(x[0] == doctest::Approx(2.0 - std::exp(-1.0)).epsilon(1e-6));
  CHECK(ode.stats().restarts >= 1);
  CHECK(calls > 0);
}

TEST_CASE("chattering across a branch boundary is an error, not a hang") {
  OdeOptions o = opts(1e-8, 1e-10);
  o.max_branch_switches = 50;
  Sdirk4 ode([](const VectorXd& x) { VectorXd d = VectorXd::Constant(1, x[0] > 0 ? -1.0 : 1.0); return d; }, o,
             [](const VectorXd& x) { return static_cast<long>(x[0] > 0); });
  VectorXd x = VectorXd::Constant(1, 0.5);
  CHECK_THROWS_AS(ode.advance(x, 0.0, 10.0), IntegrationError);
}

TEST_CASE("identical runs are bit-identical") {
  auto run = [] {
    Sdirk4 ode([](const VectorXd& x) { VectorXd d(2); d << -50 * (x[0] - x[1] * x[1]), -x[1]; return d; },
               opts(1e-9, 1e-12, 2));
    VectorXd x(2);
    x << 2.0, 1.0;
    ode.advance(x, 0.0, 3.0);
    return x;
  };
  const VectorXd a = run(), b = run();
  CHECK(a[0] == b[0]);
  CHECK(a[1] == b[1]);
}
