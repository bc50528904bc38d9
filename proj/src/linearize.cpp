#include "mh/linearize.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <stdexcept>

#include "json.hpp"

namespace mh {

namespace {

const char* kXNames[6] = {"T_hyd_A", "T_hyd_B", "P_H_A", "P_H_B", "w_A", "w_B"};
const char* kUNames[3] = {"mdot_wg_A", "mdot_wg_B", "dP_comp"};
const char* kDNames[2] = {"T_wg_in_A", "T_wg_in_B"};

template <class Fn>
void diff_column(Fn&& eval, double h, const char* name, Eigen::Ref<Eigen::VectorXd> fcol,
                 Eigen::Ref<Eigen::VectorXd> gcol) {
  auto [fp, gp] = eval(+h);
  auto [fm, gm] = eval(-h);
  fcol = (fp - fm) / (2 * h);
  gcol = (gp - gm) / (2 * h);
  if (!fcol.allFinite() || !gcol.allFinite())
    throw std::runtime_error(std::string("linearize: non-finite derivative in column ") + name);
}

}  // namespace

Vec6 LinearModel::dx(const Vec6& x, const Vec3& u, const Vec2& d) const {
  return A * (x - x0) + B * (u - u0) + Bd * (d - d0) + f0;
}

Vec2 LinearModel::y(const Vec6& x, const Vec3& u, const Vec2& d) const {
  return C * (x - x0) + D * (u - u0) + Dd * (d - d0) + g0;
}

LinearModel linearize(const Model& m, const Vec6& x0, const Vec3& u0, const Vec2& d0,
                      const StepPolicy& pol) {
  LinearModel lm;
  lm.x0 = x0;
  lm.u0 = u0;
  lm.d0 = d0;
  lm.f0 = m.f(x0, u0, d0);
  lm.g0 = m.g(x0, u0, d0);
  using Pair = std::pair<Eigen::VectorXd, Eigen::VectorXd>;
  for (int j = 0; j < 6; ++j) {
    const double h = pol.scale * std::max(pol.x_floor[j], pol.rel * std::abs(x0[j]));
    Eigen::VectorXd fc(6), gc(2);
    diff_column([&](double s) {
      Vec6 x = x0;
      x[j] += s;
      return Pair(m.f(x, u0, d0), m.g(x, u0, d0));
    }, h, kXNames[j], fc, gc);
    lm.A.col(j) = fc;
    lm.C.col(j) = gc;
  }
  for (int j = 0; j < 3; ++j) {
    const double h = pol.scale * std::max(pol.u_floor[j], pol.rel * std::abs(u0[j]));
    Eigen::VectorXd fc(6), gc(2);
    diff_column([&](double s) {
      Vec3 u = u0;
      u[j] += s;
      return Pair(m.f(x0, u, d0), m.g(x0, u, d0));
    }, h, kUNames[j], fc, gc);
    lm.B.col(j) = fc;
    lm.D.col(j) = gc;
  }
  for (int j = 0; j < 2; ++j) {
    const double h = pol.scale * std::max(pol.d_floor[j], pol.rel * std::abs(d0[j]));
    Eigen::VectorXd fc(6), gc(2);
    diff_column([&](double s) {
      Vec2 d = d0;
      d[j] += s;
      return Pair(m.f(x0, u0, d), m.g(x0, u0, d));
    }, h, kDNames[j], fc, gc);
    lm.Bd.col(j) = fc;
    lm.Dd.col(j) = gc;
  }
  return lm;
}

LinearModel linearize(const PlantConfig& cfg, const Vec6& x0, const Vec3& u0, const Vec2& d0,
                      const StepPolicy& pol) {
  LinearModel lm = linearize(plant_model(cfg), x0, u0, d0, pol);
  const double drive = driving_pressure(x0, u0[2], cfg.mode);
  if (std::abs(drive) < cfg.params.line.regularization_pressure)
    lm.warnings.push_back("operating point inside the line-flow regularization band");
  const auto b0 = reaction_branches(x0, cfg);
  for (int j = 0; j < 6; ++j) {
    const double h = pol.scale * std::max(pol.x_floor[j], pol.rel * std::abs(x0[j]));
    Vec6 lo = x0, hi = x0;
    lo[j] -= h;
    hi[j] += h;
    if (reaction_branches(lo, cfg) != b0 || reaction_branches(hi, cfg) != b0)
      lm.warnings.push_back(std::string("reaction branch boundary within the step of ") + kXNames[j]);
  }
  return lm;
}

EvalResult eval_linear(const LinearModel& lm, const Vec6& x, const Vec3& u, const Vec2& d) {
  return {lm.dx(x, u, d), lm.y(x, u, d)};
}

Model linear_model(const LinearModel& lm) {
  Model m;
  m.f = [lm](const Vec6& x, const Vec3& u, const Vec2& d) { return lm.dx(x, u, d); };
  m.g = [lm](const Vec6& x, const Vec3& u, const Vec2& d) { return lm.y(x, u, d); };
  return m;
}

Eigen::MatrixXd expm(const Eigen::MatrixXd& M) {
  static const double b[14] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                               1187353796428800.0,  129060195264000.0,   10559470521600.0,
                               670442572800.0,      33522128640.0,       1323241920.0,
                               40840800.0,          960960.0,            16380.0,
                               182.0,               1.0};
  const double theta13 = 5.371920351148152;
  const Eigen::Index n = M.rows();
  const double norm = M.cwiseAbs().colwise().sum().maxCoeff();
  if (!std::isfinite(norm)) throw std::runtime_error("expm: non-finite input");
  int s = 0;
  if (norm > theta13) s = static_cast<int>(std::ceil(std::log2(norm / theta13)));
  const Eigen::MatrixXd A = M / std::ldexp(1.0, s);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd A2 = A * A, A4 = A2 * A2, A6 = A4 * A2;
  const Eigen::MatrixXd U =
      A * (A6 * (b[13] * A6 + b[11] * A4 + b[9] * A2) + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * I);
  const Eigen::MatrixXd V =
      A6 * (b[12] * A6 + b[10] * A4 + b[8] * A2) + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * I;
  Eigen::MatrixXd R = (V - U).partialPivLu().solve(V + U);
  for (int k = 0; k < s; ++k) R = R * R;
  if (!R.allFinite()) throw std::runtime_error("expm: non-finite result");
  return R;
}

DiscreteModel discretize(const LinearModel& lm, double Ts) {
  if (!(Ts > 0)) throw std::invalid_argument("discretize: Ts must be positive");
  // Columns: state (6), inputs (3), disturbances (2), unit residual (1).
  const int n = 12;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  M.block(0, 0, 6, 6) = lm.A;
  M.block(0, 6, 6, 3) = lm.B;
  M.block(0, 9, 6, 2) = lm.Bd;
  M.block(0, 11, 6, 1) = lm.f0;
  // Diagonal similarity with typical magnitudes keeps the kernel well scaled.
  Eigen::VectorXd s(n);
  for (int i = 0; i < 6; ++i) s[i] = std::max(std::abs(lm.x0[i]), 1e-6);
  for (int i = 0; i < 3; ++i) s[6 + i] = std::max(std::abs(lm.u0[i]), i < 2 ? 1e-2 : 1e3);
  for (int i = 0; i < 2; ++i) s[9 + i] = std::max(std::abs(lm.d0[i]), 1.0);
  s[11] = 1.0;
  const Eigen::MatrixXd Ms = s.cwiseInverse().asDiagonal() * (M * Ts) * s.asDiagonal();
  const Eigen::MatrixXd E = s.asDiagonal() * expm(Ms) * s.cwiseInverse().asDiagonal();
  DiscreteModel dm;
  dm.Ad = E.block(0, 0, 6, 6);
  dm.Bu = E.block(0, 6, 6, 3);
  dm.Bdist = E.block(0, 9, 6, 2);
  dm.drift = E.block(0, 11, 6, 1);
  dm.C = lm.C;
  dm.D = lm.D;
  dm.Dd = lm.Dd;
  dm.Ts = Ts;
  dm.x0 = lm.x0;
  dm.u0 = lm.u0;
  dm.d0 = lm.d0;
  dm.f0 = lm.f0;
  dm.g0 = lm.g0;
  return dm;
}

void write_linear_model(std::ostream& os, const LinearModel& lm) {
  using nlohmann::json;
  auto mat = [](const auto& M) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
      rows.push_back(row);
    }
    return rows;
  };
  auto vec = [](const auto& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
  };
  json j;
  j["state_order"] = {"T_hyd_A", "T_hyd_B", "P_H_A", "P_H_B", "w_A", "w_B"};
  j["input_order"] = {"mdot_wg_A", "mdot_wg_B", "dP_comp"};
  j["disturbance_order"] = {"T_wg_in_A", "T_wg_in_B"};
  j["output_order"] = {"Q_A", "Q_B"};
  j["A"] = mat(lm.A);
  j["B"] = mat(lm.B);
  j["B_d"] = mat(lm.Bd);
  j["C"] = mat(lm.C);
  j["D"] = mat(lm.D);
  j["D_d"] = mat(lm.Dd);
  j["x0"] = vec(lm.x0);
  j["u0"] = vec(lm.u0);
  j["d0"] = vec(lm.d0);
  j["f0"] = vec(lm.f0);
  j["g0"] = vec(lm.g0);
  j["warnings"] = lm.warnings;
  os << std::setprecision(17) << j.dump(2) << '\n';
}

void write_linear_model(const std::string& path, const LinearModel& lm) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  write_linear_model(os, lm);
}

}  // namespace mh
