#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "mh/integrator.hpp"
#include "mh/plant.hpp"

namespace mh {

/// Inputs and disturbances held from `t` until the next segment.
struct Segment {
  double t = 0;
  Vec3 u = Vec3::Zero();
  Vec2 d = Vec2::Zero();
};
using InputSchedule = std::vector<Segment>;

/// Value of a piecewise-constant schedule at time t.
const Segment& segment_at(const InputSchedule& s, double t);

/// A dynamic model in the plant's coordinates: dx/dt, outputs, and a regime
/// signature used to restart the integrator.
struct Model {
  std::function<Vec6(const Vec6&, const Vec3&, const Vec2&)> f;
  std::function<Vec2(const Vec6&, const Vec3&, const Vec2&)> g;
  std::function<long(const Vec6&)> branch;
};

Model plant_model(const PlantConfig& cfg);

struct Trajectory {
  std::vector<double> t;
  std::vector<Vec6> x;
  std::vector<Vec3> u;
  std::vector<Vec2> d;
  std::vector<Vec2> Q;
  std::vector<Vec2> r;

  std::size_t size() const { return t.size(); }
  void push(double time, const Vec6& state, const Vec3& input, const Vec2& dist,
            const Vec2& heat, const Vec2& rate);
};

OdeOptions default_ode_options();

/// Holds inputs for one interval at a time; integrator state carries over.
class Stepper {
 public:
  Stepper(Model m, OdeOptions opt = default_ode_options());
  void set_inputs(const Vec3& u, const Vec2& d);
  /// Integrates x from t0 to t1 with the held inputs.
  void advance(Vec6& x, double t0, double t1);
  void restart() { ode_.restart(); }
  const OdeStats& stats() const { return ode_.stats(); }

 private:
  Model m_;
  Vec3 u_ = Vec3::Zero();
  Vec2 d_ = Vec2::Zero();
  Sdirk4 ode_;
};

/// Integrates a model along a schedule. Samples land on a fixed grid of
/// spacing `dt` plus every breakpoint; steps never straddle a breakpoint.
Trajectory simulate(const Model& m, const Vec6& x0, const InputSchedule& sched, double t_end,
                    double dt = 1.0, const OdeOptions& opt = default_ode_options());

extern const char* const kCsvHeader;

void write_csv(std::ostream& os, const Trajectory& tr);
void write_csv(const std::string& path, const Trajectory& tr);
Trajectory read_csv(const std::string& path);

}  // namespace mh
