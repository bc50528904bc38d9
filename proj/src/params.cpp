#include "mh/params.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"

#ifndef MH_DATA_DIR
#define MH_DATA_DIR "data"
#endif

namespace mh {

using nlohmann::json;

namespace {

double leaf(const json& parent, const std::string& key, const std::string& path) {
  const std::string where = path + "/" + key;
  if (!parent.contains(key)) throw ConfigError(where, "missing");
  const json& node = parent.at(key);
  if (!node.is_object() || !node.contains("value")) throw ConfigError(where, "expected {value, source}");
  if (!node.contains("source") || !node.at("source").is_string() || node.at("source").get<std::string>().empty())
    throw ConfigError(where + "/source", "missing source string");
  if (!node.at("value").is_number()) throw ConfigError(where + "/value", "not a number");
  return node.at("value").get<double>();
}

const json& section(const json& parent, const std::string& key, const std::string& path) {
  if (!parent.contains(key) || !parent.at(key).is_object()) throw ConfigError(path + "/" + key, "missing section");
  return parent.at(key);
}

HydrideMaterial parse_material(const json& j, const std::string& p) {
  HydrideMaterial m;
  m.name = j.value("name", p);
  m.density = leaf(j, "density", p);
  m.specific_heat = leaf(j, "specific_heat", p);
  m.dH_abs = leaf(j, "dH_abs", p);
  m.dH_des = leaf(j, "dH_des", p);
  m.w_max = leaf(j, "w_max", p);
  m.C_A = leaf(j, "C_A", p);
  m.E_A = leaf(j, "E_A", p);
  m.dH0_abs = leaf(j, "dH0_abs", p);
  m.dH0_des = leaf(j, "dH0_des", p);
  m.dS0_abs = leaf(j, "dS0_abs", p);
  m.dS0_des = leaf(j, "dS0_des", p);
  m.mu_alpha0 = leaf(j, "mu_alpha0", p);
  m.mu_beta0 = leaf(j, "mu_beta0", p);
  m.w_alpha0 = leaf(j, "w_alpha0", p);
  m.w_beta0 = leaf(j, "w_beta0", p);
  m.T_c = leaf(j, "T_c", p);
  m.A_phase = leaf(j, "A_phase", p);
  m.porosity = leaf(j, "porosity", p);
  return m;
}

ReactorGeometry parse_geometry(const json& j, const std::string& p) {
  ReactorGeometry g;
  g.tube_diameter = leaf(j, "tube_diameter", p);
  g.shell_diameter = leaf(j, "shell_diameter", p);
  const double n = leaf(j, "n_tubes", p);
  if (n != static_cast<int>(n) || n <= 0) throw ConfigError(p + "/n_tubes", "must be a positive integer");
  g.n_tubes = static_cast<int>(n);
  g.length = leaf(j, "length", p);
  return g;
}

}  // namespace

PlantParams parse_params(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(origin, e.what());
  }
  PlantParams pp;
  const json& mats = section(j, "materials", "");
  const json& geos = section(j, "geometry", "");
  const char* names[2] = {"A", "B"};
  for (int r = 0; r < 2; ++r) {
    pp.material[r] = parse_material(section(mats, names[r], "/materials"), std::string("/materials/") + names[r]);
    pp.geometry[r] = parse_geometry(section(geos, names[r], "/geometry"), std::string("/geometry/") + names[r]);
  }
  const json& fl = section(j, "fluid", "");
  pp.fluid.specific_heat = leaf(fl, "specific_heat", "/fluid");
  pp.fluid.thermal_conductivity = leaf(fl, "thermal_conductivity", "/fluid");
  pp.fluid.viscosity = leaf(fl, "viscosity", "/fluid");
  pp.fluid.prandtl = pp.fluid.specific_heat * pp.fluid.viscosity / pp.fluid.thermal_conductivity;
  const json& gas = section(j, "hydrogen", "");
  pp.gas.R_H = leaf(gas, "gas_constant", "/hydrogen");
  pp.gas.cp_H = leaf(gas, "specific_heat", "/hydrogen");
  const json& line = section(j, "line", "");
  const double dia = leaf(line, "diameter", "/line");
  pp.line.cross_section = kPi / 4.0 * dia * dia;
  pp.line.loss_coefficient = leaf(line, "loss_coefficient", "/line");
  pp.line.regularization_pressure = leaf(line, "regularization_pressure", "/line");
  for (int r = 0; r < 2; ++r) pp.geometry[r].derive(pp.material[r]);
  try {
    pp.validate();
  } catch (const DomainError& e) {
    throw ConfigError(origin, e.what());
  }
  return pp;
}

PlantParams load_params(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError(path, "cannot open parameter file");
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_params(ss.str(), path);
}

std::string data_dir() {
  if (const char* env = std::getenv("MH_DATA_DIR")) return env;
  return MH_DATA_DIR;
}

std::string default_params_path() { return data_dir() + "/parameters.json"; }

}  // namespace mh
