#pragma once

// Serialization: run configuration, field dumps, manifests and the fixed
// CSV schemas.  CSV floats are written with 17 significant digits so files
// round-trip bit-exactly; JSON uses the library's shortest-round-trip
// encoding, which is equally lossless.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "vcross/errors.hpp"
#include "vcross/lattice.hpp"
#include "vcross/stationary.hpp"

namespace vcross {

using nlohmann::json;

inline std::string to_string(Model m) {
  return m == Model::scalar ? "scalar" : "vector";
}
inline std::string to_string(Charges c) { return c == Charges::pp ? "++" : "+-"; }

inline Model model_from_string(const std::string& s) {
  if (s == "scalar") return Model::scalar;
  if (s == "vector") return Model::vector;
  throw ConfigError("unknown model '" + s + "'");
}
inline Charges charges_from_string(const std::string& s) {
  if (s == "++") return Charges::pp;
  if (s == "+-") return Charges::pm;
  throw ConfigError("unknown charge pair '" + s + "'");
}

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct RunConfig {
  Model model = Model::scalar;
  Charges charges = Charges::pp;
  double beta = 0.0;
  double omega = 1.0;
  double delta = 0.0;
  int grid_n = 10;
  double eps_start = 0.0;
  double eps_stop = 0.1;
  double eps_step = 0.01;
  std::string out_dir = "out";
  bool emit_csv = true;
  bool emit_json = true;
  bool emit_svg = false;
  int seed_order = 1;
  double newton_tol = 1e-10;
  int newton_max_iters = 50;
  double hh_tol = 1e-6;
  double pairing_radius = 0.05;

  VortexSpec spec() const {
    VortexSpec s;
    s.model = model;
    s.charges = charges;
    s.beta = model == Model::scalar ? 0.0 : beta;
    s.omega = model == Model::scalar ? 1.0 : omega;
    s.delta = delta;
    s.grid.half_width = grid_n;
    return s;
  }
  NewtonOptions newton() const {
    NewtonOptions o;
    o.tol = newton_tol;
    o.max_iters = newton_max_iters;
    return o;
  }
  void validate() const {
    spec().validate();
    if (eps_step <= 0) throw ConfigError("eps_step must be positive");
    if (eps_stop < eps_start) throw ConfigError("eps grid must be increasing");
    if (eps_start < 0) throw ConfigError("eps_start must be non-negative");
    if (out_dir.empty()) throw ConfigError("output directory not set");
  }
};

inline void to_json(json& j, const RunConfig& c) {
  j = json{{"model", to_string(c.model)},
           {"charges", to_string(c.charges)},
           {"beta", c.beta},
           {"omega", c.omega},
           {"delta", c.delta},
           {"grid_n", c.grid_n},
           {"eps_start", c.eps_start},
           {"eps_stop", c.eps_stop},
           {"eps_step", c.eps_step},
           {"out_dir", c.out_dir},
           {"emit", json{{"csv", c.emit_csv}, {"json", c.emit_json}, {"svg", c.emit_svg}}},
           {"seed_order", c.seed_order},
           {"newton_tol", c.newton_tol},
           {"newton_max_iters", c.newton_max_iters},
           {"hh_tol", c.hh_tol},
           {"pairing_radius", c.pairing_radius}};
}

inline void from_json(const json& j, RunConfig& c) {
  c = RunConfig{};
  if (j.contains("model")) c.model = model_from_string(j.at("model"));
  if (j.contains("charges")) c.charges = charges_from_string(j.at("charges"));
  for (auto [key, dst] : std::initializer_list<std::pair<const char*, double*>>{
           {"beta", &c.beta},
           {"omega", &c.omega},
           {"delta", &c.delta},
           {"eps_start", &c.eps_start},
           {"eps_stop", &c.eps_stop},
           {"eps_step", &c.eps_step},
           {"newton_tol", &c.newton_tol},
           {"hh_tol", &c.hh_tol},
           {"pairing_radius", &c.pairing_radius}})
    if (j.contains(key)) *dst = j.at(key).get<double>();
  if (j.contains("grid_n")) c.grid_n = j.at("grid_n").get<int>();
  if (j.contains("seed_order")) c.seed_order = j.at("seed_order").get<int>();
  if (j.contains("newton_max_iters"))
    c.newton_max_iters = j.at("newton_max_iters").get<int>();
  if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
  if (j.contains("emit")) {
    const auto& e = j.at("emit");
    if (e.contains("csv")) c.emit_csv = e.at("csv").get<bool>();
    if (e.contains("json")) c.emit_json = e.at("json").get<bool>();
    if (e.contains("svg")) c.emit_svg = e.at("svg").get<bool>();
  }
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json j;
  in >> j;
  return j.get<RunConfig>();
}

// Field dump: per component a flat list of [node_index, re, im] triples
// over all grid nodes in index order.
inline json field_to_json(const LatticeField& f) {
  json comps = json::array();
  for (int c = 0; c < f.num_components(); ++c) {
    json nodes = json::array();
    for (int k = 0; k < f.grid().num_nodes(); ++k)
      nodes.push_back(json::array(
          {k, f.component(c)[k].real(), f.component(c)[k].imag()}));
    comps.push_back(std::move(nodes));
  }
  return json{{"grid_n", f.grid().half_width}, {"components", std::move(comps)}};
}

inline LatticeField field_from_json(const json& j) {
  GridShape g{j.at("grid_n").get<int>()};
  const auto& comps = j.at("components");
  LatticeField f(g, static_cast<int>(comps.size()));
  for (int c = 0; c < f.num_components(); ++c)
    for (const auto& node : comps[c]) {
      const int k = node[0].get<int>();
      f.component(c)[k] = Complex(node[1].get<double>(), node[2].get<double>());
    }
  return f;
}

inline void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << j.dump(1) << "\n";
}

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  json j;
  in >> j;
  return j;
}

}  // namespace vcross
