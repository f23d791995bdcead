#pragma once

// Epsilon-sweep orchestration: warm-started continuation over a grid,
// per-point spectra with persistent track ids, artifact persistence
// (states, branch/comparison CSV, HH events, manifest), resume support and
// figure emission.
//
// Per-point state dumps are written incrementally so an interrupted sweep
// can resume from the manifest's last good epsilon; the CSV artifacts are
// regenerated from the full record set at the end, which makes a resumed
// run byte-identical to an uninterrupted one.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "vcross/io.hpp"
#include "vcross/lsred.hpp"
#include "vcross/spectrum.hpp"
#include "vcross/stationary.hpp"

namespace vcross {

namespace fs = std::filesystem;

struct StepRecord {
  double eps = 0.0;
  StationaryState state;
  Eigen::VectorXcd eigenvalues;
  std::vector<int> track_ids;
  std::vector<int> krein_signs;  // per eigenvalue; 0 when not an imaginary pair
  double max_real_part = 0.0;
  int zero_algebraic = 0, zero_geometric = 0, n_negative_h = 0, n_constraints = 0;
};

struct SweepResult {
  RunConfig config;
  std::vector<StepRecord> steps;
  std::vector<HHEvent> events;
  std::vector<std::string> warnings;
  bool complete = false;
  double last_good_eps = 0.0;
  fs::path run_dir;
};

namespace detail {

inline std::string eps_tag(double eps) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", eps);
  return buf;
}

inline std::vector<double> eps_grid(const RunConfig& c) {
  std::vector<double> g;
  for (int k = 0;; ++k) {
    const double e = c.eps_start + k * c.eps_step;
    if (e > c.eps_stop - 1e-12) break;
    g.push_back(e);
  }
  g.push_back(c.eps_stop);
  return g;
}

// Per-eigenvalue Krein column from the per-pair report entries.
inline std::vector<int> krein_column(const SpectrumReport& rep) {
  std::vector<int> col(rep.eigenvalues.size(), 0);
  for (int i = 0; i < rep.eigenvalues.size(); ++i) {
    const Complex l = rep.eigenvalues[i];
    if (std::abs(l.imag()) < 1e-8 ||
        std::abs(l.real()) > 1e-8 * (1.0 + std::abs(l)))
      continue;
    double best = 1e-6 * (1.0 + std::abs(l.imag()));
    for (const auto& e : rep.krein)
      if (std::abs(e.im - std::abs(l.imag())) < best) {
        best = std::abs(e.im - std::abs(l.imag()));
        col[i] = e.sign;
      }
  }
  return col;
}

inline json record_to_json(const StepRecord& r) {
  json eigs = json::array();
  for (int i = 0; i < r.eigenvalues.size(); ++i)
    eigs.push_back(json::array({r.eigenvalues[i].real(), r.eigenvalues[i].imag(),
                                r.track_ids[i], r.krein_signs[i]}));
  return json{{"eps", r.eps},
              {"residual_norm", r.state.residual_norm},
              {"newton_iters", r.state.newton_iters},
              {"max_real_part", r.max_real_part},
              {"zero_algebraic", r.zero_algebraic},
              {"zero_geometric", r.zero_geometric},
              {"n_negative_h", r.n_negative_h},
              {"n_constraints", r.n_constraints},
              {"eigenvalues", std::move(eigs)},
              {"field", field_to_json(r.state.field)}};
}

inline StepRecord record_from_json(const json& j, const RunConfig& cfg) {
  StepRecord r;
  r.eps = j.at("eps").get<double>();
  VortexSpec spec = cfg.spec();
  spec.epsilon = r.eps;
  r.state.field = field_from_json(j.at("field"));
  r.state.spec = spec;
  r.state.residual_norm = j.at("residual_norm").get<double>();
  r.state.newton_iters = j.at("newton_iters").get<int>();
  for (int c = 0; c < spec.num_components(); ++c)
    r.state.anchors.push_back({{-1, 0}, 0.0});
  r.max_real_part = j.at("max_real_part").get<double>();
  r.zero_algebraic = j.at("zero_algebraic").get<int>();
  r.zero_geometric = j.at("zero_geometric").get<int>();
  r.n_negative_h = j.at("n_negative_h").get<int>();
  r.n_constraints = j.at("n_constraints").get<int>();
  const auto& eigs = j.at("eigenvalues");
  r.eigenvalues.resize(eigs.size());
  for (size_t i = 0; i < eigs.size(); ++i) {
    r.eigenvalues[i] = Complex(eigs[i][0].get<double>(), eigs[i][1].get<double>());
    r.track_ids.push_back(eigs[i][2].get<int>());
    r.krein_signs.push_back(eigs[i][3].get<int>());
  }
  return r;
}

// First sweep point: try Newton off the truncated series, fall back to a
// warm-start chain from the anti-continuum seed.
inline StationaryState first_point(const RunConfig& cfg, double eps,
                                   const NewtonOptions& nopts) {
  VortexSpec spec = cfg.spec();
  spec.epsilon = eps;
  StationaryState seed_state{seed_for(spec), cfg.spec(),
                             0.0, 0, {}};
  seed_state.spec.epsilon = 0.0;
  for (int c = 0; c < spec.num_components(); ++c)
    seed_state.anchors.push_back({{-1, 0}, 0.0});
  if (eps == 0.0) return newton_at(spec, 0.0, seed_state, nopts);
  if (!spec.manakov()) {
    const int maxord = spec.model == Model::vector ? 2 : 3;
    const int ord = std::clamp(cfg.seed_order, 0, maxord);
    auto guess = series_field(spec, ord);
    if (auto st = detail::try_newton(spec, guess.field, nopts)) return *st;
  }
  return newton_at(spec, eps, seed_state, nopts);
}

inline void write_branch_csv(const fs::path& path,
                             const std::vector<StepRecord>& steps) {
  std::ofstream out(path);
  out << "# vcross branch schema v1; floats %.17g; rows sorted by eps then "
         "eigenvalue order (|Im|, Re)\n";
  out << "eps,track_id,re_lambda,im_lambda,krein\n";
  for (const auto& r : steps)
    for (int i = 0; i < r.eigenvalues.size(); ++i)
      out << fmt17(r.eps) << ',' << r.track_ids[i] << ','
          << fmt17(r.eigenvalues[i].real()) << ','
          << fmt17(r.eigenvalues[i].imag()) << ',' << r.krein_signs[i] << '\n';
}

// Canonical-quadrant representatives used for prediction matching.
inline std::vector<std::pair<Complex, int>> quadrant_reps(const StepRecord& r) {
  std::vector<std::pair<Complex, int>> reps;
  for (int i = 0; i < r.eigenvalues.size(); ++i) {
    const Complex l = r.eigenvalues[i];
    if (l.imag() > 0 || (l.imag() == 0 && l.real() > 0)) reps.push_back({l, i});
  }
  return reps;
}

inline void write_comparison_csv(const fs::path& path, const RunConfig& cfg,
                                 const std::vector<StepRecord>& steps) {
  std::ofstream out(path);
  out << "# vcross comparison schema v1; floats %.17g; numeric small "
         "eigenvalues vs the reduction formulas\n";
  out << "eps,label,track_id,re_numeric,im_numeric,re_predicted,im_predicted,"
         "abs_error,rel_error\n";
  for (const auto& r : steps) {
    VortexSpec spec = cfg.spec();
    spec.epsilon = r.eps;
    PredictionSet preds = predict(spec);
    std::vector<AsymptoticPrediction> items = preds.pairs;
    std::sort(items.begin(), items.end(),
              [&](const AsymptoticPrediction& a, const AsymptoticPrediction& b) {
                return std::abs(a.value(r.eps)) > std::abs(b.value(r.eps));
              });
    auto reps = quadrant_reps(r);
    std::vector<bool> used(reps.size(), false);
    for (const auto& p : items) {
      const Complex pv = p.value(r.eps);
      if (std::abs(pv) == 0.0) continue;  // nothing to compare against
      // predicted pair is +-(x + iy); the canonical representative carries
      // the positive imaginary (or real) part
      const Complex target(std::abs(pv.real()), std::abs(pv.imag()));
      int best = -1;
      double bd = 1e300;
      for (size_t q = 0; q < reps.size(); ++q) {
        if (used[q]) continue;
        const Complex c(std::abs(reps[q].first.real()),
                        std::abs(reps[q].first.imag()));
        const double d = std::abs(c - target);
        if (d < bd) {
          bd = d;
          best = static_cast<int>(q);
        }
      }
      if (best < 0) continue;
      used[static_cast<size_t>(best)] = true;
      const Complex num = reps[static_cast<size_t>(best)].first;
      const int idx = reps[static_cast<size_t>(best)].second;
      const double abs_err = std::abs(Complex(std::abs(num.real()), std::abs(num.imag())) - target);
      out << fmt17(r.eps) << ',' << p.label << ',' << r.track_ids[idx] << ','
          << fmt17(num.real()) << ',' << fmt17(num.imag()) << ','
          << fmt17(target.real()) << ',' << fmt17(target.imag()) << ','
          << fmt17(abs_err) << ',' << fmt17(abs_err / std::abs(pv)) << '\n';
    }
  }
}

inline json events_to_json(const std::vector<HHEvent>& events) {
  json arr = json::array();
  for (const auto& e : events)
    arr.push_back(json{
        {"eps_star", e.eps_star},
        {"track_a", e.colliding_pair_ids.first},
        {"track_b", e.colliding_pair_ids.second},
        {"post_collision",
         e.post_collision == HHEvent::Post::quartet ? "quartet" : "real-pair"}});
  return arr;
}

}  // namespace detail

inline fs::path resolve_out_dir(const RunConfig& cfg) {
  fs::path base = cfg.out_dir;
  if (const char* root = std::getenv("VCROSS_OUT_ROOT"); root && *root)
    base = fs::path(root) / base;
  return base;
}

inline SweepResult run_sweep(const RunConfig& cfg, bool resume = false) {
  cfg.validate();
  SweepResult res;
  res.config = cfg;
  res.run_dir = resolve_out_dir(cfg);
  fs::create_directories(res.run_dir / "states");
  const fs::path manifest_path = res.run_dir / "manifest.json";
  const std::vector<double> grid = detail::eps_grid(cfg);
  const NewtonOptions nopts = cfg.newton();

  const json cfg_json = cfg;
  size_t start_k = 0;
  if (resume && fs::exists(manifest_path)) {
    json man = read_json_file(manifest_path);
    if (man.at("config") != cfg_json)
      throw ConfigError("resume requested with a different configuration");
    for (const auto& e : man.at("completed")) {
      const double eps = e.get<double>();
      if (start_k >= grid.size() || std::abs(grid[start_k] - eps) > 1e-12) break;
      const fs::path sp = res.run_dir / "states" /
                          ("eps_" + detail::eps_tag(eps) + ".json");
      res.steps.push_back(detail::record_from_json(read_json_file(sp), cfg));
      ++start_k;
    }
  }

  auto write_manifest = [&](const std::string& status) {
    json completed = json::array();
    for (const auto& r : res.steps) completed.push_back(r.eps);
    json warn = json::array();
    for (const auto& w : res.warnings) warn.push_back(w);
    write_json_file(manifest_path, json{{"schema", 1},
                                        {"config", cfg_json},
                                        {"status", status},
                                        {"last_good_eps", res.last_good_eps},
                                        {"completed", completed},
                                        {"warnings", warn}});
  };

  int next_track_id = 0;
  for (const auto& r : res.steps)
    for (int id : r.track_ids) next_track_id = std::max(next_track_id, id + 1);
  if (!res.steps.empty()) res.last_good_eps = res.steps.back().eps;

  bool failed = false;
  for (size_t k = start_k; k < grid.size(); ++k) {
    const double eps = grid[k];
    StepRecord rec;
    rec.eps = eps;
    try {
      rec.state = res.steps.empty()
                      ? detail::first_point(cfg, eps, nopts)
                      : newton_at(res.steps.back().state.spec, eps,
                                  res.steps.back().state, nopts);
    } catch (const ContinuationError&) {
      failed = true;
      break;
    }
    SpectrumReport rep = solve_spectrum(assemble_operators(rec.state));
    rec.eigenvalues = rep.eigenvalues;
    rec.krein_signs = detail::krein_column(rep);
    rec.max_real_part = rep.max_real_part;
    rec.zero_algebraic = rep.zero_algebraic;
    rec.zero_geometric = rep.zero_geometric;
    rec.n_negative_h = rep.n_negative_h;
    rec.n_constraints = rep.n_constraints;
    if (res.steps.empty()) {
      for (int i = 0; i < rec.eigenvalues.size(); ++i)
        rec.track_ids.push_back(next_track_id++);
    } else {
      std::vector<PairingAmbiguity> flags;
      std::vector<int> match = match_eigenvalues(
          res.steps.back().eigenvalues, rec.eigenvalues, cfg.pairing_radius, &flags);
      for (int i = 0; i < rec.eigenvalues.size(); ++i)
        rec.track_ids.push_back(match[i] >= 0
                                    ? res.steps.back().track_ids[match[i]]
                                    : next_track_id++);
      for (const auto& f : flags)
        res.warnings.push_back("eps " + detail::eps_tag(eps) +
                               ": ambiguous pairing of eigenvalue " +
                               std::to_string(f.cur_index));
    }
    write_json_file(res.run_dir / "states" /
                        ("eps_" + detail::eps_tag(eps) + ".json"),
                    detail::record_to_json(rec));
    res.steps.push_back(std::move(rec));
    res.last_good_eps = eps;
    write_manifest("running");
  }

  // Hamiltonian-Hopf events over the recorded branch.
  if (res.steps.size() >= 2) {
    TrackedBranch br;
    std::vector<StationaryState> states;
    for (const auto& r : res.steps) {
      br.epsilons.push_back(r.eps);
      SpectrumReport rep;
      rep.eigenvalues = r.eigenvalues;
      rep.max_real_part = r.max_real_part;
      br.reports.push_back(std::move(rep));
      br.track_of.push_back(r.track_ids);
      states.push_back(r.state);
    }
    HHOptions hopts;
    hopts.newton = nopts;
    res.events = detect_hh(br, states, cfg.hh_tol, hopts);
  }

  if (cfg.emit_csv) {
    detail::write_branch_csv(res.run_dir / "branch.csv", res.steps);
    detail::write_comparison_csv(res.run_dir / "comparison.csv", cfg, res.steps);
  }
  if (cfg.emit_json)
    write_json_file(res.run_dir / "hh_events.json", detail::events_to_json(res.events));

  res.complete = !failed;
  write_manifest(failed ? "partial" : "complete");
  return res;
}

// ---------------------------------------------------------------------------
// Figures: two-panel (Im, Re) SVG plots against epsilon, solid numerical
// tracks with dashed prediction overlays; double tracks drawn bold.

namespace detail {

struct Polyline {
  std::vector<std::pair<double, double>> pts;
  bool dashed = false;
  bool bold = false;
  std::string color = "#1f6fb2";
};

inline void write_svg_panel(std::ostream& out, double x0, double y0, double w,
                            double h, double xmin, double xmax, double ymin,
                            double ymax, const std::string& ylabel,
                            const std::vector<Polyline>& lines) {
  auto sx = [&](double x) { return x0 + (x - xmin) / (xmax - xmin) * w; };
  auto sy = [&](double y) { return y0 + h - (y - ymin) / (ymax - ymin) * h; };
  out << "<rect x='" << x0 << "' y='" << y0 << "' width='" << w
      << "' height='" << h << "' fill='none' stroke='black'/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double xv = xmin + t * (xmax - xmin) / 4;
    const double yv = ymin + t * (ymax - ymin) / 4;
    out << "<line x1='" << sx(xv) << "' y1='" << y0 + h << "' x2='" << sx(xv)
        << "' y2='" << y0 + h + 4 << "' stroke='black'/>\n";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", xv);
    out << "<text x='" << sx(xv) << "' y='" << y0 + h + 16
        << "' font-size='10' text-anchor='middle'>" << buf << "</text>\n";
    std::snprintf(buf, sizeof buf, "%.3g", yv);
    out << "<text x='" << x0 - 6 << "' y='" << sy(yv) + 3
        << "' font-size='10' text-anchor='end'>" << buf << "</text>\n";
  }
  out << "<text x='" << x0 - 44 << "' y='" << y0 + h / 2
      << "' font-size='11' transform='rotate(-90 " << x0 - 44 << " "
      << y0 + h / 2 << ")' text-anchor='middle'>" << ylabel << "</text>\n";
  for (const auto& pl : lines) {
    if (pl.pts.size() < 2) continue;
    out << "<polyline fill='none' stroke='" << pl.color << "' stroke-width='"
        << (pl.bold ? 2.6 : 1.1) << "'";
    if (pl.dashed) out << " stroke-dasharray='6,4'";
    out << " points='";
    bool started = false;
    for (const auto& [x, y] : pl.pts) {
      if (y < ymin || y > ymax) {
        started = false;
        continue;
      }
      out << (started ? " " : "") << sx(x) << ',' << sy(y);
      started = true;
    }
    out << "'/>\n";
  }
}

}  // namespace detail

// Figure regimes: 1 scalar, 2 vector 0 < beta < 1, 3 beta > 1, 4 beta = 1.
inline void check_figure_regime(const RunConfig& cfg, int figure) {
  bool ok = false;
  switch (figure) {
    case 1: ok = cfg.model == Model::scalar; break;
    case 2: ok = cfg.model == Model::vector && cfg.beta > 0 && cfg.beta < 1; break;
    case 3: ok = cfg.model == Model::vector && cfg.beta > 1; break;
    case 4: ok = cfg.model == Model::vector && cfg.beta == 1; break;
    default: throw ConfigError("figure must be 1..4");
  }
  if (!ok)
    throw ConfigError("run regime does not match figure " + std::to_string(figure));
}

inline std::pair<fs::path, fs::path> emit_figure(const fs::path& run_dir,
                                                 int figure) {
  const fs::path manifest_path = run_dir / "manifest.json";
  if (!fs::exists(manifest_path) || !fs::exists(run_dir / "branch.csv"))
    throw ConfigError("sweep artifacts not found in " + run_dir.string());
  json man = read_json_file(manifest_path);
  RunConfig cfg = man.at("config").get<RunConfig>();
  check_figure_regime(cfg, figure);

  // read the branch rows back
  struct Row { double eps, re, im; int id; };
  std::vector<Row> rows;
  {
    std::ifstream in(run_dir / "branch.csv");
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#' || line[0] == 'e') continue;
      Row r;
      if (std::sscanf(line.c_str(), "%lf,%d,%lf,%lf", &r.eps, &r.id, &r.re,
                      &r.im) == 4)
        rows.push_back(r);
    }
  }
  if (rows.empty()) throw ConfigError("branch.csv holds no data rows");

  std::map<int, std::vector<Row>> by_track;
  double eps_min = rows.front().eps, eps_max = rows.front().eps;
  for (const auto& r : rows) {
    by_track[r.id].push_back(r);
    eps_min = std::min(eps_min, r.eps);
    eps_max = std::max(eps_max, r.eps);
  }

  // prediction curves over the swept range
  VortexSpec sp = cfg.spec();
  sp.epsilon = eps_max;
  PredictionSet preds = predict(sp);
  double im_max = 0.05, re_max = 1e-3;
  for (const auto& p : preds.pairs) {
    const Complex v = p.value(eps_max);
    im_max = std::max(im_max, std::abs(v.imag()));
    re_max = std::max(re_max, std::abs(v.real()));
  }
  for (const auto& [id, tr] : by_track)
    for (const auto& r : tr) re_max = std::max(re_max, std::abs(r.re));
  im_max *= 1.3;
  re_max *= 1.2;

  // bold = has a near-coincident partner track over most shared samples
  std::map<int, bool> bold;
  for (auto it = by_track.begin(); it != by_track.end(); ++it)
    for (auto jt = std::next(it); jt != by_track.end(); ++jt) {
      const auto& a = it->second;
      const auto& b = jt->second;
      const size_t n = std::min(a.size(), b.size());
      if (n < 3) continue;
      int close = 0;
      for (size_t q = 0; q < n; ++q)
        if (a[q].eps == b[q].eps &&
            std::hypot(a[q].re - b[q].re, a[q].im - b[q].im) <
                1e-6 + 1e-3 * std::hypot(a[q].re, a[q].im))
          ++close;
      if (close >= static_cast<int>(0.8 * n)) bold[it->first] = bold[jt->first] = true;
    }

  std::vector<detail::Polyline> im_lines, re_lines;
  for (const auto& [id, tr] : by_track) {
    detail::Polyline pi, pr;
    pi.bold = pr.bold = bold.count(id) > 0;
    for (const auto& r : tr) {
      if (r.im > 0) pi.pts.push_back({r.eps, r.im});
      pr.pts.push_back({r.eps, r.re});
    }
    if (pi.pts.size() >= 2) im_lines.push_back(std::move(pi));
    bool nonzero = false;
    for (const auto& [x, y] : pr.pts) nonzero |= std::abs(y) > 1e-9;
    if (nonzero && pr.pts.size() >= 2) re_lines.push_back(std::move(pr));
  }
  const int nsamp = 60;
  for (const auto& p : preds.pairs) {
    detail::Polyline di, dr;
    di.dashed = dr.dashed = true;
    di.color = dr.color = "#c23a3a";
    for (int s = 0; s <= nsamp; ++s) {
      const double e = eps_min + s * (eps_max - eps_min) / nsamp;
      const Complex v = p.value(e);
      di.pts.push_back({e, std::abs(v.imag())});
      dr.pts.push_back({e, std::abs(v.real())});
    }
    if (std::abs(p.value(eps_max).imag()) > 0) im_lines.push_back(std::move(di));
    if (std::abs(p.value(eps_max).real()) > 0) {
      detail::Polyline neg = dr;
      for (auto& pt : neg.pts) pt.second = -pt.second;
      re_lines.push_back(std::move(dr));
      re_lines.push_back(std::move(neg));
    }
  }

  const fs::path svg_path = run_dir / ("figure" + std::to_string(figure) + ".svg");
  const fs::path dat_path =
      run_dir / ("figure" + std::to_string(figure) + "_data.csv");
  {
    std::ofstream out(svg_path);
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='760' height='680' "
           "font-family='sans-serif'>\n";
    out << "<text x='380' y='20' font-size='13' text-anchor='middle'>"
        << "eigenvalues vs coupling (" << to_string(cfg.model)
        << (cfg.model == Model::vector
                ? ", charges " + to_string(cfg.charges) + ", beta " +
                      std::to_string(cfg.beta)
                : std::string())
        << ")</text>\n";
    detail::write_svg_panel(out, 70, 40, 640, 270, eps_min, eps_max, 0, im_max,
                            "Im lambda", im_lines);
    detail::write_svg_panel(out, 70, 360, 640, 270, eps_min, eps_max, -re_max,
                            re_max, "Re lambda", re_lines);
    out << "<text x='380' y='665' font-size='11' "
           "text-anchor='middle'>epsilon (solid: numerics, dashed: "
           "asymptotics, bold: double)</text>\n";
    out << "</svg>\n";
  }
  {
    std::ofstream out(dat_path);
    out << "# vcross figure data schema v1\n";
    out << "series,panel,id,eps,value\n";
    for (const auto& [id, tr] : by_track)
      for (const auto& r : tr) {
        if (r.im > 0)
          out << "track,im," << id << ',' << fmt17(r.eps) << ',' << fmt17(r.im)
              << '\n';
        out << "track,re," << id << ',' << fmt17(r.eps) << ',' << fmt17(r.re)
            << '\n';
      }
    int pid = 0;
    for (const auto& p : preds.pairs) {
      for (int s = 0; s <= nsamp; ++s) {
        const double e = eps_min + s * (eps_max - eps_min) / nsamp;
        const Complex v = p.value(e);
        if (std::abs(v.imag()) > 0)
          out << "prediction,im," << pid << ',' << fmt17(e) << ','
              << fmt17(std::abs(v.imag())) << '\n';
        if (std::abs(v.real()) > 0)
          out << "prediction,re," << pid << ',' << fmt17(e) << ','
              << fmt17(std::abs(v.real())) << '\n';
      }
      ++pid;
    }
  }
  return {svg_path, dat_path};
}

}  // namespace vcross
