// Command-line driver: continuation, sweeps, figures, regime verification
// and prediction printing for the discrete vortex-cross package.

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "vcross/dynamics.hpp"
#include "vcross/io.hpp"
#include "vcross/lsred.hpp"
#include "vcross/spectrum.hpp"
#include "vcross/sweep.hpp"
#include "vcross/verify.hpp"

namespace {

struct CliOverrides {
  std::string config_path;
  std::string model, charges, emit;
  double beta = -1, omega = -1, delta = -1;
  double eps_start = -1, eps_stop = -1, eps_step = -1;
  int grid_n = -1;
  std::string out_dir;
};

void add_common_flags(CLI::App* cmd, CliOverrides& o) {
  cmd->add_option("--config", o.config_path, "JSON run configuration");
  cmd->add_option("--model", o.model, "scalar|vector");
  cmd->add_option("--charges", o.charges, "++|+- (vector only)");
  cmd->add_option("--beta", o.beta, "inter-component coupling");
  cmd->add_option("--omega", o.omega, "second-component frequency");
  cmd->add_option("--delta", o.delta, "polarization angle (beta = 1)");
  cmd->add_option("--eps-start", o.eps_start, "sweep start");
  cmd->add_option("--eps-stop", o.eps_stop, "sweep stop");
  cmd->add_option("--eps-step", o.eps_step, "sweep step");
  cmd->add_option("--grid-n", o.grid_n, "lattice half-width N");
  cmd->add_option("--out", o.out_dir, "output directory");
  cmd->add_option("--emit", o.emit, "comma list of csv,json,svg");
}

vcross::RunConfig build_config(const CliOverrides& o) {
  vcross::RunConfig cfg;
  if (!o.config_path.empty()) cfg = vcross::load_config(o.config_path);
  if (!o.model.empty()) cfg.model = vcross::model_from_string(o.model);
  if (!o.charges.empty()) cfg.charges = vcross::charges_from_string(o.charges);
  if (o.beta >= 0) cfg.beta = o.beta;
  if (o.omega >= 0) cfg.omega = o.omega;
  if (o.delta >= 0) cfg.delta = o.delta;
  if (o.eps_start >= 0) cfg.eps_start = o.eps_start;
  if (o.eps_stop >= 0) cfg.eps_stop = o.eps_stop;
  if (o.eps_step >= 0) cfg.eps_step = o.eps_step;
  if (o.grid_n >= 0) cfg.grid_n = o.grid_n;
  if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
  if (!o.emit.empty()) {
    cfg.emit_csv = o.emit.find("csv") != std::string::npos;
    cfg.emit_json = o.emit.find("json") != std::string::npos;
    cfg.emit_svg = o.emit.find("svg") != std::string::npos;
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"discrete vortex-cross continuation and stability toolkit"};
  app.require_subcommand(1);

  CliOverrides o;
  double single_eps = 0.1;
  bool resume = false;
  int figure_no = 1;
  bool as_json = false;

  auto* cmd_continue =
      app.add_subcommand("continue", "solve a single coupling value");
  add_common_flags(cmd_continue, o);
  cmd_continue->add_option("--eps", single_eps, "target coupling")->required();

  auto* cmd_sweep = app.add_subcommand("sweep", "run an epsilon sweep");
  add_common_flags(cmd_sweep, o);
  cmd_sweep->add_flag("--resume", resume, "continue from the manifest");

  auto* cmd_figure =
      app.add_subcommand("figure", "emit an SVG figure from sweep artifacts");
  add_common_flags(cmd_figure, o);
  cmd_figure->add_option("--figure", figure_no, "figure number 1..4")->required();

  auto* cmd_verify =
      app.add_subcommand("verify", "run the regime's verification criteria");
  add_common_flags(cmd_verify, o);

  auto* cmd_predict =
      app.add_subcommand("predict", "print the reduction-formula eigenvalues");
  add_common_flags(cmd_predict, o);
  cmd_predict->add_option("--eps", single_eps, "coupling value")->required();
  cmd_predict->add_flag("--json", as_json, "machine-readable output");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cmd_continue) {
      vcross::RunConfig cfg = build_config(o);
      vcross::VortexSpec spec = cfg.spec();
      spec.epsilon = single_eps;
      spec.validate();
      vcross::StationaryState st =
          vcross::detail::first_point(cfg, single_eps, cfg.newton());
      vcross::SpectrumReport rep =
          vcross::solve_spectrum(vcross::assemble_operators(st));
      vcross::fs::path dir = vcross::resolve_out_dir(cfg);
      vcross::fs::create_directories(dir / "states");
      vcross::StepRecord rec;
      rec.eps = single_eps;
      rec.state = st;
      rec.eigenvalues = rep.eigenvalues;
      rec.track_ids.assign(rep.eigenvalues.size(), -1);
      for (int i = 0; i < rep.eigenvalues.size(); ++i) rec.track_ids[i] = i;
      rec.krein_signs = vcross::detail::krein_column(rep);
      rec.max_real_part = rep.max_real_part;
      rec.zero_algebraic = rep.zero_algebraic;
      rec.zero_geometric = rep.zero_geometric;
      rec.n_negative_h = rep.n_negative_h;
      rec.n_constraints = rep.n_constraints;
      const auto path = dir / "states" /
                        ("eps_" + vcross::detail::eps_tag(single_eps) + ".json");
      vcross::write_json_file(path, vcross::detail::record_to_json(rec));
      std::cout << nlohmann::json{{"eps", single_eps},
                                  {"residual_norm", st.residual_norm},
                                  {"newton_iters", st.newton_iters},
                                  {"max_real_part", rep.max_real_part},
                                  {"zero_algebraic", rep.zero_algebraic},
                                  {"zero_geometric", rep.zero_geometric},
                                  {"n_negative_h", rep.n_negative_h},
                                  {"state_file", path.string()}}
                       .dump(1)
                << "\n";
      return 0;
    }
    if (*cmd_sweep) {
      vcross::RunConfig cfg = build_config(o);
      vcross::SweepResult res = vcross::run_sweep(cfg, resume);
      std::cout << "sweep: " << res.steps.size() << " points, last eps "
                << vcross::fmt17(res.last_good_eps) << ", "
                << res.events.size() << " HH event(s), "
                << (res.complete ? "complete" : "PARTIAL") << "\n";
      for (const auto& e : res.events)
        std::cout << "  HH at eps ~ " << vcross::fmt17(e.eps_star) << " ("
                  << (e.post_collision == vcross::HHEvent::Post::quartet
                          ? "quartet"
                          : "real pair")
                  << ")\n";
      return res.complete ? 0 : 1;
    }
    if (*cmd_figure) {
      vcross::RunConfig cfg = build_config(o);
      auto [svg, dat] = vcross::emit_figure(vcross::resolve_out_dir(cfg), figure_no);
      std::cout << "wrote " << svg.string() << " and " << dat.string() << "\n";
      return 0;
    }
    if (*cmd_verify) {
      vcross::RunConfig cfg = build_config(o);
      vcross::VerifyContext ctx;
      ctx.newton = cfg.newton();
      auto results = vcross::run_criteria(ctx, vcross::relevant_criteria(cfg));
      for (const auto& r : results) std::cout << r.line() << "\n";
      vcross::fs::path dir = vcross::resolve_out_dir(cfg);
      vcross::fs::create_directories(dir);
      vcross::write_json_file(dir / "verify.json",
                              vcross::criteria_to_json(results));
      std::cout << "report: " << (dir / "verify.json").string() << "\n";
      return 0;
    }
    if (*cmd_predict) {
      vcross::RunConfig cfg = build_config(o);
      vcross::VortexSpec spec = cfg.spec();
      spec.epsilon = single_eps;
      spec.validate();
      vcross::PredictionSet preds = vcross::predict(spec);
      if (as_json) {
        nlohmann::json pairs = nlohmann::json::array();
        for (const auto& p : preds.pairs) {
          const auto v = p.value(single_eps);
          pairs.push_back({{"label", p.label},
                           {"re", v.real()},
                           {"im", v.imag()},
                           {"order", p.order},
                           {"krein", p.krein == vcross::KreinTag::negative ? -1
                                     : p.krein == vcross::KreinTag::positive ? 1
                                                                             : 0}});
        }
        nlohmann::json gammas = nlohmann::json::array();
        for (const auto& [name, val] : preds.jacobian_gammas)
          gammas.push_back({{"label", name}, {"value", val}});
        std::cout << nlohmann::json{{"eps", single_eps},
                                    {"pairs", pairs},
                                    {"jacobian_gammas", gammas},
                                    {"zero_algebraic", preds.zero_algebraic},
                                    {"zero_geometric", preds.zero_geometric}}
                         .dump(1)
                  << "\n";
      } else {
        std::printf("small-eigenvalue pairs at eps = %g:\n", single_eps);
        for (const auto& p : preds.pairs) {
          const auto v = p.value(single_eps);
          const char* tag = p.krein == vcross::KreinTag::negative   ? "krein -"
                            : p.krein == vcross::KreinTag::positive ? "krein +"
                            : p.krein == vcross::KreinTag::real_pair ? "real pair"
                                                                     : "quartet";
          std::printf("  %-12s +-(%.9g %+.9gi)  O(eps^%d)  %s\n", p.label.c_str(),
                      v.real(), v.imag(), p.order, tag);
        }
        for (const auto& [name, val] : preds.jacobian_gammas)
          std::printf("  %-12s %.9g\n", name.c_str(), val);
        std::printf("  zero eigenvalue: algebraic %d, geometric %d\n",
                    preds.zero_algebraic, preds.zero_geometric);
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
