#include "depthsamp/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "depthsamp/errors.hpp"
#include "depthsamp/experiments.hpp"
#include "depthsamp/metrics.hpp"
#include "depthsamp/report.hpp"
#include "depthsamp/samplers.hpp"
#include "depthsamp/scenes.hpp"
#include "depthsamp/ssa.hpp"

namespace depthsamp {

namespace {

// "start,end,steps", e.g. "1.0,0.1,100".
TemperatureSchedule parse_schedule(const std::string& text) {
  TemperatureSchedule s;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%lf,%lf,%d%c", &s.start, &s.end, &s.steps, &tail) != 3) {
    throw ParameterError("schedule must look like start,end,steps");
  }
  return s;
}

struct SsaOptions {
  int window = 5;
  double temperature = 1.0;
  std::string schedule;
};

void add_ssa_options(CLI::App* app, SsaOptions& o) {
  app->add_option("--window", o.window, "SSA window size (odd)")->capture_default_str();
  app->add_option("--temp", o.temperature, "SSA temperature")->capture_default_str();
  app->add_option("--schedule", o.schedule, "temperature schedule start,end,steps");
}

SsaConfig to_config(const SsaOptions& o) {
  SsaConfig cfg;
  cfg.window = o.window;
  cfg.temperature = o.temperature;
  if (!o.schedule.empty()) cfg.schedule = parse_schedule(o.schedule);
  validate(cfg);
  return cfg;
}

struct SolverOptions {
  double sigma_c = 10.0;
  double tol = 1e-6;
  int max_iters = 20000;
  double sigma_s_scale = 0.5;
  double radius_scale = 3.0;
};

void add_solver_options(CLI::App* app, SolverOptions& o) {
  app->add_option("--sigma-c", o.sigma_c, "Lab color bandwidth")->capture_default_str();
  app->add_option("--tol", o.tol, "CG relative residual tolerance")->capture_default_str();
  app->add_option("--max-iters", o.max_iters, "CG iteration cap")->capture_default_str();
  app->add_option("--sigma-s-scale", o.sigma_s_scale,
                  "bilateral sigma_s as a fraction of the sample spacing")
      ->capture_default_str();
  app->add_option("--radius-scale", o.radius_scale, "bilateral radius in units of sigma_s")
      ->capture_default_str();
}

void apply(const SolverOptions& o, MethodParams& p) {
  p.solver.sigma_c = o.sigma_c;
  p.solver.tol = o.tol;
  p.solver.max_iters = o.max_iters;
  p.bilateral_sigma_s = o.sigma_s_scale;
  p.bilateral_radius = o.radius_scale;
}

const std::vector<std::string> kMethods{"random", "grid", "poisson", "sps", "ssa-refined"};
const std::vector<std::string> kRecons{"colorization", "bilateral", "nearest"};
const std::vector<std::string> kKinds{"piecewise-constant", "planar-ramp", "step-edge",
                                      "textured"};

// Splices a "--config FILE" of key = value lines into the argument list as
// flags placed right after the subcommand. Keys also given on the command line
// are skipped so the flags win. '#' starts a comment.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> rest;
  std::string file;
  bool found = false;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw CLI::ArgumentMismatch("--config needs a file");
      file = args[++i];
      found = true;
    } else if (args[i].rfind("--config=", 0) == 0) {
      file = args[i].substr(9);
      found = true;
    } else {
      rest.push_back(args[i]);
    }
  }
  if (!found) return args;
  if (rest.empty() || rest.front().rfind("-", 0) == 0) {
    throw CLI::ArgumentMismatch("--config must follow a subcommand");
  }
  auto given = [&](const std::string& flag) {
    return std::any_of(rest.begin() + 1, rest.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
  };
  std::ifstream in(file);
  if (!in) throw IoError("cannot read config file " + file);
  auto trim = [](std::string v) {
    const auto b = v.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    const auto e = v.find_last_not_of(" \t\r");
    v = v.substr(b, e - b + 1);
    if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') && v.back() == v.front()) {
      v = v.substr(1, v.size() - 2);
    }
    return v;
  };
  std::vector<std::string> injected;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    const std::string key = eq == std::string::npos ? "" : trim(line.substr(0, eq));
    if (key.empty()) {
      throw CLI::ArgumentMismatch(file + ":" + std::to_string(number) +
                                  ": expected key = value");
    }
    const std::string flag = (key.rfind("--", 0) == 0 ? "" : "--") + key;
    if (given(flag)) continue;
    injected.push_back(flag);
    injected.push_back(trim(line.substr(eq + 1)));
  }
  rest.insert(rest.begin() + 1, injected.begin(), injected.end());
  return rest;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adaptive depth sampling, reconstruction and evaluation toolkit", "depthsamp"};
  app.require_subcommand(1);
  std::string config_path;  // consumed by expand_config, listed for --help

  // sample ------------------------------------------------------------------
  struct {
    std::string method, rgb, depth, out, sparse_out, samples, segments;
    double rate = 0.0025;
    std::uint64_t seed = 0;
    double m = 1.0;
    int iters = 10;
    int refine_steps = 50;
    double refine_rate = 0.05;
    SsaOptions ssa;
  } sample;
  CLI::App* sample_cmd = app.add_subcommand("sample", "compute a sampling mask from an RGB image");
  sample_cmd->add_option("--config", config_path, "key = value defaults (flags take precedence)");
  sample_cmd->add_option("--method", sample.method, "sampling method")
      ->check(CLI::IsMember(kMethods));
  sample_cmd->add_option("--rate", sample.rate, "sampling rate c in (0, 1]")->capture_default_str();
  sample_cmd->add_option("--seed", sample.seed, "random seed")->capture_default_str();
  sample_cmd->add_option("--rgb", sample.rgb, "input P6 image");
  sample_cmd->add_option("--depth", sample.depth,
                         "ground-truth depth (needed by ssa-refined and --sparse-out)");
  sample_cmd->add_option("--sparse-out", sample.sparse_out,
                         "write the measured sparse depth (16-bit P5)");
  sample_cmd->add_option("--out", sample.out, "output mask (P5, 255 = sampled)");
  sample_cmd->add_option("--samples", sample.samples, "also write locations as CSV");
  sample_cmd->add_option("--segments", sample.segments, "dump superpixel labels (16-bit PGM)");
  sample_cmd->add_option("--m", sample.m, "SLIC compactness")->capture_default_str();
  sample_cmd->add_option("--iters", sample.iters, "SLIC iterations")->capture_default_str();
  sample_cmd->add_option("--refine-steps", sample.refine_steps, "SSA refinement steps")
      ->capture_default_str();
  sample_cmd->add_option("--refine-rate", sample.refine_rate, "SSA refinement step size")
      ->capture_default_str();
  add_ssa_options(sample_cmd, sample.ssa);

  // reconstruct -------------------------------------------------------------
  struct {
    std::string method = "colorization", rgb, sparse, out;
    SolverOptions solver;
  } recon;
  CLI::App* recon_cmd =
      app.add_subcommand("reconstruct", "dense depth from RGB + sparse depth");
  recon_cmd->add_option("--config", config_path, "key = value defaults (flags take precedence)");
  recon_cmd->add_option("--method", recon.method, "reconstructor")
      ->check(CLI::IsMember(kRecons))
      ->capture_default_str();
  recon_cmd->add_option("--rgb", recon.rgb, "input P6 image");
  recon_cmd->add_option("--sparse", recon.sparse, "sparse depth (16-bit P5, 0 = missing)");
  recon_cmd->add_option("--out", recon.out, "output dense depth (16-bit P5)");
  add_solver_options(recon_cmd, recon.solver);

  // eval ----------------------------------------------------------------------
  std::string est_path, gt_path;
  CLI::App* eval_cmd = app.add_subcommand("eval", "MAE / RMSE of an estimate");
  eval_cmd->add_option("--config", config_path, "key = value defaults (flags take precedence)");
  eval_cmd->add_option("--est", est_path, "estimated depth (16-bit P5)");
  eval_cmd->add_option("--gt", gt_path, "ground-truth depth (16-bit P5)");

  // pipeline ----------------------------------------------------------------
  struct {
    std::vector<std::string> methods{"sps"};
    std::vector<double> rates{0.0025};
    std::vector<std::string> recons{"colorization"};
    std::vector<std::uint64_t> seeds{0};
    std::vector<int> jitter, delays;
    std::string in, out, curve;
    int threads = 1;
    bool timing = false;
    double m = 1.0;
    int iters = 10;
    SolverOptions solver;
    SsaOptions ssa;
  } pipe;
  CLI::App* pipe_cmd =
      app.add_subcommand("pipeline", "sample -> measure -> reconstruct -> evaluate over a dataset");
  pipe_cmd->add_option("--config", config_path, "key = value defaults (flags take precedence)");
  pipe_cmd->add_option("--method", pipe.methods, "sampling methods")
      ->delimiter(',')
      ->check(CLI::IsMember(kMethods))
      ->capture_default_str();
  pipe_cmd->add_option("--rate", pipe.rates, "sampling rates")->delimiter(',')->capture_default_str();
  pipe_cmd->add_option("--recon", pipe.recons, "reconstructors")
      ->delimiter(',')
      ->check(CLI::IsMember(kRecons))
      ->capture_default_str();
  pipe_cmd->add_option("--seeds", pipe.seeds, "seeds")->delimiter(',')->capture_default_str();
  pipe_cmd->add_option("--in", pipe.in, "directory of NNN_rgb.ppm / NNN_depth.pgm pairs");
  pipe_cmd->add_option("--out", pipe.out, "report CSV (a .json mirror is written next to it)");
  pipe_cmd->add_option("--jitter", pipe.jitter, "location jitter ranges in pixels")
      ->delimiter(',');
  pipe_cmd->add_option("--delays", pipe.delays,
                       "frame delays; the input frames are treated as one sequence")
      ->delimiter(',');
  pipe_cmd->add_option("--curve", pipe.curve, "aggregated perturbation curve CSV");
  pipe_cmd->add_option("--threads", pipe.threads, "worker threads")->capture_default_str();
  pipe_cmd->add_flag("--timing", pipe.timing, "record wall-clock time in the report");
  pipe_cmd->add_option("--m", pipe.m, "SLIC compactness")->capture_default_str();
  pipe_cmd->add_option("--iters", pipe.iters, "SLIC iterations")->capture_default_str();
  add_solver_options(pipe_cmd, pipe.solver);
  add_ssa_options(pipe_cmd, pipe.ssa);

  // grad-check --------------------------------------------------------------
  struct {
    int cases = 1000;
    std::uint64_t seed = 0;
    int window = 5;
    double temperature = 0.0;
    std::string schedule;
  } grad;
  CLI::App* grad_cmd = app.add_subcommand(
      "grad-check", "compare analytic SSA gradients with central differences");
  grad_cmd->add_option("--config", config_path, "key = value defaults (flags take precedence)");
  grad_cmd->add_option("--cases", grad.cases, "randomized cases")->capture_default_str();
  grad_cmd->add_option("--seed", grad.seed, "random seed")->capture_default_str();
  grad_cmd->add_option("--window", grad.window, "SSA window size")->capture_default_str();
  grad_cmd->add_option("--temp", grad.temperature,
                       "fixed temperature (default: uniform in [0.2, 2])");
  grad_cmd->add_option("--schedule", grad.schedule, "cycle through start,end,steps");

  // gen-scenes --------------------------------------------------------------
  struct {
    std::string kind = "piecewise-constant", out;
    int count = 10;
    int height = 120;
    int width = 160;
    std::uint64_t seed = 0;
    int shift = -1;
  } gen;
  CLI::App* gen_cmd = app.add_subcommand("gen-scenes", "write synthetic RGB-D scenes");
  gen_cmd->add_option("--config", config_path, "key = value defaults (flags take precedence)");
  gen_cmd->add_option("--kind", gen.kind, "scene kind")
      ->check(CLI::IsMember(kKinds))
      ->capture_default_str();
  gen_cmd->add_option("--count", gen.count, "number of scenes / frames")->capture_default_str();
  gen_cmd->add_option("--height", gen.height, "image height")->capture_default_str();
  gen_cmd->add_option("--width", gen.width, "image width")->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed, "base seed")->capture_default_str();
  gen_cmd->add_option("--shift", gen.shift,
                      "write one translating sequence moving this many px per frame");
  gen_cmd->add_option("--out", gen.out, "output directory");

  try {
    const std::vector<std::string> expanded = expand_config(args);
    std::vector<std::string> reversed(expanded.rbegin(), expanded.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }

  auto usage = [&](const CLI::App* cmd, const std::string& msg) {
    err << "error: " << msg << "\n\n" << cmd->help();
    return kExitUsage;
  };

  try {
    if (sample_cmd->parsed()) {
      if (sample.method.empty() || sample.rgb.empty() || sample.out.empty()) {
        return usage(sample_cmd, "--method, --rgb and --out are required");
      }
      const SamplingMethod method = parse_sampling_method(sample.method);
      if (method == SamplingMethod::kSsaRefined && sample.depth.empty()) {
        return usage(sample_cmd, "ssa-refined needs --depth");
      }
      if (!sample.sparse_out.empty() && sample.depth.empty()) {
        return usage(sample_cmd, "--sparse-out needs --depth");
      }
      const RgbImage rgb = load_ppm(sample.rgb);
      std::optional<DepthMap> depth;
      if (!sample.depth.empty()) depth = load_pgm16(sample.depth);
      MethodParams params;
      params.sps = {sample.m, sample.iters};
      params.ssa = to_config(sample.ssa);
      params.refine_steps = sample.refine_steps;
      params.refine_rate = sample.refine_rate;
      const std::size_t count = target_count(sample.rate, rgb.height(), rgb.width());
      const SampleSet locs = sample_locations(method, rgb, depth ? &*depth : nullptr, count,
                                              sample.seed, params);
      const SamplingMask mask = locations_to_mask(locs, rgb.height(), rgb.width());
      save_mask(mask, sample.out);
      if (!sample.sparse_out.empty()) save_pgm16(apply_mask(*depth, mask), sample.sparse_out);
      if (!sample.samples.empty()) save_samples(locs, sample.samples);
      if (!sample.segments.empty()) {
        if (method != SamplingMethod::kSps && method != SamplingMethod::kSsaRefined) {
          return usage(sample_cmd, "--segments only applies to superpixel methods");
        }
        const SpsResult sps = sps_run(rgb, count, params.sps);
        save_labels16(sps.segmentation.labels, rgb.width(), rgb.height(), sample.segments);
      }
      out << "samples=" << mask.count() << '\n';
      return kExitOk;
    }

    if (recon_cmd->parsed()) {
      if (recon.rgb.empty() || recon.sparse.empty() || recon.out.empty()) {
        return usage(recon_cmd, "--rgb, --sparse and --out are required");
      }
      const RgbImage rgb = load_ppm(recon.rgb);
      const DepthMap sparse = load_pgm16(recon.sparse);
      MethodParams params;
      apply(recon.solver, params);
      const Reconstruction r =
          reconstruct(parse_reconstructor(recon.method), rgb_to_lab(rgb), sparse, params);
      save_pgm16(r.depth, recon.out);
      out << "converged=" << (r.converged ? "true" : "false") << '\n';
      return kExitOk;
    }

    if (eval_cmd->parsed()) {
      if (est_path.empty() || gt_path.empty()) {
        return usage(eval_cmd, "--est and --gt are required");
      }
      const ErrorStats s = evaluate(load_pgm16(est_path), load_pgm16(gt_path));
      char line[128];
      std::snprintf(line, sizeof(line), "mae_mm=%.6f rmse_mm=%.6f\n", s.mae, s.rmse);
      out << line;
      return kExitOk;
    }

    if (pipe_cmd->parsed()) {
      if (pipe.in.empty() || pipe.out.empty()) {
        return usage(pipe_cmd, "--in and --out are required");
      }
      if (!pipe.jitter.empty() && !pipe.delays.empty()) {
        return usage(pipe_cmd, "--jitter and --delays are mutually exclusive");
      }
      ExperimentConfig cfg;
      cfg.rates = pipe.rates;
      cfg.samplers.clear();
      for (const auto& m : pipe.methods) cfg.samplers.push_back(parse_sampling_method(m));
      cfg.reconstructors.clear();
      for (const auto& r : pipe.recons) cfg.reconstructors.push_back(parse_reconstructor(r));
      cfg.seeds = pipe.seeds;
      cfg.threads = pipe.threads;
      cfg.params.sps = {pipe.m, pipe.iters};
      cfg.params.ssa = to_config(pipe.ssa);
      apply(pipe.solver, cfg.params);

      const std::vector<Frame> frames = load_frames(pipe.in);
      EvalReport report;
      if (!pipe.jitter.empty()) {
        report = jitter_experiment(frames, pipe.jitter, cfg);
      } else if (!pipe.delays.empty()) {
        report = temporal_experiment(frames, pipe.delays, cfg);
      } else {
        report = run_matrix(frames, cfg);
      }
      save_report(report, pipe.out, pipe.timing);
      if (!pipe.curve.empty()) {
        std::ofstream curve(pipe.curve);
        if (!curve) throw IoError("cannot write " + pipe.curve);
        write_curve_csv(report, curve);
      }
      std::size_t failed = 0;
      for (const EvalRow& r : report.rows) failed += r.error.empty() ? 0 : 1;
      out << "rows=" << report.rows.size() << " failed=" << failed << '\n';
      return kExitOk;
    }

    if (grad_cmd->parsed()) {
      std::optional<TemperatureSchedule> schedule;
      if (!grad.schedule.empty()) schedule = parse_schedule(grad.schedule);
      if (grad.cases < 1) return usage(grad_cmd, "--cases must be positive");
      SsaConfig probe;
      probe.window = grad.window;
      validate(probe);
      const GradientCheckResult r = gradient_check(grad.cases, grad.seed, grad.window,
                                                   grad.temperature,
                                                   schedule ? &*schedule : nullptr);
      char line[160];
      std::snprintf(line, sizeof(line), "cases=%d max_rel_error=%.3e seconds=%.3f\n", r.cases,
                    r.max_relative_error, r.seconds);
      out << line;
      return r.max_relative_error < 1e-4 ? kExitOk : kExitData;
    }

    if (gen_cmd->parsed()) {
      if (gen.out.empty()) return usage(gen_cmd, "--out is required");
      const SceneKind kind = parse_scene_kind(gen.kind);
      std::vector<Frame> frames;
      char name[32];
      if (gen.shift >= 0) {
        const auto seq = gen_sequence(kind, gen.height, gen.width, gen.seed, gen.count, gen.shift);
        for (std::size_t i = 0; i < seq.size(); ++i) {
          std::snprintf(name, sizeof(name), "%03zu", i);
          frames.push_back(to_frame(seq[i], name));
        }
      } else {
        for (int i = 0; i < gen.count; ++i) {
          std::snprintf(name, sizeof(name), "%03d", i);
          frames.push_back(to_frame(
              gen_scene(kind, gen.height, gen.width, gen.seed + static_cast<std::uint64_t>(i)),
              name));
        }
      }
      save_frames(frames, gen.out);
      out << "scenes=" << frames.size() << '\n';
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace depthsamp
