#include "depthsamp/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <thread>
#include <tuple>

#include "depthsamp/errors.hpp"
#include "depthsamp/metrics.hpp"
#include "depthsamp/random.hpp"

namespace depthsamp {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

// Superpixel targets for ssa-refined: the median ground-truth depth of each
// superpixel's members.
std::vector<double> superpixel_medians(const Segmentation& seg, const DepthMap& depth,
                                       const SampleSet& fallback_locations) {
  std::vector<std::vector<double>> members(seg.num_superpixels());
  for (std::size_t i = 0; i < seg.labels.size(); ++i) {
    if (depth.valid(i)) members[static_cast<std::size_t>(seg.labels[i])].push_back(depth.depth(i));
  }
  std::vector<double> out(members.size());
  for (std::size_t s = 0; s < members.size(); ++s) {
    auto& v = members[s];
    if (v.empty()) {
      out[s] = hard_sample(depth, fallback_locations[s]).depth;
      continue;
    }
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    out[s] = *mid;
  }
  return out;
}

SampleSet ssa_refined_locations(const RgbImage& rgb, const DepthMap& depth,
                                std::size_t count, const MethodParams& params) {
  const SpsResult sps = sps_run(rgb, count, params.sps);
  const std::vector<double> targets =
      superpixel_medians(sps.segmentation, depth, sps.samples);
  double scale = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < depth.size(); ++i) {
    if (depth.valid(i)) {
      scale += depth.depth(i);
      ++n;
    }
  }
  if (n == 0) throw SamplingError("ssa-refined sampling needs valid depth");
  scale /= static_cast<double>(n);
  try {
    return refine_locations(depth, sps.samples, targets, params.ssa,
                            params.refine_rate / (scale * scale), params.refine_steps)
        .locations;
  } catch (const SamplingError&) {
    return sps.samples;
  }
}

// One unit of work: a mask for (frame, sampler, rate, seed, perturbation),
// evaluated with every reconstructor.
struct Task {
  std::size_t eval_frame;
  std::size_t source_frame;
  std::size_t sampler_idx;
  std::size_t rate_idx;
  std::size_t seed_idx;
  std::size_t perturbation_idx;
  int perturbation;
  bool jitter;
};

struct RowKey {
  std::size_t scene, sampler, recon, rate, seed, perturbation;
  auto tie() const { return std::tie(scene, sampler, recon, rate, seed, perturbation); }
};

std::vector<EvalRow> run_task(const std::vector<Frame>& frames, const Task& task,
                              const ExperimentConfig& cfg, std::vector<RowKey>& keys) {
  const Frame& eval = frames[task.eval_frame];
  const Frame& source = frames[task.source_frame];
  const SamplingMethod sampler = cfg.samplers[task.sampler_idx];
  const double rate = cfg.rates[task.rate_idx];
  const std::uint64_t seed = cfg.seeds[task.seed_idx];

  std::vector<EvalRow> rows;
  auto base_row = [&](ReconstructorKind recon) {
    EvalRow r;
    r.scene = task.eval_frame;
    r.scene_name = eval.name;
    r.sampler = sampler;
    r.reconstructor = recon;
    r.rate = rate;
    r.seed = seed;
    r.perturbation = task.perturbation;
    return r;
  };

  const auto t0 = Clock::now();
  std::optional<SamplingMask> mask;
  std::string sample_error;
  try {
    if (source.rgb.width() != eval.rgb.width() || source.rgb.height() != eval.rgb.height()) {
      throw ParameterError("frames in a sequence must share dimensions");
    }
    const int h = eval.rgb.height();
    const int w = eval.rgb.width();
    const std::size_t count = target_count(rate, h, w);
    // Random streams are per source frame.
    const std::uint64_t frame_seed = derive_seed(seed, {task.source_frame});
    if (task.jitter) {
      SampleSet locs =
          sample_locations(sampler, source.rgb, &source.depth, count, frame_seed, cfg.params);
      if (task.perturbation > 0) {
        locs = jitter_locations(locs, task.perturbation, h, w,
                                derive_seed(seed, {task.eval_frame,
                                                   static_cast<std::uint64_t>(task.perturbation),
                                                   0x6a69747465ULL}));
      }
      mask = locations_to_mask(locs, h, w);
    } else {
      mask = sample_mask(sampler, source.rgb, &source.depth, count, frame_seed, cfg.params);
    }
  } catch (const std::exception& e) {
    sample_error = e.what();
  }
  const double sample_ms = elapsed_ms(t0);

  const LabImage lab = rgb_to_lab(eval.rgb);
  for (std::size_t ri = 0; ri < cfg.reconstructors.size(); ++ri) {
    EvalRow row = base_row(cfg.reconstructors[ri]);
    keys.push_back({task.eval_frame, task.sampler_idx, ri, task.rate_idx, task.seed_idx,
                    task.perturbation_idx});
    if (!mask) {
      row.error = sample_error;
      row.converged = false;
      rows.push_back(std::move(row));
      continue;
    }
    const auto t1 = Clock::now();
    try {
      const DepthMap sparse = apply_mask(eval.depth, *mask);
      const Reconstruction rec = reconstruct(row.reconstructor, lab, sparse, cfg.params);
      const ErrorStats stats = evaluate(rec.depth, eval.depth);
      row.mae = stats.mae;
      row.rmse = stats.rmse;
      row.valid_pixels = stats.pixels;
      row.converged = rec.converged;
    } catch (const std::exception& e) {
      row.error = e.what();
      row.converged = false;
    }
    row.samples = mask->count();
    row.time_ms = sample_ms + elapsed_ms(t1);
    rows.push_back(std::move(row));
  }
  return rows;
}

EvalReport execute(const std::vector<Frame>& frames, const std::vector<Task>& tasks,
                   const ExperimentConfig& cfg, std::string kind) {
  std::vector<std::vector<EvalRow>> results(tasks.size());
  std::vector<std::vector<RowKey>> keys(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      results[i] = run_task(frames, tasks[i], cfg, keys[i]);
    }
  };
  const int threads = std::max(1, cfg.threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  // Canonical order regardless of scheduling.
  std::vector<std::pair<RowKey, EvalRow>> flat;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    for (std::size_t j = 0; j < results[i].size(); ++j) {
      flat.emplace_back(keys[i][j], std::move(results[i][j]));
    }
  }
  std::stable_sort(flat.begin(), flat.end(), [](const auto& a, const auto& b) {
    return a.first.tie() < b.first.tie();
  });
  EvalReport report;
  report.perturbation_kind = std::move(kind);
  for (auto& [key, row] : flat) report.rows.push_back(std::move(row));
  return report;
}

void check_config(const ExperimentConfig& cfg) {
  if (cfg.rates.empty() || cfg.samplers.empty() || cfg.reconstructors.empty() ||
      cfg.seeds.empty()) {
    throw ParameterError("experiment needs at least one rate, sampler, reconstructor and seed");
  }
  for (double r : cfg.rates) {
    if (!(r > 0.0) || r > 1.0) throw ParameterError("rates must lie in (0, 1]");
  }
}

}  // namespace

std::string_view to_string(SamplingMethod method) {
  switch (method) {
    case SamplingMethod::kRandom:
      return "random";
    case SamplingMethod::kGrid:
      return "grid";
    case SamplingMethod::kPoisson:
      return "poisson";
    case SamplingMethod::kSps:
      return "sps";
    case SamplingMethod::kSsaRefined:
      return "ssa-refined";
  }
  return "unknown";
}

std::string_view to_string(ReconstructorKind kind) {
  switch (kind) {
    case ReconstructorKind::kColorization:
      return "colorization";
    case ReconstructorKind::kBilateral:
      return "bilateral";
    case ReconstructorKind::kNearest:
      return "nearest";
  }
  return "unknown";
}

SamplingMethod parse_sampling_method(std::string_view name) {
  for (SamplingMethod m : {SamplingMethod::kRandom, SamplingMethod::kGrid,
                           SamplingMethod::kPoisson, SamplingMethod::kSps,
                           SamplingMethod::kSsaRefined}) {
    if (to_string(m) == name) return m;
  }
  throw ParameterError("unknown sampling method '" + std::string(name) + "'");
}

ReconstructorKind parse_reconstructor(std::string_view name) {
  for (ReconstructorKind k : {ReconstructorKind::kColorization, ReconstructorKind::kBilateral,
                              ReconstructorKind::kNearest}) {
    if (to_string(k) == name) return k;
  }
  throw ParameterError("unknown reconstructor '" + std::string(name) + "'");
}

SampleSet sample_locations(SamplingMethod method, const RgbImage& rgb, const DepthMap* depth,
                           std::size_t count, std::uint64_t seed, const MethodParams& params) {
  switch (method) {
    case SamplingMethod::kRandom:
      return mask_to_locations(random_mask(rgb.height(), rgb.width(), count, seed));
    case SamplingMethod::kGrid:
      return mask_to_locations(grid_mask(rgb.height(), rgb.width(), count));
    case SamplingMethod::kPoisson:
      return mask_to_locations(poisson_mask(rgb.height(), rgb.width(), count, seed).mask);
    case SamplingMethod::kSps:
      return sps_sample(rgb, count, params.sps);
    case SamplingMethod::kSsaRefined:
      if (depth == nullptr) throw ParameterError("ssa-refined sampling needs a depth map");
      return ssa_refined_locations(rgb, *depth, count, params);
  }
  throw ParameterError("unknown sampling method");
}

SamplingMask sample_mask(SamplingMethod method, const RgbImage& rgb, const DepthMap* depth,
                         std::size_t count, std::uint64_t seed, const MethodParams& params) {
  switch (method) {
    case SamplingMethod::kRandom:
      return random_mask(rgb.height(), rgb.width(), count, seed);
    case SamplingMethod::kGrid:
      return grid_mask(rgb.height(), rgb.width(), count);
    case SamplingMethod::kPoisson:
      return poisson_mask(rgb.height(), rgb.width(), count, seed).mask;
    case SamplingMethod::kSps:
    case SamplingMethod::kSsaRefined:
      return locations_to_mask(sample_locations(method, rgb, depth, count, seed, params),
                               rgb.height(), rgb.width());
  }
  throw ParameterError("unknown sampling method");
}

Reconstruction reconstruct(ReconstructorKind kind, const LabImage& lab, const DepthMap& sparse,
                           const MethodParams& params) {
  switch (kind) {
    case ReconstructorKind::kColorization: {
      ColorizationResult r = colorization_reconstruct(lab, sparse, params.solver);
      return {std::move(r.depth), r.converged};
    }
    case ReconstructorKind::kBilateral: {
      const std::size_t n = std::max<std::size_t>(sparse.valid_count(), 1);
      const double spacing =
          std::sqrt(static_cast<double>(sparse.size()) / static_cast<double>(n));
      const double sigma_s = params.bilateral_sigma_s * spacing;
      return {bilateral_reconstruct(lab, sparse, sigma_s, params.solver.sigma_c,
                                    params.bilateral_radius * sigma_s),
              true};
    }
    case ReconstructorKind::kNearest:
      return {nn_reconstruct(sparse), true};
  }
  throw ParameterError("unknown reconstructor");
}

std::vector<AggregateRow> aggregate(const EvalReport& report) {
  std::vector<AggregateRow> out;
  std::map<std::tuple<int, int, double, int>, std::size_t> index;
  for (const EvalRow& r : report.rows) {
    if (!r.error.empty()) continue;
    const auto key = std::make_tuple(static_cast<int>(r.sampler),
                                     static_cast<int>(r.reconstructor), r.rate, r.perturbation);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, out.size()).first;
      out.push_back({r.sampler, r.reconstructor, r.rate, r.perturbation, 0.0, 0.0, 0});
    }
    AggregateRow& a = out[it->second];
    a.mae += r.mae;
    a.rmse += r.rmse;
    ++a.cells;
  }
  for (AggregateRow& a : out) {
    a.mae /= static_cast<double>(a.cells);
    a.rmse /= static_cast<double>(a.cells);
  }
  return out;
}

double mean_rmse(const EvalReport& report, SamplingMethod sampler,
                 std::optional<int> perturbation) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const EvalRow& r : report.rows) {
    if (!r.error.empty() || r.sampler != sampler) continue;
    if (perturbation && r.perturbation != *perturbation) continue;
    sum += r.rmse;
    ++n;
  }
  if (n == 0) throw ParameterError("no report rows match");
  return sum / static_cast<double>(n);
}

EvalReport run_matrix(const std::vector<Frame>& scenes, const ExperimentConfig& cfg) {
  check_config(cfg);
  if (scenes.empty()) throw ParameterError("dataset is empty");
  std::vector<Task> tasks;
  for (std::size_t s = 0; s < scenes.size(); ++s) {
    for (std::size_t m = 0; m < cfg.samplers.size(); ++m) {
      for (std::size_t r = 0; r < cfg.rates.size(); ++r) {
        for (std::size_t k = 0; k < cfg.seeds.size(); ++k) {
          tasks.push_back({s, s, m, r, k, 0, 0, false});
        }
      }
    }
  }
  return execute(scenes, tasks, cfg, "none");
}

EvalReport temporal_experiment(const std::vector<Frame>& frames, const std::vector<int>& delays,
                               const ExperimentConfig& cfg) {
  check_config(cfg);
  if (delays.empty()) throw ParameterError("no frame delays given");
  const int max_delay = *std::max_element(delays.begin(), delays.end());
  if (*std::min_element(delays.begin(), delays.end()) < 0) {
    throw ParameterError("frame delays must be non-negative");
  }
  if (static_cast<int>(frames.size()) <= max_delay) {
    throw ParameterError("sequence must be longer than the largest delay");
  }
  std::vector<Task> tasks;
  for (std::size_t t = static_cast<std::size_t>(max_delay); t < frames.size(); ++t) {
    for (std::size_t d = 0; d < delays.size(); ++d) {
      for (std::size_t m = 0; m < cfg.samplers.size(); ++m) {
        for (std::size_t r = 0; r < cfg.rates.size(); ++r) {
          for (std::size_t k = 0; k < cfg.seeds.size(); ++k) {
            tasks.push_back({t, t - static_cast<std::size_t>(delays[d]), m, r, k, d, delays[d],
                             false});
          }
        }
      }
    }
  }
  return execute(frames, tasks, cfg, "temporal");
}

EvalReport jitter_experiment(const std::vector<Frame>& scenes, const std::vector<int>& ranges,
                             const ExperimentConfig& cfg) {
  check_config(cfg);
  if (scenes.empty()) throw ParameterError("dataset is empty");
  if (ranges.empty()) throw ParameterError("no jitter ranges given");
  for (int k : ranges) {
    if (k < 0) throw ParameterError("jitter range must be non-negative");
  }
  std::vector<Task> tasks;
  for (std::size_t s = 0; s < scenes.size(); ++s) {
    for (std::size_t j = 0; j < ranges.size(); ++j) {
      for (std::size_t m = 0; m < cfg.samplers.size(); ++m) {
        for (std::size_t r = 0; r < cfg.rates.size(); ++r) {
          for (std::size_t k = 0; k < cfg.seeds.size(); ++k) {
            tasks.push_back({s, s, m, r, k, j, ranges[j], true});
          }
        }
      }
    }
  }
  return execute(scenes, tasks, cfg, "jitter");
}

SampleSet jitter_locations(const SampleSet& samples, int range, int height, int width,
                           std::uint64_t seed) {
  Rng rng(seed);
  SampleSet out;
  out.reserve(samples.size());
  for (const Point2& p : samples) {
    const double dx = uniform(rng, -range, range);
    const double dy = uniform(rng, -range, range);
    out.push_back({std::clamp(p.x + dx, 0.0, width - 1.0), std::clamp(p.y + dy, 0.0, height - 1.0)});
  }
  return out;
}

}  // namespace depthsamp
