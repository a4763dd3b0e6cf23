#include "depthsamp/reconstruct.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <limits>

#include "depthsamp/errors.hpp"

namespace depthsamp {

namespace {

struct SparseSample {
  int x;
  int y;
  double depth;
};

std::vector<SparseSample> collect_samples(const DepthMap& sparse) {
  std::vector<SparseSample> out;
  for (int y = 0; y < sparse.height(); ++y) {
    for (int x = 0; x < sparse.width(); ++x) {
      if (sparse.valid(x, y)) out.push_back({x, y, sparse.depth(x, y)});
    }
  }
  if (out.empty()) throw ParameterError("reconstruction needs at least one valid sample");
  return out;
}

// Uniform bucket grid over sample positions. Bucket lists keep scan order.
class SampleGrid {
 public:
  SampleGrid(const std::vector<SparseSample>& samples, int width, int height, double cell)
      : cell_(std::max(cell, 1.0)),
        cols_(static_cast<int>(width / cell_) + 1),
        rows_(static_cast<int>(height / cell_) + 1),
        buckets_(static_cast<std::size_t>(cols_) * rows_) {
    for (std::size_t i = 0; i < samples.size(); ++i) {
      buckets_[static_cast<std::size_t>(by(samples[i].y)) * cols_ + bx(samples[i].x)]
          .push_back(static_cast<int>(i));
    }
  }

  int bx(double x) const { return std::clamp(static_cast<int>(x / cell_), 0, cols_ - 1); }
  int by(double y) const { return std::clamp(static_cast<int>(y / cell_), 0, rows_ - 1); }
  int cols() const { return cols_; }
  int rows() const { return rows_; }
  double cell() const { return cell_; }
  const std::vector<int>& bucket(int x, int y) const {
    return buckets_[static_cast<std::size_t>(y) * cols_ + x];
  }

 private:
  double cell_;
  int cols_;
  int rows_;
  std::vector<std::vector<int>> buckets_;
};

// Index of the nearest sample to (x, y); ties go to the smaller index.
int nearest_sample(const SampleGrid& grid, const std::vector<SparseSample>& samples,
                   int x, int y) {
  const int cx = grid.bx(x);
  const int cy = grid.by(y);
  double best = std::numeric_limits<double>::infinity();
  int best_i = -1;
  const int max_ring = std::max(grid.cols(), grid.rows());
  for (int r = 0; r <= max_ring; ++r) {
    for (int yy = cy - r; yy <= cy + r; ++yy) {
      if (yy < 0 || yy >= grid.rows()) continue;
      for (int xx = cx - r; xx <= cx + r; ++xx) {
        if (xx < 0 || xx >= grid.cols()) continue;
        if (std::max(std::abs(xx - cx), std::abs(yy - cy)) != r) continue;
        for (int i : grid.bucket(xx, yy)) {
          const double dx = samples[static_cast<std::size_t>(i)].x - x;
          const double dy = samples[static_cast<std::size_t>(i)].y - y;
          const double d = dx * dx + dy * dy;
          if (d < best || (d == best && i < best_i)) {
            best = d;
            best_i = i;
          }
        }
      }
    }
    // Samples in later rings are more than r cells away.
    const double bound = r * grid.cell();
    if (best_i >= 0 && best <= bound * bound) break;
  }
  return best_i;
}

double lab_dist2(const Lab& p, const Lab& q) {
  const double dl = p.L - q.L;
  const double da = p.a - q.a;
  const double db = p.b - q.b;
  return dl * dl + da * da + db * db;
}

}  // namespace

AffinityGraph build_affinity(const LabImage& lab, double sigma_c) {
  if (!(sigma_c > 0.0)) throw ParameterError("sigma_c must be positive");
  AffinityGraph g;
  g.width = lab.width();
  g.height = lab.height();
  const std::size_t n = lab.size();
  g.count.assign(n, 0);
  g.neighbor.resize(n);
  g.weight.resize(n);
  g.affinity.resize(n);
  g.degree.assign(n, 0.0);
  const double inv = 1.0 / (2.0 * sigma_c * sigma_c);
  for (int y = 0; y < g.height; ++y) {
    for (int x = 0; x < g.width; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * g.width + x;
      int k = 0;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const int nx = x + dx;
          const int ny = y + dy;
          if (nx < 0 || ny < 0 || nx >= g.width || ny >= g.height) continue;
          const std::size_t j = static_cast<std::size_t>(ny) * g.width + nx;
          // Floored so that far-apart colors still give a positive weight.
          const double a = std::max(std::exp(-lab_dist2(lab[i], lab[j]) * inv),
                                    std::numeric_limits<double>::min());
          g.neighbor[i][k] = static_cast<int>(j);
          g.affinity[i][k] = a;
          g.degree[i] += a;
          ++k;
        }
      }
      g.count[i] = static_cast<std::uint8_t>(k);
      for (int t = 0; t < k; ++t) {
        g.weight[i][t] = g.affinity[i][t] / g.degree[i];
      }
    }
  }
  return g;
}

ColorizationResult colorization_reconstruct(const LabImage& lab, const DepthMap& sparse,
                                            const SolverConfig& cfg) {
  if (lab.width() != sparse.width() || lab.height() != sparse.height()) {
    throw ParameterError("image and sparse depth dimensions differ");
  }
  if (!(cfg.tol > 0.0) || cfg.max_iters < 1) {
    throw ParameterError("solver needs tol > 0 and max_iters >= 1");
  }
  const std::vector<SparseSample> samples = collect_samples(sparse);
  const AffinityGraph g = build_affinity(lab, cfg.sigma_c);
  const DepthMap guess = nn_reconstruct(sparse);

  const std::size_t n = sparse.size();
  std::vector<int> unknown_id(n, -1);
  int unknowns = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!sparse.valid(i)) unknown_id[i] = unknowns++;
  }

  ColorizationResult result{sparse, true, 0, 0.0};
  if (unknowns == 0) return result;

  // (D - K) restricted to the unknowns, symmetrically scaled by D^-1/2 so the
  // system has a unit diagonal; known neighbours move to the rhs.
  Eigen::VectorXd scale(unknowns);
  for (std::size_t i = 0; i < n; ++i) {
    if (unknown_id[i] >= 0) scale[unknown_id[i]] = 1.0 / std::sqrt(g.degree[i]);
  }
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(unknowns) * 9);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(unknowns);
  Eigen::VectorXd x0(unknowns);
  for (std::size_t i = 0; i < n; ++i) {
    const int row = unknown_id[i];
    if (row < 0) continue;
    triplets.emplace_back(row, row, 1.0);
    for (int k = 0; k < g.count[i]; ++k) {
      const auto j = static_cast<std::size_t>(g.neighbor[i][k]);
      if (unknown_id[j] >= 0) {
        triplets.emplace_back(row, unknown_id[j],
                              -g.affinity[i][k] * scale[row] * scale[unknown_id[j]]);
      } else {
        rhs[row] += g.affinity[i][k] * sparse.depth(j);
      }
    }
    rhs[row] *= scale[row];
    x0[row] = guess.depth(i) / scale[row];
  }
  Eigen::SparseMatrix<double> system(unknowns, unknowns);
  system.setFromTriplets(triplets.begin(), triplets.end());

  // Stopping is judged on the row-normalized residual
  // |(I - W)_uu u - W_uk k| / |W_uk k|, i.e. the objective being minimized.
  // The scaled residual CG tracks can be much smaller than that on graphs
  // with very weak edges, so CG restarts with a tighter internal tolerance
  // until the row-normalized test passes or the iteration budget runs out.
  auto row_residual = [&](const Eigen::VectorXd& y) {
    const Eigen::VectorXd r = (system * y - rhs).cwiseProduct(scale);
    const double b = rhs.cwiseProduct(scale).norm();
    return b > 0.0 ? r.norm() / b : r.norm();
  };
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
  cg.compute(system);
  Eigen::VectorXd y = x0;
  double inner_tol = cfg.tol;
  int iterations = 0;
  double residual = row_residual(y);
  while (residual > cfg.tol && iterations < cfg.max_iters) {
    cg.setTolerance(inner_tol);
    cg.setMaxIterations(cfg.max_iters - iterations);
    y = cg.solveWithGuess(rhs, y);
    iterations += static_cast<int>(cg.iterations());
    residual = row_residual(y);
    if (cg.info() == Eigen::NoConvergence || inner_tol < 1e-15) break;
    inner_tol *= 1e-2;
  }

  // The exact solution lies within the sample range, so projecting onto it
  // only removes error left by the iterative solve.
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const SparseSample& s : samples) {
    lo = std::min(lo, s.depth);
    hi = std::max(hi, s.depth);
  }
  for (int row = 0; row < unknowns; ++row) {
    y[row] = std::clamp(y[row] * scale[row], lo, hi) / scale[row];
  }
  residual = row_residual(y);
  for (std::size_t i = 0; i < n; ++i) {
    const int row = unknown_id[i];
    if (row >= 0) result.depth.set(i, y[row] * scale[row]);
  }
  result.relative_residual = residual;
  result.iterations = iterations;
  result.converged = residual <= cfg.tol;
  return result;
}

DepthMap nn_reconstruct(const DepthMap& sparse) {
  const std::vector<SparseSample> samples = collect_samples(sparse);
  const double spacing =
      std::sqrt(static_cast<double>(sparse.size()) / static_cast<double>(samples.size()));
  const SampleGrid grid(samples, sparse.width(), sparse.height(), spacing);
  DepthMap out(sparse.width(), sparse.height());
  for (int y = 0; y < sparse.height(); ++y) {
    for (int x = 0; x < sparse.width(); ++x) {
      const int i = nearest_sample(grid, samples, x, y);
      out.set(x, y, samples[static_cast<std::size_t>(i)].depth);
    }
  }
  return out;
}

DepthMap bilateral_reconstruct(const LabImage& lab, const DepthMap& sparse, double sigma_s,
                               double sigma_c, double radius) {
  if (lab.width() != sparse.width() || lab.height() != sparse.height()) {
    throw ParameterError("image and sparse depth dimensions differ");
  }
  if (!(sigma_s > 0.0) || !(sigma_c > 0.0) || !(radius >= 0.0)) {
    throw ParameterError("bilateral filter needs sigma_s, sigma_c > 0 and radius >= 0");
  }
  const std::vector<SparseSample> samples = collect_samples(sparse);
  const SampleGrid grid(samples, sparse.width(), sparse.height(), std::max(radius, 1.0));
  const double inv_s = 1.0 / (2.0 * sigma_s * sigma_s);
  const double inv_c = 1.0 / (2.0 * sigma_c * sigma_c);
  const double r2 = radius * radius;

  DepthMap out(sparse.width(), sparse.height());
  std::vector<std::size_t> fallback;
  for (int y = 0; y < sparse.height(); ++y) {
    for (int x = 0; x < sparse.width(); ++x) {
      const Lab& fp = lab.at(x, y);
      double wsum = 0.0;
      double dsum = 0.0;
      const int cx = grid.bx(x);
      const int cy = grid.by(y);
      for (int yy = std::max(cy - 1, 0); yy <= std::min(cy + 1, grid.rows() - 1); ++yy) {
        for (int xx = std::max(cx - 1, 0); xx <= std::min(cx + 1, grid.cols() - 1); ++xx) {
          for (int i : grid.bucket(xx, yy)) {
            const SparseSample& s = samples[static_cast<std::size_t>(i)];
            const double d2 = static_cast<double>((s.x - x) * (s.x - x) + (s.y - y) * (s.y - y));
            if (d2 > r2) continue;
            const double w = std::exp(-d2 * inv_s - lab_dist2(fp, lab.at(s.x, s.y)) * inv_c);
            wsum += w;
            dsum += w * s.depth;
          }
        }
      }
      if (wsum > 0.0) {
        out.set(x, y, dsum / wsum);
      } else {
        fallback.push_back(static_cast<std::size_t>(y) * sparse.width() + x);
      }
    }
  }
  if (!fallback.empty()) {
    const DepthMap nn = nn_reconstruct(sparse);
    for (std::size_t i : fallback) out.set(i, nn.depth(i));
  }
  return out;
}

}  // namespace depthsamp
