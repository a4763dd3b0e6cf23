#include "depthsamp/superpixel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "depthsamp/errors.hpp"

namespace depthsamp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double lab_dist(const Lab& p, const Lab& q) {
  const double dl = p.L - q.L;
  const double da = p.a - q.a;
  const double db = p.b - q.b;
  return std::sqrt(dl * dl + da * da + db * db);
}

// Forward-difference Lab gradient magnitude; differences past the border
// count as zero.
double lab_gradient(const LabImage& lab, int x, int y) {
  double g2 = 0.0;
  if (x + 1 < lab.width()) {
    const double d = lab_dist(lab.at(x + 1, y), lab.at(x, y));
    g2 += d * d;
  }
  if (y + 1 < lab.height()) {
    const double d = lab_dist(lab.at(x, y + 1), lab.at(x, y));
    g2 += d * d;
  }
  return std::sqrt(g2);
}

// Assigns each pixel to the closest seed among those whose 2S window covers
// it. Pixels covered by no window fall back to the closest seed overall.
void assign(Segmentation& seg, const LabImage& lab, double m) {
  const int w = seg.width;
  const int h = seg.height;
  const double s = seg.step;
  std::vector<double> best(static_cast<std::size_t>(w) * h, kInf);
  for (std::size_t k = 0; k < seg.seeds.size(); ++k) {
    const SuperpixelSeed& seed = seg.seeds[k];
    const int x0 = std::max(0, static_cast<int>(std::ceil(seed.position.x - s)));
    const int x1 = std::min(w - 1, static_cast<int>(std::floor(seed.position.x + s)));
    const int y0 = std::max(0, static_cast<int>(std::ceil(seed.position.y - s)));
    const int y1 = std::min(h - 1, static_cast<int>(std::floor(seed.position.y + s)));
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const std::size_t i = static_cast<std::size_t>(y) * w + x;
        const double d = slic_distance(lab[i], x, y, seed, m, s);
        if (d < best[i]) {
          best[i] = d;
          seg.labels[i] = static_cast<int>(k);
        }
      }
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      if (best[i] < kInf) continue;
      for (std::size_t k = 0; k < seg.seeds.size(); ++k) {
        const double d = slic_distance(lab[i], x, y, seg.seeds[k], m, s);
        if (d < best[i]) {
          best[i] = d;
          seg.labels[i] = static_cast<int>(k);
        }
      }
    }
  }
}

// Seeds move to member means; empty superpixels keep their seed.
void update_seeds(Segmentation& seg, const LabImage& lab) {
  const std::size_t n = seg.seeds.size();
  std::vector<double> sum(5 * n, 0.0);
  std::vector<std::size_t> count(n, 0);
  for (int y = 0; y < seg.height; ++y) {
    for (int x = 0; x < seg.width; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * seg.width + x;
      const auto k = static_cast<std::size_t>(seg.labels[i]);
      sum[5 * k] += lab[i].L;
      sum[5 * k + 1] += lab[i].a;
      sum[5 * k + 2] += lab[i].b;
      sum[5 * k + 3] += x;
      sum[5 * k + 4] += y;
      ++count[k];
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (count[k] == 0) continue;
    const double c = static_cast<double>(count[k]);
    seg.seeds[k].color = {sum[5 * k] / c, sum[5 * k + 1] / c, sum[5 * k + 2] / c};
    seg.seeds[k].position = {sum[5 * k + 3] / c, sum[5 * k + 4] / c};
  }
}

// Superpixels left without pixels take the pixel nearest their seed from a
// superpixel that can spare one.
void fill_empty(Segmentation& seg) {
  std::vector<std::size_t> count(seg.seeds.size(), 0);
  for (int l : seg.labels) ++count[static_cast<std::size_t>(l)];
  for (std::size_t k = 0; k < seg.seeds.size(); ++k) {
    if (count[k] != 0) continue;
    const Point2 p = seg.seeds[k].position;
    double best = kInf;
    std::size_t best_i = 0;
    for (int y = 0; y < seg.height; ++y) {
      for (int x = 0; x < seg.width; ++x) {
        const std::size_t i = static_cast<std::size_t>(y) * seg.width + x;
        if (count[static_cast<std::size_t>(seg.labels[i])] < 2) continue;
        const double d = (x - p.x) * (x - p.x) + (y - p.y) * (y - p.y);
        if (d < best) {
          best = d;
          best_i = i;
        }
      }
    }
    if (best == kInf) continue;  // more superpixels than pixels
    --count[static_cast<std::size_t>(seg.labels[best_i])];
    seg.labels[best_i] = static_cast<int>(k);
    count[k] = 1;
  }
}

// Seed indices in a uniform bucket grid, for nearest-seed queries.
class SeedIndex {
 public:
  SeedIndex(const std::vector<SuperpixelSeed>& seeds, int width, int height,
            double cell)
      : seeds_(seeds),
        cell_(std::max(cell, 1.0)),
        cols_(static_cast<int>(width / cell_) + 1),
        rows_(static_cast<int>(height / cell_) + 1),
        buckets_(static_cast<std::size_t>(cols_) * rows_) {
    for (std::size_t k = 0; k < seeds.size(); ++k) {
      buckets_[bucket(seeds[k].position.x, seeds[k].position.y)].push_back(
          static_cast<int>(k));
    }
  }

  // The `want` seeds closest to (x, y) other than `skip`, nearest first,
  // ties by smaller id.
  std::vector<int> nearest(double x, double y, std::size_t want, int skip) const {
    std::vector<std::pair<double, int>> found;
    const int cx = std::clamp(static_cast<int>(x / cell_), 0, cols_ - 1);
    const int cy = std::clamp(static_cast<int>(y / cell_), 0, rows_ - 1);
    const int max_ring = std::max(cols_, rows_);
    for (int r = 0; r <= max_ring; ++r) {
      for (int by = cy - r; by <= cy + r; ++by) {
        if (by < 0 || by >= rows_) continue;
        for (int bx = cx - r; bx <= cx + r; ++bx) {
          if (bx < 0 || bx >= cols_) continue;
          if (std::max(std::abs(bx - cx), std::abs(by - cy)) != r) continue;
          for (int k : buckets_[static_cast<std::size_t>(by) * cols_ + bx]) {
            if (k == skip) continue;
            const Point2& p = seeds_[static_cast<std::size_t>(k)].position;
            found.emplace_back((p.x - x) * (p.x - x) + (p.y - y) * (p.y - y), k);
          }
        }
      }
      if (found.size() >= want) {
        std::sort(found.begin(), found.end());
        // Anything in ring r+1 or beyond is at least r cells away.
        const double bound = r * cell_;
        if (found[want - 1].first <= bound * bound) break;
      }
    }
    std::sort(found.begin(), found.end());
    std::vector<int> out;
    for (std::size_t i = 0; i < found.size() && i < want; ++i) {
      out.push_back(found[i].second);
    }
    return out;
  }

 private:
  std::size_t bucket(double x, double y) const {
    const int bx = std::clamp(static_cast<int>(x / cell_), 0, cols_ - 1);
    const int by = std::clamp(static_cast<int>(y / cell_), 0, rows_ - 1);
    return static_cast<std::size_t>(by) * cols_ + bx;
  }

  const std::vector<SuperpixelSeed>& seeds_;
  double cell_;
  int cols_;
  int rows_;
  std::vector<std::vector<int>> buckets_;
};

}  // namespace

double slic_distance(const Lab& color, double x, double y,
                     const SuperpixelSeed& seed, double m, double step) {
  const double dx = x - seed.position.x;
  const double dy = y - seed.position.y;
  return lab_dist(color, seed.color) + m * std::sqrt(dx * dx + dy * dy) / step;
}

Segmentation slic_init(const LabImage& lab, std::size_t count, double m) {
  const int w = lab.width();
  const int h = lab.height();
  if (count == 0 || count > lab.size()) {
    throw ParameterError("superpixel count must lie in [1, H*W]");
  }
  Segmentation seg;
  seg.width = w;
  seg.height = h;
  seg.labels.assign(lab.size(), 0);
  seg.step = std::sqrt(static_cast<double>(lab.size()) / static_cast<double>(count));

  const double n = static_cast<double>(count);
  const int rows = std::clamp(static_cast<int>(std::round(std::sqrt(n * h / w))), 1,
                              static_cast<int>(std::min<std::size_t>(h, count)));
  for (int r = 0; r < rows; ++r) {
    const std::size_t begin = count * static_cast<std::size_t>(r) / rows;
    const std::size_t end = count * static_cast<std::size_t>(r + 1) / rows;
    const std::size_t in_row = end - begin;
    const double cy = (r + 0.5) * h / rows - 0.5;
    for (std::size_t j = 0; j < in_row; ++j) {
      const double cx = (static_cast<double>(j) + 0.5) * w / static_cast<double>(in_row) - 0.5;
      int px = std::clamp(round_half_down(cx), 0, w - 1);
      int py = std::clamp(round_half_down(cy), 0, h - 1);
      // Move off edges: lowest gradient in the 3x3 neighborhood, keeping the
      // original position on ties.
      double best = lab_gradient(lab, px, py);
      int bx = px;
      int by = py;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int x = px + dx;
          const int y = py + dy;
          if (x < 0 || y < 0 || x >= w || y >= h) continue;
          const double g = lab_gradient(lab, x, y);
          if (g < best) {
            best = g;
            bx = x;
            by = y;
          }
        }
      }
      seg.seeds.push_back({lab.at(bx, by), {static_cast<double>(bx), static_cast<double>(by)}});
    }
  }
  assign(seg, lab, m);
  return seg;
}

Segmentation slic_iterate(
    Segmentation seg, const LabImage& lab, double m, int iters,
    const std::function<void(const Segmentation&)>& on_iteration) {
  if (!(m > 0.0)) throw ParameterError("compactness m must be positive");
  if (iters < 1) throw ParameterError("SLIC needs at least one iteration");
  if (seg.width != lab.width() || seg.height != lab.height()) {
    throw ParameterError("segmentation and image dimensions differ");
  }
  for (int it = 0; it < iters; ++it) {
    assign(seg, lab, m);
    update_seeds(seg, lab);
    if (on_iteration) on_iteration(seg);
  }
  enforce_connectivity(seg, lab);
  return seg;
}

void enforce_connectivity(Segmentation& seg, const LabImage& lab) {
  const int w = seg.width;
  const int h = seg.height;
  const std::size_t npix = seg.labels.size();
  const std::size_t nsp = seg.seeds.size();

  // 4-connected components in scan order.
  std::vector<int> comp(npix, -1);
  std::vector<int> comp_label;
  std::vector<std::size_t> comp_size;
  std::vector<std::vector<std::size_t>> comp_pixels;
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < npix; ++start) {
    if (comp[start] >= 0) continue;
    const int id = static_cast<int>(comp_label.size());
    const int l = seg.labels[start];
    comp_label.push_back(l);
    std::vector<std::size_t> pixels;
    stack.assign(1, start);
    comp[start] = id;
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      pixels.push_back(i);
      const int x = static_cast<int>(i % w);
      const int y = static_cast<int>(i / w);
      const int nx[4] = {x + 1, x, x - 1, x};
      const int ny[4] = {y, y + 1, y, y - 1};
      for (int k = 0; k < 4; ++k) {
        if (nx[k] < 0 || ny[k] < 0 || nx[k] >= w || ny[k] >= h) continue;
        const std::size_t j = static_cast<std::size_t>(ny[k]) * w + nx[k];
        if (comp[j] < 0 && seg.labels[j] == l) {
          comp[j] = id;
          stack.push_back(j);
        }
      }
    }
    comp_size.push_back(pixels.size());
    comp_pixels.push_back(std::move(pixels));
  }

  // The largest component of each label survives; the rest are orphans.
  std::vector<int> principal(nsp, -1);
  for (std::size_t c = 0; c < comp_label.size(); ++c) {
    auto& p = principal[static_cast<std::size_t>(comp_label[c])];
    if (p < 0 || comp_size[c] > comp_size[static_cast<std::size_t>(p)]) {
      p = static_cast<int>(c);
    }
  }
  std::vector<std::size_t> label_size(nsp, 0);
  std::vector<char> resolved(comp_label.size(), 0);
  for (std::size_t l = 0; l < nsp; ++l) {
    if (principal[l] >= 0) {
      resolved[static_cast<std::size_t>(principal[l])] = 1;
      label_size[l] = comp_size[static_cast<std::size_t>(principal[l])];
    }
  }

  // Orphans merge into the largest adjacent resolved superpixel; repeat until
  // orphans enclosed by other orphans are reached too.
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t c = 0; c < comp_label.size(); ++c) {
      if (resolved[c]) continue;
      int target = -1;
      for (std::size_t i : comp_pixels[c]) {
        const int x = static_cast<int>(i % w);
        const int y = static_cast<int>(i / w);
        const int nx[4] = {x + 1, x, x - 1, x};
        const int ny[4] = {y, y + 1, y, y - 1};
        for (int k = 0; k < 4; ++k) {
          if (nx[k] < 0 || ny[k] < 0 || nx[k] >= w || ny[k] >= h) continue;
          const std::size_t j = static_cast<std::size_t>(ny[k]) * w + nx[k];
          const int cj = comp[j];
          if (cj == static_cast<int>(c) || !resolved[static_cast<std::size_t>(cj)]) {
            continue;
          }
          const int l = seg.labels[j];
          const std::size_t size_l = label_size[static_cast<std::size_t>(l)];
          const std::size_t size_t_ =
              target < 0 ? 0 : label_size[static_cast<std::size_t>(target)];
          if (target < 0 || size_l > size_t_ || (size_l == size_t_ && l < target)) {
            target = l;
          }
        }
      }
      if (target < 0) continue;
      const int target_comp = principal[static_cast<std::size_t>(target)];
      for (std::size_t i : comp_pixels[c]) {
        seg.labels[i] = target;
        comp[i] = target_comp;
      }
      label_size[static_cast<std::size_t>(target)] += comp_pixels[c].size();
      resolved[c] = 1;
      changed = true;
    }
  }

  fill_empty(seg);
  update_seeds(seg, lab);
}

double slic_objective(const Segmentation& seg, const LabImage& lab, double m) {
  double total = 0.0;
  for (int y = 0; y < seg.height; ++y) {
    for (int x = 0; x < seg.width; ++x) {
      const Lab& f = lab.at(x, y);
      double best = kInf;
      for (const SuperpixelSeed& s : seg.seeds) {
        best = std::min(best, slic_distance(f, x, y, s, m, seg.step));
      }
      total += best;
    }
  }
  return total;
}

SoftAssociation soft_association(const Segmentation& seg, const LabImage& lab,
                                 double m, double tau) {
  if (!(tau > 0.0)) throw ParameterError("association temperature must be positive");
  SoftAssociation q;
  q.width = seg.width;
  q.height = seg.height;
  q.num_superpixels = seg.seeds.size();
  q.slots = static_cast<int>(std::min<std::size_t>(9, seg.seeds.size()));
  const std::size_t npix = seg.labels.size();
  q.ids.resize(npix * q.slots);
  q.weights.resize(npix * q.slots);

  const SeedIndex index(seg.seeds, seg.width, seg.height, seg.step);
  std::vector<double> d(static_cast<std::size_t>(q.slots));
  for (int y = 0; y < seg.height; ++y) {
    for (int x = 0; x < seg.width; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * seg.width + x;
      const int own = seg.labels[i];
      int* ids = q.ids.data() + i * q.slots;
      double* wts = q.weights.data() + i * q.slots;
      ids[0] = own;
      const std::vector<int> others =
          index.nearest(x, y, static_cast<std::size_t>(q.slots - 1), own);
      std::copy(others.begin(), others.end(), ids + 1);
      double dmin = kInf;
      for (int k = 0; k < q.slots; ++k) {
        d[k] = slic_distance(lab[i], x, y, seg.seeds[static_cast<std::size_t>(ids[k])], m,
                             seg.step);
        dmin = std::min(dmin, d[k]);
      }
      double total = 0.0;
      for (int k = 0; k < q.slots; ++k) {
        wts[k] = std::exp(-(d[k] - dmin) / tau);
        total += wts[k];
      }
      for (int k = 0; k < q.slots; ++k) wts[k] /= total;
    }
  }
  return q;
}

SoftAssociation hard_association(const Segmentation& seg) {
  SoftAssociation q;
  q.width = seg.width;
  q.height = seg.height;
  q.num_superpixels = seg.seeds.size();
  q.slots = 1;
  q.ids = seg.labels;
  q.weights.assign(seg.labels.size(), 1.0);
  return q;
}

SuperpixelSummary centers(const SoftAssociation& q, const LabImage& lab,
                          const std::vector<SuperpixelSeed>& fallback) {
  const std::size_t n = q.num_superpixels;
  std::vector<double> sum(5 * n, 0.0);
  SuperpixelSummary out;
  out.mass.assign(n, 0.0);
  out.members.assign(n, 0);
  for (int y = 0; y < q.height; ++y) {
    for (int x = 0; x < q.width; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * q.width + x;
      const auto ids = q.ids_of(i);
      const auto wts = q.weights_of(i);
      for (std::size_t k = 0; k < ids.size(); ++k) {
        const double wk = wts[k];
        if (wk == 0.0) continue;
        const auto s = static_cast<std::size_t>(ids[k]);
        sum[5 * s] += wk * lab[i].L;
        sum[5 * s + 1] += wk * lab[i].a;
        sum[5 * s + 2] += wk * lab[i].b;
        sum[5 * s + 3] += wk * x;
        sum[5 * s + 4] += wk * y;
        out.mass[s] += wk;
        ++out.members[s];
      }
    }
  }
  out.color.resize(n);
  out.location.resize(n);
  for (std::size_t s = 0; s < n; ++s) {
    if (out.mass[s] > 0.0) {
      const double w = out.mass[s];
      out.color[s] = {sum[5 * s] / w, sum[5 * s + 1] / w, sum[5 * s + 2] / w};
      out.location[s] = {sum[5 * s + 3] / w, sum[5 * s + 4] / w};
    } else if (s < fallback.size()) {
      out.color[s] = fallback[s].color;
      out.location[s] = fallback[s].position;
    }
  }
  return out;
}

SuperpixelSummary centers(const Segmentation& seg, const LabImage& lab) {
  return centers(hard_association(seg), lab, seg.seeds);
}

double slic_loss(const SoftAssociation& q, const LabImage& lab, double m) {
  const SuperpixelSummary sp = centers(q, lab, {});
  double loss = 0.0;
  for (int y = 0; y < q.height; ++y) {
    for (int x = 0; x < q.width; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * q.width + x;
      const auto ids = q.ids_of(i);
      const auto wts = q.weights_of(i);
      Lab f;
      Point2 c;
      for (std::size_t k = 0; k < ids.size(); ++k) {
        const auto s = static_cast<std::size_t>(ids[k]);
        f.L += sp.color[s].L * wts[k];
        f.a += sp.color[s].a * wts[k];
        f.b += sp.color[s].b * wts[k];
        c.x += sp.location[s].x * wts[k];
        c.y += sp.location[s].y * wts[k];
      }
      loss += lab_dist(lab[i], f) + m * std::hypot(x - c.x, y - c.y);
    }
  }
  return loss;
}

SpsResult sps_run(const RgbImage& img, std::size_t count, const SpsParams& params) {
  const LabImage lab = rgb_to_lab(img);
  Segmentation seg = slic_iterate(slic_init(lab, count, params.m), lab, params.m,
                                  params.iters);
  const SuperpixelSummary sp = centers(seg, lab);

  SpsResult out;
  out.samples.reserve(count);
  for (std::size_t s = 0; s < sp.location.size(); ++s) {
    Point2 l = sp.location[s];
    int px = std::clamp(round_half_down(l.x), 0, seg.width - 1);
    int py = std::clamp(round_half_down(l.y), 0, seg.height - 1);
    if (sp.members[s] > 0 && seg.label(px, py) != static_cast<int>(s)) {
      // Non-convex superpixel: use the member pixel closest to its center.
      double best = kInf;
      for (int y = 0; y < seg.height; ++y) {
        for (int x = 0; x < seg.width; ++x) {
          if (seg.label(x, y) != static_cast<int>(s)) continue;
          const double d = (x - l.x) * (x - l.x) + (y - l.y) * (y - l.y);
          if (d < best) {
            best = d;
            px = x;
            py = y;
          }
        }
      }
      l = {static_cast<double>(px), static_cast<double>(py)};
    }
    out.samples.push_back(l);
  }
  out.segmentation = std::move(seg);
  return out;
}

SampleSet sps_sample(const RgbImage& img, std::size_t count, const SpsParams& params) {
  return sps_run(img, count, params).samples;
}

}  // namespace depthsamp
