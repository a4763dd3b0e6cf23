#pragma once

// Independent reference implementations used by the unit and acceptance
// tests. They follow the textbook formulas directly and share no code with
// the library beyond the raster types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "depthsamp/imagedata.hpp"
#include "depthsamp/random.hpp"
#include "depthsamp/superpixel.hpp"

namespace depthsamp::oracle {

// Scalar sRGB -> CIELAB, D65 white.
inline Lab lab_from_srgb(double r8, double g8, double b8) {
  auto lin = [](double c) {
    c /= 255.0;
    return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
  };
  const double r = lin(r8), g = lin(g8), b = lin(b8);
  const double X = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
  const double Y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
  const double Z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;
  auto f = [](double t) {
    const double d = 6.0 / 29.0;
    return t > d * d * d ? std::cbrt(t) : t / (3 * d * d) + 4.0 / 29.0;
  };
  const double fx = f(X / 0.95047), fy = f(Y / 1.0), fz = f(Z / 1.08883);
  return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

// Dense association matrix q[p][s] from a SoftAssociation.
inline std::vector<std::vector<double>> dense_q(const SoftAssociation& q) {
  const std::size_t n = static_cast<std::size_t>(q.width) * q.height;
  std::vector<std::vector<double>> out(n, std::vector<double>(q.num_superpixels, 0.0));
  for (std::size_t p = 0; p < n; ++p) {
    for (int k = 0; k < q.slots; ++k) {
      out[p][q.ids[p * q.slots + k]] += q.weights[p * q.slots + k];
    }
  }
  return out;
}

// Reconstruction loss straight from its definition:
//   u_s = sum_p q_s(p) f(p) / sum_p q_s(p),  l_s likewise with c(p),
//   f'(p) = sum_s q_s(p) u_s,  c'(p) = sum_s q_s(p) l_s,
//   L = sum_p |f(p) - f'(p)| + m |c(p) - c'(p)|.
inline double slic_loss(const std::vector<std::vector<double>>& q, const LabImage& lab,
                        double m) {
  const int w = lab.width();
  const std::size_t n = q.size();
  const std::size_t ns = n ? q[0].size() : 0;
  std::vector<double> uL(ns), ua(ns), ub(ns), lx(ns), ly(ns);
  for (std::size_t s = 0; s < ns; ++s) {
    double mass = 0, L = 0, a = 0, b = 0, x = 0, y = 0;
    for (std::size_t p = 0; p < n; ++p) {
      const double qs = q[p][s];
      mass += qs;
      L += qs * lab[p].L;
      a += qs * lab[p].a;
      b += qs * lab[p].b;
      x += qs * static_cast<double>(p % w);
      y += qs * static_cast<double>(p / w);
    }
    if (mass > 0) {
      uL[s] = L / mass;
      ua[s] = a / mass;
      ub[s] = b / mass;
      lx[s] = x / mass;
      ly[s] = y / mass;
    }
  }
  double loss = 0;
  for (std::size_t p = 0; p < n; ++p) {
    double L = 0, a = 0, b = 0, x = 0, y = 0;
    for (std::size_t s = 0; s < ns; ++s) {
      L += q[p][s] * uL[s];
      a += q[p][s] * ua[s];
      b += q[p][s] * ub[s];
      x += q[p][s] * lx[s];
      y += q[p][s] * ly[s];
    }
    const double dc = std::sqrt((lab[p].L - L) * (lab[p].L - L) + (lab[p].a - a) * (lab[p].a - a) +
                                (lab[p].b - b) * (lab[p].b - b));
    const double px = static_cast<double>(p % w), py = static_cast<double>(p / w);
    const double dp = std::sqrt((px - x) * (px - x) + (py - y) * (py - y));
    loss += dc + m * dp;
  }
  return loss;
}

// Gaussian elimination with partial pivoting; a is n x n row-major.
inline std::vector<double> gauss_solve(std::vector<double> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
    }
    if (a[piv * n + c] == 0.0) throw std::runtime_error("singular system");
    if (piv != c) {
      for (std::size_t k = 0; k < n; ++k) std::swap(a[c * n + k], a[piv * n + k]);
      std::swap(b[c], b[piv]);
    }
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r * n + c] / a[c * n + c];
      if (f == 0.0) continue;
      for (std::size_t k = c; k < n; ++k) a[r * n + k] -= f * a[c * n + k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t r = n; r-- > 0;) {
    double s = b[r];
    for (std::size_t k = r + 1; k < n; ++k) s -= a[r * n + k] * x[k];
    x[r] = s / a[r * n + r];
  }
  return x;
}

// Colorization by a dense direct solve of (I - W)_uu u = W_uk k, where W holds
// row-normalized Gaussian color affinities over the 8-neighbourhood.
inline DepthMap colorization_direct(const LabImage& lab, const DepthMap& sparse,
                                    double sigma_c) {
  const int w = lab.width(), h = lab.height();
  const std::size_t n = static_cast<std::size_t>(w) * h;
  std::vector<long> unknown(n, -1);
  std::size_t nu = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!sparse.valid(i)) unknown[i] = static_cast<long>(nu++);
  }
  std::vector<double> a(nu * nu, 0.0), b(nu, 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      if (unknown[i] < 0) continue;
      std::vector<std::pair<std::size_t, double>> nb;
      double total = 0;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (!dx && !dy) continue;
          const int xx = x + dx, yy = y + dy;
          if (xx < 0 || yy < 0 || xx >= w || yy >= h) continue;
          const std::size_t j = static_cast<std::size_t>(yy) * w + xx;
          const double dL = lab[i].L - lab[j].L, da = lab[i].a - lab[j].a,
                       db = lab[i].b - lab[j].b;
          const double aff = std::exp(-(dL * dL + da * da + db * db) / (2 * sigma_c * sigma_c));
          nb.emplace_back(j, aff);
          total += aff;
        }
      }
      const auto r = static_cast<std::size_t>(unknown[i]);
      a[r * nu + r] = 1.0;
      for (auto [j, aff] : nb) {
        const double wij = aff / total;
        if (unknown[j] >= 0) {
          a[r * nu + static_cast<std::size_t>(unknown[j])] -= wij;
        } else {
          b[r] += wij * sparse.depth(j);
        }
      }
    }
  }
  const std::vector<double> u = gauss_solve(a, b);
  DepthMap out(w, h);
  for (std::size_t i = 0; i < n; ++i) {
    out.set(i, unknown[i] < 0 ? sparse.depth(i) : u[static_cast<std::size_t>(unknown[i])]);
  }
  return out;
}

inline LabImage random_lab(int w, int h, Rng& rng, double spread = 60.0) {
  LabImage lab(w, h);
  for (std::size_t i = 0; i < lab.size(); ++i) {
    lab[i] = {uniform(rng, 0.0, 100.0), uniform(rng, -spread, spread),
              uniform(rng, -spread, spread)};
  }
  return lab;
}

}  // namespace depthsamp::oracle
