#include "hypdim/juliadim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "hypdim/numerics.hpp"

namespace hypdim {

Classification classify(Complex z0, const ModelParams& params, const RadiusConfig& cfg, int n_max,
                        double footprint) {
  if (!(std::abs(z0) > cfg.r())) {
    return {OrbitTag::Escaped, 0, false};
  }
  const double log_r = cfg.log_r();
  const double p = params.p();
  const double l = params.l();
  Complex zeta = principal_log(z0);
  // log |d zeta_n / d z0|
  double log_dzeta = -std::log(std::abs(z0));
  for (int n = 0; n < n_max; ++n) {
    LiftStep step;
    Complex y;
    try {
      y = log_shifted(zeta, l);
      step = log_lift_step(zeta, params);
    } catch (const DomainError&) {
      return {OrbitTag::Escaped, n + 1, true};
    }
    // d u / d zeta = (1+p) y^p z / (z - l)
    const double log_du = std::log1p(p) + p * std::log(std::abs(y)) -
                          std::log(std::abs(1.0 - l * std::exp(-zeta))) + log_dzeta;
    const Complex inner = std::visit([](const auto& s) { return s.inner; }, step);
    // z_n stays in the tract iff |Im u| < pi/2 and Re e^u = log|f_l(z_n)| > log r.
    // First-order distances (in z0) to each condition, scaled by e^{-Re u}
    // so that nothing overflows.
    const double lobe_gap = std::abs(inner.imag()) - 0.5 * kPi;
    const double level_gap = log_r * std::exp(-inner.real()) - std::cos(inner.imag());
    if (lobe_gap >= 0.0 || level_gap >= 0.0) {
      const double dist = std::max(lobe_gap, level_gap) / std::exp(log_du);
      return {dist < footprint ? OrbitTag::Undecided : OrbitTag::Escaped, n + 1, false};
    }
    if (std::holds_alternative<LiftOverflow>(step)) {
      return {OrbitTag::Undecided, n + 1, false};
    }
    zeta = std::get<LiftValue>(step).next;
    log_dzeta = inner.real() + log_du;
    if (zeta.real() <= log_r) {
      return {OrbitTag::Escaped, n + 1, false};
    }
  }
  return {OrbitTag::InJulia, n_max, false};
}

std::uint8_t shade(const Classification& c) {
  switch (c.tag) {
  case OrbitTag::InJulia:
    return 0;
  case OrbitTag::Undecided:
    return 64;
  case OrbitTag::Escaped:
    break;
  }
  return static_cast<std::uint8_t>(std::max(96, 255 - 32 * c.step));
}

Window default_julia_window(const ModelParams& params, const RadiusConfig& cfg) {
  const double q = 1.0 / (1.0 + params.p());
  const double log_log_r = std::log(cfg.log_r());
  if (!(log_log_r > 0.0)) {
    throw DomainError("default_julia_window: needs log r > 1");
  }
  const double x_r = std::exp(std::pow(log_log_r, q));
  const double x_rep = std::exp(std::pow(std::log(kExpThreshold), q));
  const double half = 0.5 * (x_rep - x_r);
  return {params.l() + x_r, params.l() + x_rep, -half, half};
}

namespace {

int persistence(const Classification& c) {
  switch (c.tag) {
  case OrbitTag::InJulia:
    return 1 << 30;
  case OrbitTag::Undecided:
    return 1 << 29;
  case OrbitTag::Escaped:
    break;
  }
  return c.step;
}

} // namespace

std::vector<Classification> classify_window(const Window& window, int width, int height,
                                            const ModelParams& params, const RadiusConfig& cfg,
                                            int n_max, unsigned workers, bool supersample) {
  if (width < 1 || height < 1) {
    throw DomainError("classify_window: empty resolution");
  }
  if (!(window.x_max > window.x_min && window.y_max > window.y_min)) {
    throw DomainError("classify_window: degenerate window");
  }
  std::vector<Classification> out(static_cast<std::size_t>(width) * height);
  const double dx = (window.x_max - window.x_min) / width;
  const double dy = (window.y_max - window.y_min) / height;
  const double footprint = (supersample ? 0.25 : 0.5) * std::hypot(dx, dy);
  num::parallel_for(static_cast<std::size_t>(height), workers, [&](std::size_t row) {
    const double y = window.y_max - (static_cast<double>(row) + 0.5) * dy;
    for (int col = 0; col < width; ++col) {
      const double x = window.x_min + (col + 0.5) * dx;
      if (!supersample) {
        out[row * width + col] = classify({x, y}, params, cfg, n_max, footprint);
        continue;
      }
      Classification best;
      int best_rank = -1;
      for (const double sy : {0.25, -0.25}) {
        for (const double sx : {-0.25, 0.25}) {
          const Classification c = classify({x + sx * dx, y + sy * dy}, params, cfg, n_max, footprint);
          if (persistence(c) > best_rank) {
            best = c;
            best_rank = persistence(c);
          }
        }
      }
      out[row * width + col] = best;
    }
  });
  return out;
}

GrayImage render(const Window& window, int width, int height, const ModelParams& params,
                 const RadiusConfig& cfg, int n_max, unsigned workers, bool supersample) {
  const auto cls = classify_window(window, width, height, params, cfg, n_max, workers, supersample);
  GrayImage img;
  img.width = width;
  img.height = height;
  img.pixels.reserve(cls.size());
  for (const auto& c : cls) {
    img.pixels.push_back(shade(c));
  }
  return img;
}

void write_pgm(const std::string& path, const GrayImage& image) {
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    throw std::runtime_error("write_pgm: cannot open " + path);
  }
  os << "P5\n" << image.width << " " << image.height << "\n255\n";
  os.write(reinterpret_cast<const char*>(image.pixels.data()),
           static_cast<std::streamsize>(image.pixels.size()));
}

BoxFit fit_box_dimension(const std::vector<double>& sizes, const std::vector<double>& counts) {
  if (sizes.size() != counts.size() || sizes.size() < 2) {
    throw DomainError("fit_box_dimension: need matching sizes and counts, at least 2");
  }
  const std::size_t n = sizes.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(counts[i] > 0.0) || !(sizes[i] > 0.0)) {
      throw DomainError("fit_box_dimension: empty occupancy");
    }
    xs[i] = -std::log(sizes[i]);
    ys[i] = std::log(counts[i]);
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double den = n * sxx - sx * sx;
  if (!(den > 0.0)) {
    throw DomainError("fit_box_dimension: sizes must differ");
  }
  BoxFit fit;
  fit.dimension = (n * sxy - sx * sy) / den;
  fit.intercept = (sy - fit.dimension * sx) / n;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = ys[i] - (fit.intercept + fit.dimension * xs[i]);
    ss += e * e;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

std::vector<double> box_counts(const std::vector<std::uint8_t>& mask, int width, int height,
                               const std::vector<int>& box_pixels) {
  if (mask.size() != static_cast<std::size_t>(width) * height) {
    throw DomainError("box_counts: mask size mismatch");
  }
  std::vector<double> out;
  for (const int s : box_pixels) {
    if (s < 1) {
      throw DomainError("box_counts: box size must be positive");
    }
    const int bw = (width + s - 1) / s;
    const int bh = (height + s - 1) / s;
    std::vector<std::uint8_t> hit(static_cast<std::size_t>(bw) * bh, 0);
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        if (mask[static_cast<std::size_t>(y) * width + x]) {
          hit[static_cast<std::size_t>(y / s) * bw + x / s] = 1;
        }
      }
    }
    out.push_back(static_cast<double>(std::count(hit.begin(), hit.end(), 1)));
  }
  return out;
}

BoxCountReport box_dimension(const Window& window, int resolution, const ModelParams& params,
                             const RadiusConfig& cfg, int n_max, const std::vector<int>& box_pixels,
                             unsigned workers, bool supersample) {
  if (box_pixels.size() < 4) {
    throw DomainError("box_dimension: need at least 4 scales");
  }
  const auto [smin, smax] = std::minmax_element(box_pixels.begin(), box_pixels.end());
  if (*smax < 4 * *smin) {
    throw DomainError("box_dimension: scales must span at least 2 octaves");
  }
  const auto cls =
      classify_window(window, resolution, resolution, params, cfg, n_max, workers, supersample);
  std::vector<std::uint8_t> upper(cls.size()), lower(cls.size());
  std::size_t n_und = 0, n_in = 0;
  for (std::size_t i = 0; i < cls.size(); ++i) {
    upper[i] = cls[i].tag != OrbitTag::Escaped;
    lower[i] = cls[i].tag == OrbitTag::InJulia;
    n_und += cls[i].tag == OrbitTag::Undecided;
    n_in += cls[i].tag == OrbitTag::InJulia;
  }
  BoxCountReport rep;
  rep.box_pixels = box_pixels;
  const double pixel = (window.x_max - window.x_min) / resolution;
  for (int s : box_pixels) {
    rep.scales.push_back(s * pixel);
  }
  rep.undecided_fraction = static_cast<double>(n_und) / cls.size();
  rep.in_julia_fraction = static_cast<double>(n_in) / cls.size();
  rep.counts_upper = box_counts(upper, resolution, resolution, box_pixels);
  rep.counts_lower = box_counts(lower, resolution, resolution, box_pixels);
  if (n_und + n_in == 0) {
    throw DomainError("box_dimension: no pixel in the Julia set or undecided");
  }
  rep.upper = fit_box_dimension(rep.scales, rep.counts_upper);
  rep.fitted_dim.method = "boxcount";
  if (n_in > 0) {
    rep.lower = fit_box_dimension(rep.scales, rep.counts_lower);
  }
  const double up = rep.upper.dimension;
  const double lo = rep.lower ? rep.lower->dimension : up;
  rep.fitted_dim.lo = std::min(lo, up);
  rep.fitted_dim.hi = std::max(lo, up);
  rep.fitted_dim.value = 0.5 * (lo + up);
  rep.fitted_dim.residual = std::max(rep.upper.residual, rep.lower ? rep.lower->residual : 0.0);
  return rep;
}

} // namespace hypdim
