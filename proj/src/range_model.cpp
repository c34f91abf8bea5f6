#include "snowsim/range_model.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "snowsim/errors.hpp"

namespace snowsim {
namespace {

// Weighted least squares for y = a + b x on centered abscissae.
LineFit weighted_line(std::span<const double> x, std::span<const double> y,
                      std::span<const double> w, double x_mean) {
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double xc = x[k] - x_mean;
    sw += w[k];
    sx += w[k] * xc;
    sy += w[k] * y[k];
    sxx += w[k] * xc * xc;
    sxy += w[k] * xc * y[k];
  }
  const double det = sw * sxx - sx * sx;
  if (!(std::abs(det) > 0.0) || !std::isfinite(det)) {
    throw EstimationError("degenerate abscissae in linear fit");
  }
  const double b = (sw * sxy - sx * sy) / det;
  const double a_c = (sy - b * sx) / sw;
  return {b, a_c - b * x_mean};
}

}  // namespace

LineFit fit_quantile_line(std::span<const double> x, std::span<const double> y, double quantile,
                          int max_iterations) {
  if (x.size() != y.size() || x.size() < 2) throw EstimationError("need at least two samples");
  if (!(quantile > 0.0 && quantile < 1.0)) throw DomainError("quantile must be in (0, 1)");

  double x_mean = 0.0, y_scale = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    x_mean += x[k];
    y_scale = std::max(y_scale, std::abs(y[k]));
  }
  x_mean /= double(x.size());
  const double floor = 1e-9 * (1.0 + y_scale);

  std::vector<double> w(x.size(), 1.0);
  LineFit fit = weighted_line(x, y, w, x_mean);
  // Start from the least-squares line shifted onto the empirical quantile of
  // its residuals.
  std::vector<double> resid(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) resid[k] = y[k] - (fit.intercept + fit.slope * x[k]);
  const auto nth = resid.begin() + std::ptrdiff_t(quantile * double(resid.size() - 1));
  std::nth_element(resid.begin(), nth, resid.end());
  fit.intercept += *nth;
  for (int it = 0; it < max_iterations; ++it) {
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double r = y[k] - (fit.intercept + fit.slope * x[k]);
      const double asym = r >= 0.0 ? quantile : 1.0 - quantile;
      w[k] = asym / std::max(std::abs(r), floor);
    }
    const LineFit next = weighted_line(x, y, w, x_mean);
    // Compare predictions at the ends of the support rather than raw coefficients.
    const double moved = std::abs(next.intercept - fit.intercept) +
                         std::abs(next.slope - fit.slope) * (1.0 + std::abs(x_mean) * 2.0);
    fit = next;
    if (moved <= 1e-12 * (1.0 + y_scale)) break;
  }
  return fit;
}

PowerNoiseModels estimate_power_and_noise(std::span<const GroundSample> ground,
                                          double upper_quantile, double lower_quantile) {
  if (ground.size() < kMinGroundSamples) {
    throw EstimationError("power/noise estimation needs at least " +
                          std::to_string(kMinGroundSamples) + " ground samples, got " +
                          std::to_string(ground.size()));
  }
  std::vector<double> r, y;
  r.reserve(ground.size());
  y.reserve(ground.size());
  for (const auto& g : ground) {
    const double c = std::cos(g.incidence);
    if (!(c > 0.0)) continue;
    r.push_back(g.range);
    y.push_back(g.intensity / c);
  }
  if (r.size() < kMinGroundSamples) throw EstimationError("too few ground samples with cos(alpha) > 0");
  const auto [lo, hi] = std::minmax_element(r.begin(), r.end());
  const double r_min = *lo, r_max = *hi;
  if (r_max - r_min < kMinGroundRangeSpan) {
    throw EstimationError("ground samples span only " + std::to_string(r_max - r_min) + " m");
  }

  const LineFit up = fit_quantile_line(r, y, upper_quantile);
  const LineFit dn = fit_quantile_line(r, y, lower_quantile);
  PowerNoiseModels out{{up.slope, up.intercept, r_min, r_max}, {dn.slope, dn.intercept, r_min, r_max}};

  // Affine models: checking both ends covers the whole support.
  const double tol = 1e-9 * (1.0 + std::abs(up.intercept) + std::abs(up.slope) * r_max);
  for (double at : {r_min, r_max}) {
    if (out.power(at) + tol < out.noise_floor(at)) {
      throw EstimationError("power model falls below noise floor at R = " + std::to_string(at));
    }
  }
  return out;
}

}  // namespace snowsim
