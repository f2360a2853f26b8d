// Copyright 2026 The ldpfo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Power: posterior mean of the true frequency under a power-law prior
// x^-s and the Gaussian noise model f~_v ~ N(x, sigma).
//
// The prior is supported on [1/n, U] with U = min(1, max f~ + 4 sigma): a
// value held by anyone has frequency at least 1/n, and the cut-off keeps the
// prior normalizable for s >= 1. [1/n, U] is split into `grid_size` equal
// cells, and each cell gets the two-point Gauss rule for the weight x^-s.
// A single centroid per cell is not enough near zero, where the first cell
// is wide compared to sigma and the likelihood tilts across it.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <utility>

#include "absl/strings/str_cat.h"
#include "boost/math/quadrature/gauss.hpp"
#include "postprocess/estimators.h"

namespace ldpfo {
namespace {

// Integral of x^-t over [lo, hi], 0 < lo < hi. Written through expm1 so that
// t near 1 does not cancel.
double PowerIntegral(double lo, double hi, double t) {
  const double one_minus_t = 1.0 - t;
  const double log_ratio = std::log(hi / lo);
  if (std::abs(one_minus_t * log_ratio) < 1e-12) {
    return std::pow(lo, one_minus_t) * log_ratio;
  }
  return std::pow(lo, one_minus_t) * std::expm1(one_minus_t * log_ratio) /
         one_minus_t;
}

struct PriorGrid {
  std::vector<double> log_weight;
  std::vector<double> node;
};

// Moments of t = (x - a) / w, w = b - a, under x^-s on [a, b], scaled by
// 1 / mass. Cells away from zero have a smooth weight and use Gauss-Legendre;
// a cell touching the singular end uses the closed forms.
std::array<double, 4> LocalMoments(double a, double b, double s,
                                   double* mass) {
  const double w = b - a;
  std::array<double, 4> m{};
  if (a < w) {
    std::array<double, 4> raw;
    for (int k = 0; k < 4; ++k) raw[k] = PowerIntegral(a, b, s - k);
    m[0] = raw[0];
    m[1] = raw[1] - a * raw[0];
    m[2] = raw[2] - 2 * a * raw[1] + a * a * raw[0];
    m[3] = raw[3] - 3 * a * raw[2] + 3 * a * a * raw[1] - a * a * a * raw[0];
  } else {
    for (int k = 0; k < 4; ++k) {
      m[k] = boost::math::quadrature::gauss<double, 10>::integrate(
          [&](double x) { return std::pow(x - a, k) * std::pow(x, -s); }, a,
          b);
    }
  }
  *mass = m[0];
  for (int k = 0; k < 4; ++k) m[k] /= *mass * std::pow(w, k);
  return m;
}

PriorGrid BuildPriorGrid(double lo, double hi, size_t cells, double s) {
  PriorGrid grid;
  grid.log_weight.reserve(2 * cells);
  grid.node.reserve(2 * cells);
  const double width = (hi - lo) / static_cast<double>(cells);
  for (size_t j = 0; j < cells; ++j) {
    const double a = lo + width * static_cast<double>(j);
    const double b = j + 1 == cells ? hi : a + width;
    double mass = 0.0;
    const std::array<double, 4> m = LocalMoments(a, b, s, &mass);
    // Monic orthogonal quadratic t^2 + alpha t + beta.
    const double var = m[2] - m[1] * m[1];
    if (!(var > 1e-14)) {
      grid.log_weight.push_back(std::log(mass));
      grid.node.push_back(a + (b - a) * m[1]);
      continue;
    }
    const double alpha = (m[1] * m[2] - m[3]) / var;
    const double beta = -(m[2] + alpha * m[1]);
    const double root = std::sqrt(std::max(alpha * alpha - 4 * beta, 0.0));
    const double t1 = std::clamp(0.5 * (-alpha - root), 0.0, 1.0);
    const double t2 = std::clamp(0.5 * (-alpha + root), 0.0, 1.0);
    const double w2 = std::clamp((m[1] - t1) / (t2 - t1), 0.0, 1.0);
    for (auto [t, share] : {std::pair{t1, 1.0 - w2}, std::pair{t2, w2}}) {
      if (share <= 0.0) continue;
      grid.log_weight.push_back(std::log(mass * share));
      grid.node.push_back(a + (b - a) * t);
    }
  }
  return grid;
}

}  // namespace

size_t DefaultGridSize(int64_t n) {
  return static_cast<size_t>(
      std::ceil(std::sqrt(static_cast<double>(std::max<int64_t>(n, 1)))));
}

absl::StatusOr<PowerPrior> FitPowerPrior(const EstimateVector& est,
                                         double noise_floor,
                                         size_t grid_size) {
  std::vector<double> usable;
  for (double x : est.est) {
    if (x > noise_floor && x > 0.0) usable.push_back(x);
  }
  if (usable.size() < 2) {
    return absl::FailedPreconditionError(absl::StrCat(
        "power-law fit needs at least 2 estimates above the noise floor ",
        noise_floor, ", found ", usable.size()));
  }
  std::sort(usable.begin(), usable.end(), std::greater<>());

  const double m = static_cast<double>(usable.size());
  double mean_x = 0.0, mean_y = 0.0;
  for (size_t i = 0; i < usable.size(); ++i) {
    mean_x += std::log(static_cast<double>(i + 1));
    mean_y += std::log(usable[i]);
  }
  mean_x /= m;
  mean_y /= m;
  double sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < usable.size(); ++i) {
    const double dx = std::log(static_cast<double>(i + 1)) - mean_x;
    sxx += dx * dx;
    sxy += dx * (std::log(usable[i]) - mean_y);
  }

  PowerPrior prior;
  prior.grid_size = grid_size;
  prior.exponent = -sxy / sxx;
  if (prior.exponent < 0.0) {
    prior.exponent = 0.0;
    prior.exponent_clamped = true;
  }
  prior.exponent += 0.0;  // a flat fit yields -0.0
  return prior;
}

absl::StatusOr<ProcessedEstimate> Power(const EstimateVector& est,
                                        const PowerPrior& prior,
                                        const NoiseModel& noise) {
  const double sigma = noise.sigma();
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    return absl::FailedPreconditionError(
        "power needs a positive noise standard deviation");
  }
  if (noise.n < 1) {
    return absl::InvalidArgumentError("power needs a population size n >= 1");
  }
  if (!(prior.exponent >= 0.0) || !std::isfinite(prior.exponent)) {
    return absl::InvalidArgumentError("power-law exponent must be >= 0");
  }
  const size_t cells =
      prior.grid_size > 0 ? prior.grid_size : DefaultGridSize(noise.n);

  double max_est = 0.0;
  for (double x : est.est) max_est = std::max(max_est, x);
  const double hi = std::min(1.0, max_est + 4.0 * sigma);
  // hi >= 4 sigma, which exceeds 1/n unless the budget is enormous.
  const double lo = std::min(1.0 / static_cast<double>(noise.n), 0.5 * hi);
  const PriorGrid grid = BuildPriorGrid(lo, hi, cells, prior.exponent);

  const double inv_two_var = 1.0 / (2.0 * sigma * sigma);
  const size_t nodes = grid.node.size();
  std::vector<double> log_weight(nodes);
  ProcessedEstimate out;
  out.method = Method::kPower;
  out.nonneg_guaranteed = true;
  out.est.resize(est.d());
  for (size_t v = 0; v < est.d(); ++v) {
    const double observed = est.est[v];
    double peak = -std::numeric_limits<double>::infinity();
    for (size_t j = 0; j < nodes; ++j) {
      const double r = observed - grid.node[j];
      log_weight[j] = grid.log_weight[j] - r * r * inv_two_var;
      peak = std::max(peak, log_weight[j]);
    }
    double total = 0.0, first = 0.0;
    for (size_t j = 0; j < nodes; ++j) {
      const double w = std::exp(log_weight[j] - peak);
      total += w;
      first += w * grid.node[j];
    }
    out.est[v] = first / total;
  }
  return out;
}

absl::StatusOr<ProcessedEstimate> PowerNs(const EstimateVector& est,
                                          const PowerPrior& prior,
                                          const NoiseModel& noise) {
  absl::StatusOr<ProcessedEstimate> power = Power(est, prior, noise);
  if (!power.ok()) return power.status();
  SolverResult projected = NormSub(std::move(power->est));
  projected.est.method = Method::kPowerNs;
  return std::move(projected.est);
}

}  // namespace ldpfo
