// Copyright 2026 The crymodal Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "crymodal/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "crymodal/errors.hpp"

namespace crymodal::dsp {

double sinc_at(std::span<const double> x, double pos, int half) {
  const auto i0 = static_cast<long>(std::floor(pos));
  const auto n = static_cast<long>(x.size());
  double acc = 0.0;
  for (long k = i0 - half + 1; k <= i0 + half; ++k) {
    if (k < 0 || k >= n) continue;
    const double d = pos - static_cast<double>(k);
    const double w = 0.5 + 0.5 * std::cos(std::numbers::pi * d / (half + 0.5));
    const double s = d == 0.0 ? 1.0 : std::sin(std::numbers::pi * d) / (std::numbers::pi * d);
    acc += x[static_cast<std::size_t>(k)] * s * w;
  }
  return acc;
}

Extremum refine_extremum(std::span<const double> x, long i, bool maximum, int half) {
  const double sign = maximum ? 1.0 : -1.0;
  auto f = [&](double q) { return sign * sinc_at(x, q, half); };
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = static_cast<double>(i) - 1.0;
  double b = static_cast<double>(i) + 1.0;
  double c = b - gr * (b - a);
  double d = a + gr * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > 1e-4) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
    }
  }
  const double q = 0.5 * (a + b);
  return {q, sign * f(q)};
}

double mean(std::span<const double> v) {
  if (v.empty()) throw InsufficientDataError("mean of empty sequence");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

namespace {
double sum_sq_dev(std::span<const double> v) {
  const double m = mean(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return acc;
}
}  // namespace

double sample_std(std::span<const double> v) {
  if (v.size() < 2) throw InsufficientDataError("sample std needs two values");
  return std::sqrt(sum_sq_dev(v) / static_cast<double>(v.size() - 1));
}

double population_std(std::span<const double> v) {
  return std::sqrt(sum_sq_dev(v) / static_cast<double>(v.size()));
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw InsufficientDataError("quantile of empty sequence");
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

std::vector<double> iqr_filter(std::span<const double> v, double fence) {
  if (v.empty()) return {};
  std::vector<double> copy(v.begin(), v.end());
  const double q1 = quantile(copy, 0.25);
  const double q3 = quantile(copy, 0.75);
  // The floor keeps rounding noise from splitting a constant series.
  const double margin = std::max(fence * (q3 - q1), 1e-9 * std::max(std::abs(q1), std::abs(q3)));
  std::vector<double> out;
  out.reserve(v.size());
  for (double x : v)
    if (x >= q1 - margin && x <= q3 + margin) out.push_back(x);
  return out;
}

std::vector<double> smooth3(std::span<const double> v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = std::min(v.size(), i + 2);
    double acc = 0.0;
    for (std::size_t j = lo; j < hi; ++j) acc += v[j];
    out[i] = acc / static_cast<double>(hi - lo);
  }
  return out;
}

}  // namespace crymodal::dsp
