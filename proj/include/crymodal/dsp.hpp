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

#pragma once

#include <span>
#include <vector>

namespace crymodal::dsp {

// Band-limited value of x at fractional index pos, using a raised-cosine
// windowed sinc of 2*half taps. Samples outside x count as zero.
double sinc_at(std::span<const double> x, double pos, int half);

struct Extremum {
  double position;  // fractional sample index
  double value;
};

// Locates the band-limited extremum near integer index i (searching
// [i - 1, i + 1]) by golden-section search on sinc_at.
Extremum refine_extremum(std::span<const double> x, long i, bool maximum, int half = 12);

double mean(std::span<const double> v);
// N - 1 denominator. Requires at least two values.
double sample_std(std::span<const double> v);
// N denominator.
double population_std(std::span<const double> v);

// Linear-interpolation quantile (the common "type 7" definition).
double quantile(std::vector<double> v, double q);

// Values inside [Q1 - fence * IQR, Q3 + fence * IQR], order preserved. The
// fence margin never drops below 1e-9 of the larger quartile magnitude.
std::vector<double> iqr_filter(std::span<const double> v, double fence);

// Three-point moving average; the first and last values average two points.
std::vector<double> smooth3(std::span<const double> v);

}  // namespace crymodal::dsp
