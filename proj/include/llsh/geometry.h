// Copyright 2026 The llsh Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LLSH_GEOMETRY_H_
#define LLSH_GEOMETRY_H_

namespace llsh::geometry {

// Per-dimension normalization constants.
struct DimensionConstants {
  int k = 0;
  double v_unit = 0.0;         // volume of the unit k-ball
  double log_v_unit = 0.0;     // its natural log
  double tau = 0.0;            // sqrt(k) * v_unit^(1/k)
  double r_unit_volume = 0.0;  // radius of the k-ball of volume 1
};

DimensionConstants dimension_constants(int k);

// log of pi^(k/2) / Gamma(k/2 + 1).
double log_unit_ball_volume(int k);

// Volume of a k-ball of radius r, computed as exp(log V_B + k log r).
// Valid for k up to (at least) 1024; returns 0 or +inf outside the double range.
double ball_volume(int k, double r);
// Natural log of ball_volume; -inf for r = 0.
double log_ball_volume(int k, double r);
// Radius at which a k-ball has the given volume.
double radius_for_volume(int k, double volume);

// Fraction of a k-ball's volume lying beyond the hyperplane at signed
// distance t = t_over_r * r from the center (on the side away from the
// center for t > 0). cap_fraction(k, 0) = 1/2.
double cap_fraction(int k, double t_over_r);

// Volume of the union of two k-balls with radii r1, r2 whose centers are d
// apart. Exact: V1 * cap(-a/r1) + V2 * cap(-(d-a)/r2) where a is the signed
// distance from the first center to the radical plane.
double union_volume(int k, double r1, double r2, double d);
double log_union_volume(int k, double r1, double r2, double d);

}  // namespace llsh::geometry

#endif  // LLSH_GEOMETRY_H_
