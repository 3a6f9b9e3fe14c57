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

#ifndef LLSH_ERRORS_H_
#define LLSH_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace llsh {

// Root of the library's exception hierarchy. The CLI maps InvalidArgument to
// exit code 2 when it comes from flag parsing and everything else to 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Singular or near-singular basis handed to lattice construction.
class DegenerateBasis : public Error {
 public:
  using Error::Error;
};

// LLL hit its swap budget without converging.
class ReductionFailure : public Error {
 public:
  using Error::Error;
};

// Monte Carlo estimator saw too many decoder failures.
class EstimationFailed : public Error {
 public:
  using Error::Error;
};

// Not enough usable curve points for an exponent estimate.
class InsufficientData : public Error {
 public:
  using Error::Error;
};

// Quadrature did not reach its accuracy target. Carries the partial value
// (as a natural log) and the relative error estimate reached.
class AccuracyFailure : public Error {
 public:
  AccuracyFailure(const std::string& what, double log_partial, double rel_err)
      : Error(what), log_partial_(log_partial), rel_err_(rel_err) {}
  double log_partial() const { return log_partial_; }
  double rel_err() const { return rel_err_; }

 private:
  double log_partial_;
  double rel_err_;
};

// Synthetic dataset parameters cannot meet the requested separation.
class GenerationFailure : public Error {
 public:
  using Error::Error;
};

// Index construction failed on a specific point.
class BuildFailure : public Error {
 public:
  BuildFailure(const std::string& what, std::size_t point_id)
      : Error(what), point_id_(point_id) {}
  std::size_t point_id() const { return point_id_; }

 private:
  std::size_t point_id_;
};

}  // namespace llsh

#endif  // LLSH_ERRORS_H_
