// udpx/tests/support/gradcheck.h

// Copyright 2026  The udpx Authors
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

// Central finite-difference gradient checking.

#ifndef UDPX_TESTS_SUPPORT_GRADCHECK_H_
#define UDPX_TESTS_SUPPORT_GRADCHECK_H_

#include <functional>
#include <string>
#include <vector>

#include "udpx/autodiff.h"

namespace udpx::testing {

struct GradCheckResult {
  double max_rel_error = 0;
  std::string worst;  // "param[index]" of the largest error
  double worst_analytic = 0;
  double worst_numeric = 0;
  size_t checked = 0;
};

// Compares backprop against (f(x+eps) - f(x-eps)) / 2eps for every entry of
// every parameter. The relative error divides by max(|a|, |n|, floor) so
// entries that are zero on both sides do not divide by zero.
GradCheckResult CheckGradients(const std::function<Value()>& loss,
                               const std::vector<Value>& params,
                               double eps = 1e-5, double floor = 1e-6);

}  // namespace udpx::testing

#endif  // UDPX_TESTS_SUPPORT_GRADCHECK_H_
