// udpx/optimizer.h

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

#ifndef UDPX_OPTIMIZER_H_
#define UDPX_OPTIMIZER_H_

#include <cstdint>
#include <string>
#include <vector>

#include "udpx/autodiff.h"

namespace udpx {

// Named, ordered collection of trainable leaves. Registration order is the
// checkpoint order and the optimizer's moment order.
class ParameterStore {
 public:
  Value Add(const std::string& name, Matrix init);

  const std::vector<Value>& params() const { return params_; }
  size_t size() const { return params_.size(); }
  // Throws std::out_of_range for unknown names.
  const Value& Get(const std::string& name) const;
  void ZeroGrad();

  // Plain copies of the parameter arrays, in registration order.
  std::vector<Matrix> Snapshot() const;
  void Restore(const std::vector<Matrix>& snapshot);

 private:
  std::vector<Value> params_;
};

struct AdamOptions {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.9;
  double epsilon = 1e-8;
  double clip_norm = 5.0;
  double decay = 0.999995;
};

// Raised when a gradient holds NaN; the step is abandoned untouched.
class NonFiniteGradient : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Adam {
 public:
  Adam(const ParameterStore& store, AdamOptions options);

  // Clips the global gradient L2 norm to options.clip_norm, then applies one
  // bias-corrected Adam update. Returns the pre-clip global norm.
  double Step(ParameterStore& store);
  // learning_rate *= decay.
  void DecayLearningRate() { options_.learning_rate *= options_.decay; }

  double learning_rate() const { return options_.learning_rate; }
  int64_t step_count() const { return steps_; }
  const AdamOptions& options() const { return options_; }

 private:
  AdamOptions options_;
  int64_t steps_ = 0;
  std::vector<Matrix> first_;
  std::vector<Matrix> second_;
};

}  // namespace udpx

#endif  // UDPX_OPTIMIZER_H_
