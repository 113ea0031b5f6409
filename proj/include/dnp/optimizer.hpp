#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dnp/network.hpp"

namespace dnpgcn {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<Matrix> m, v;
  long step = 0;
};

using ParamRefs = std::vector<std::pair<std::string, Matrix*>>;
using ConstParamRefs = std::vector<std::pair<std::string, const Matrix*>>;

AdamState adam_init(const ParamRefs& params);

/// One bias-corrected Adam update of every tensor in `params`.
void adam_step(const ParamRefs& params, const ConstParamRefs& grads, AdamState& state, double lr,
               const AdamConfig& hyper = {});

/// lr0 halved every 50 epochs (0-based epoch index).
double scheduled_lr(double lr0, int epoch);

}  // namespace dnpgcn
