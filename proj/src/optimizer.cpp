#include "dnp/optimizer.hpp"

#include <cmath>

namespace dnpgcn {

AdamState adam_init(const ParamRefs& params) {
  AdamState s;
  for (const auto& [name, m] : params) {
    s.m.push_back(Matrix::Zero(m->rows(), m->cols()));
    s.v.push_back(Matrix::Zero(m->rows(), m->cols()));
  }
  return s;
}

void adam_step(const ParamRefs& params, const ConstParamRefs& grads, AdamState& state, double lr,
               const AdamConfig& hyper) {
  if (params.size() != grads.size() || params.size() != state.m.size())
    throw Error("optimizer state does not match the parameter list");
  ++state.step;
  const double c1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(state.step));
  for (std::size_t k = 0; k < params.size(); ++k) {
    Matrix& p = *params[k].second;
    const Matrix& g = *grads[k].second;
    if (g.rows() != p.rows() || g.cols() != p.cols() || state.m[k].rows() != p.rows() || state.m[k].cols() != p.cols())
      throw Error("gradient shape mismatch for " + params[k].first);
    state.m[k] = hyper.beta1 * state.m[k] + (1.0 - hyper.beta1) * g;
    state.v[k] = hyper.beta2 * state.v[k] + (1.0 - hyper.beta2) * g.cwiseProduct(g);
    p.array() -= lr * (state.m[k].array() / c1) / ((state.v[k].array() / c2).sqrt() + hyper.eps);
  }
}

double scheduled_lr(double lr0, int epoch) { return lr0 * std::pow(0.5, epoch / 50); }

}  // namespace dnpgcn
