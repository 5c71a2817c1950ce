#include <cmath>
#include <string>

#include "exset/calibration.hpp"
#include "exset/error.hpp"

namespace exset {

void adam_step(AdamState& s, std::vector<double>& params, const std::vector<double>& grads, double lr) {
  if (grads.size() != params.size()) fail_contract("adam: gradient and parameter sizes differ");
  if (s.m.empty() && s.v.empty()) {
    s.m.assign(params.size(), 0.0);
    s.v.assign(params.size(), 0.0);
  }
  if (s.m.size() != params.size() || s.v.size() != params.size())
    fail_contract("adam: moment sizes differ from parameters");
  for (std::size_t i = 0; i < grads.size(); ++i)
    if (!std::isfinite(grads[i]))
      throw NumericalError("adam: non-finite gradient at coordinate " + std::to_string(i));
  ++s.step;
  const double t = static_cast<double>(s.step);
  const double c1 = 1.0 - std::pow(s.beta1, t), c2 = 1.0 - std::pow(s.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    s.m[i] = s.beta1 * s.m[i] + (1.0 - s.beta1) * grads[i];
    s.v[i] = s.beta2 * s.v[i] + (1.0 - s.beta2) * grads[i] * grads[i];
    params[i] -= lr * (s.m[i] / c1) / (std::sqrt(s.v[i] / c2) + s.eps);
  }
}

}  // namespace exset
