#pragma once

#include <cmath>

namespace riskgmm {

template <class MatVec>
double power_iteration(MatVec&& apply, int n, double rtol, int max_iter) {
  // Fixed, non-symmetric start so the result is deterministic and unlikely
  // to be orthogonal to the top eigenvector.
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = 1.0 + 0.01 * static_cast<double>(i % 7);
  v.normalize();
  Vec w(n);
  double lam = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    apply(v, w);
    const double next = v.dot(w);
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    v = w / nw;
    if (it > 0 && std::abs(next - lam) <= rtol * std::abs(next)) return next;
    lam = next;
  }
  return lam;
}

}  // namespace riskgmm
