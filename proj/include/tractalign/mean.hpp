#pragma once

#include <vector>

#include "tractalign/curve.hpp"

namespace tractalign {

struct MeanResult {
    Srvf beta_mu;
    std::vector<Srvf> aligned;      // members after their optimal rotation + warp
    std::vector<Diffeo> gammas;
    std::vector<Rotation3> rotations;
    int iterations = 0;
    double final_gradient_norm = 0.0;
    double objective = 0.0;         // (1/N) sum of squared aligned distances
};

// Karcher mean under the rotation- and reparameterization-invariant
// metric. Starts from the normalized extrinsic average, aligns every
// member to the current estimate, steps 0.5 along the averaged log map
// (halving on objective increase) and stops when the average-tangent norm
// drops under tol or max_iters is hit. Convergence failure is reported
// through final_gradient_norm, not an error.
MeanResult karcher_mean(const std::vector<Srvf>& qs, int max_iters = 50, double tol = 1e-6);

}  // namespace tractalign
