#pragma once

#include <Eigen/Dense>

#include "tractalign/errors.hpp"

namespace tractalign {

using Vec3 = Eigen::Vector3d;
using Points3 = Eigen::Matrix3Xd;  // one column per grid sample
using Rotation3 = Eigen::Matrix3d;

// Open curve in 3-space, sampled at T ordered points. Spatial units are
// whatever the source data uses; the SRVF transform removes them.
struct Fiber {
    Points3 points;

    int samples() const { return static_cast<int>(points.cols()); }
    double length() const;
    Vec3 centroid() const;
    Fiber reversed() const;
};

// Square-root velocity representation on the uniform grid over [0,1].
// Valid values satisfy the unit-norm constraint |<q,q>| = 1 to 1e-9;
// every constructor in this library enforces it.
struct Srvf {
    Points3 values;

    int samples() const { return static_cast<int>(values.cols()); }
};

// Monotone reparameterization of [0,1] with fixed endpoints, stored as
// grid values gamma(t_j).
struct Diffeo {
    Eigen::VectorXd values;

    int samples() const { return static_cast<int>(values.size()); }
    static Diffeo identity(int T);
};

// Uniform-grid spacing and trapezoidal quadrature weights for T samples.
double grid_step(int T);
Eigen::VectorXd quad_weights(int T);

// Resample to exactly T points uniformly spaced in arc length.
// Endpoints are preserved. Throws DegenerateFiber on zero arc length.
Fiber resample(const Fiber& fiber, int T);

// q = df/dt / sqrt(||df/dt||) pointwise, then one global rescale to unit
// L2 norm. Derivatives are central differences interiorly and one-sided
// second-order at the endpoints. Samples with ||df/dt|| < 1e-12 map to
// the zero vector.
Srvf to_srvf(const Fiber& fiber);

// Inverse map f(t) = origin + scale * integral of q||q||. The integrator
// is the exact discrete inverse of to_srvf's difference scheme, so
// from_srvf(to_srvf(f)) reproduces f up to translation and global scale
// at machine precision.
Fiber from_srvf(const Srvf& q, const Vec3& origin = Vec3::Zero(), double scale = 1.0);

// Trapezoidal discretization of the L2 inner product. Throws GridMismatch.
double inner(const Srvf& q1, const Srvf& q2);
double srvf_distance(const Srvf& q1, const Srvf& q2);

// Same quadrature on raw sample blocks (tangent vectors, basis elements).
double l2_inner(const Points3& a, const Points3& b);
double l2_norm(const Points3& a);

// Group action sqrt(gamma') * q(gamma), renormalized to unit norm (the
// action is norm-preserving in the continuum; renormalization corrects
// discretization error only). Throws NonMonotoneGamma.
Srvf apply_gamma(const Srvf& q, const Diffeo& gamma);

// Same action on an arbitrary function of t (tangent vectors, basis
// elements). No renormalization.
Points3 warp_values(const Points3& values, const Diffeo& gamma);

// Plain composition f(gamma(t)) by linear interpolation, for point data
// rather than SRVFs.
Fiber reparameterize(const Fiber& fiber, const Diffeo& gamma);

// Optimal rotation argmin_{R in SO(3)} ||q_ref - R q|| by SVD of the
// quadrature-weighted cross-covariance. Always returns det +1.
Rotation3 kabsch_rotation(const Srvf& q_ref, const Srvf& q);

struct GammaResult {
    Diffeo gamma;
    double distance;  // achieved L2 distance ||q_ref - sqrt(g') q(g)||
};

// Dynamic programming over the monotone lattice with coprime slope steps
// (di, dj) <= 3, i.e. slopes in {1/3 .. 3}. The returned gamma is linear
// between visited lattice nodes. Throws GridMismatch.
GammaResult optimal_gamma(const Srvf& q_ref, const Srvf& q);

struct PairAlignment {
    Srvf aligned;
    Rotation3 rotation;
    Diffeo gamma;
    double distance;
    int rounds;
};

// Alternates kabsch_rotation and optimal_gamma, polishing each DP warp
// with monotone smoothing when that lowers the true objective. The
// objective is non-increasing per round; a round that fails to improve by
// 1e-8 ends the iteration.
PairAlignment align_pair(const Srvf& q_ref, const Srvf& q, int iters = 3);

// Streamline traversal direction is arbitrary; flip if reversing brings
// the endpoints closer to the reference fiber's endpoints.
bool should_flip(const Fiber& fiber, const Fiber& reference);
Fiber oriented_toward(const Fiber& fiber, const Fiber& reference);

// Integral of (gamma(t) - t)^2, the distance of a warp from identity.
double gamma_identity_deviation(const Diffeo& gamma);

namespace detail {
void check_monotone(const Diffeo& gamma);
Eigen::VectorXd gamma_derivative(const Diffeo& gamma);
Points3 derivative(const Points3& pts);
Srvf normalize_srvf(Points3 values);
// Coordinate-descent polish of the warp objective, used by align_pair on
// top of the lattice solution.
Diffeo refine_gamma(const Srvf& q_ref, const Srvf& q, const Diffeo& start, int sweeps_per_level = 10);
}  // namespace detail

}  // namespace tractalign
