#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tractalign/curve.hpp"

namespace tractalign {

// Element of the tangent space at `base` on the SRVF sphere, i.e.
// |<values, base>| < 1e-6.
struct TangentVector {
    Points3 values;
    Srvf base;

    double norm() const { return l2_norm(values); }
};

// Fourier elements projected to the tangent space at `base` and (by
// default) Gram-Schmidt orthonormalized. Elements whose post-projection
// norm falls under 1e-8 are dropped; `dropped` reports how many.
struct Basis {
    std::vector<Points3> elements;
    Srvf base;
    int requested = 0;
    int dropped = 0;
    bool orthonormal = true;
    std::uint64_t id = 0;

    int size() const { return static_cast<int>(elements.size()); }
};

// N x K coefficients of tangent vectors in a Basis. residuals(i) is the
// norm of the component of vector i outside the basis span.
struct CoeffMatrix {
    Eigen::MatrixXd entries;
    std::uint64_t basis_id = 0;
    Eigen::VectorXd residuals;

    int rows() const { return static_cast<int>(entries.rows()); }
    int cols() const { return static_cast<int>(entries.cols()); }
};

// Inverse of the sphere exponential at `base`. Throws AntipodalPoint when
// <base, q> <= -1 + 1e-9.
TangentVector log_map(const Srvf& base, const Srvf& q);

// exp_base(v) = base cos|v| + (v/|v|) sin|v|, renormalized to the sphere.
// Throws TangencyViolation when |<v, base>| >= 1e-6.
Srvf exp_map(const Srvf& base, const TangentVector& v);

// First K of {per-coordinate constant, sin 2pi m t, cos 2pi m t}, each on
// one coordinate channel, normalized, projected to the tangent space at
// base, then orthonormalized unless `orthonormalize` is false (the
// projected-only variant kept for fidelity experiments).
Basis make_basis(const Srvf& base, int K, bool orthonormalize = true);

// entries(i, k) = <v_i, e_k>. Throws BaseMismatch when a vector is not
// based at basis.base.
CoeffMatrix encode(const std::vector<TangentVector>& vs, const Basis& basis);

// v_i = sum_k entries(i, k) e_k. Throws BaseMismatch on basis id mismatch.
std::vector<TangentVector> decode(const CoeffMatrix& A, const Basis& basis);

struct MeanResult;  // mean.hpp

// The pair (mean SRVF, coefficient matrix) that stands in for a bundle.
struct BundleCode {
    Srvf beta_mu;
    CoeffMatrix A;
    Basis basis;
    std::vector<std::string> fiber_ids;

    int fiber_count() const { return A.rows(); }
};

// Builds the basis at the Karcher mean, log-maps every aligned member and
// encodes the lot.
BundleCode encode_bundle(const MeanResult& mean, int basis_size,
                         std::vector<std::string> fiber_ids = {}, bool orthonormal = true);

}  // namespace tractalign
