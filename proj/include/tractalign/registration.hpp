#pragma once

#include <utility>
#include <vector>

#include "tractalign/bundle.hpp"
#include "tractalign/tangent.hpp"

namespace tractalign {

// argmin over SO(N) of ||A2 - O A1||_fro via SVD of A2 A1^T, with the
// smallest-singular-value column flipped when the determinant lands at -1.
// O acts on the left, mixing fibers. Throws ShapeMismatch.
Eigen::MatrixXd procrustes_rotation(const Eigen::MatrixXd& A1, const Eigen::MatrixXd& A2);

struct FiberWeight {
    int index = 0;       // template row the subject fiber feeds most
    double weight = 0.0;
};

struct SoftAlignment {
    double distance = 0.0;     // product-space metric value
    double mean_term = 0.0;    // ||beta_mu^t - aligned subject mean||
    double coeff_term = 0.0;   // ||A^t - O A~||_fro after transport
    Diffeo mean_gamma;         // warp taking the subject mean onto the template mean
    Rotation3 mean_rotation = Rotation3::Identity();
    Eigen::MatrixXd rotation;  // the SO(N) coefficient rotation
    CoeffMatrix transported_A; // subject coefficients in the template basis
    Eigen::MatrixXd template_coeffs;
    std::vector<FiberWeight> correspondence;
    std::vector<Srvf> reconstructed;  // filled by soft_align: rows of O A~ decoded + exp-mapped
};

struct RegistrationOptions {
    int stepwise_k = 0;          // 0 uses the exact closed-form transport
    bool paper_rescale = false;  // stepwise only: rescale to l_w per step
};

// The product-space distance: the subject mean is rotation/warp-aligned to
// the template mean, the subject's tangent vectors are carried along (group
// action, then parallel transport along the aligned mean geodesic) and
// re-encoded in the template basis; the SO(N) Procrustes residual against
// the template coefficients supplies the second term.
std::pair<double, SoftAlignment> bundle_distance(const BundleCode& subject, const BundleCode& tmpl,
                                                 const RegistrationOptions& opts = {});

// bundle_distance plus the reconstruction of the subject in the template
// frame (unit scale, origin at zero; see place_fibers).
SoftAlignment soft_align(const BundleCode& subject, const BundleCode& tmpl,
                         const RegistrationOptions& opts = {});

// Reconstructions carry shape only; anchor row j at the matching frame
// fiber's centroid and length.
std::vector<Fiber> place_fibers(const std::vector<Srvf>& shapes, const Bundle& frame);

struct HardAlignment {
    std::vector<Fiber> warped_fibers;   // subject fibers after per-pair elastic warp
    std::vector<int> pairings;          // subject fiber i -> template fiber
    std::vector<Diffeo> per_pair_gammas;
};

// Pairs each subject fiber with the template fiber nearest in transported
// coefficient space (ties to the lowest index) and elastically aligns each
// pair in full curve space.
HardAlignment hard_align(const SoftAlignment& soft, const Bundle& subject, const Bundle& tmpl);

}  // namespace tractalign
