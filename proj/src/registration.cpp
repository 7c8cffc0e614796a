#include "tractalign/registration.hpp"

#include <cmath>
#include <limits>

#include "tractalign/transport.hpp"

namespace tractalign {

Eigen::MatrixXd procrustes_rotation(const Eigen::MatrixXd& A1, const Eigen::MatrixXd& A2) {
    if (A1.rows() != A2.rows() || A1.cols() != A2.cols())
        throw ShapeMismatch("procrustes_rotation: coefficient shapes differ");
    const Eigen::MatrixXd prod = A2 * A1.transpose();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(prod, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::MatrixXd u = svd.matrixU();
    const Eigen::MatrixXd& v = svd.matrixV();
    if ((u * v.transpose()).determinant() < 0.0) u.col(u.cols() - 1) *= -1.0;
    return u * v.transpose();
}

namespace {

// Carry a tangent vector through the (rotation, warp) group action, then
// pin it back onto the tangent space at the moved base without changing
// its norm. The action is an ambient isometry, so this only corrects
// interpolation drift.
Points3 push_vector(const Points3& v, const Rotation3& rot, const Diffeo& gamma,
                    const Srvf& moved_base) {
    Points3 out = warp_values(rot * v, gamma);
    const double orig = l2_norm(v);
    out -= l2_inner(out, moved_base.values) * moved_base.values;
    const double n = l2_norm(out);
    if (n > 1e-15 && orig > 1e-15) out *= orig / n;
    return out;
}

}  // namespace

std::pair<double, SoftAlignment> bundle_distance(const BundleCode& subject, const BundleCode& tmpl,
                                                 const RegistrationOptions& opts) {
    if (subject.fiber_count() != tmpl.fiber_count())
        throw FiberCountMismatch("bundle_distance: bundles hold different fiber counts");
    if (subject.beta_mu.samples() != tmpl.beta_mu.samples())
        throw GridMismatch("bundle_distance: bundle grids differ");
    if (subject.A.cols() != tmpl.A.cols())
        throw ShapeMismatch("bundle_distance: coefficient widths differ");

    SoftAlignment soft;

    // Mean term: align the subject mean onto the template mean.
    PairAlignment pa = align_pair(tmpl.beta_mu, subject.beta_mu);
    soft.mean_term = pa.distance;
    soft.mean_gamma = pa.gamma;
    soft.mean_rotation = pa.rotation;

    // Subject tangent vectors, carried by the same group action, then
    // parallel transported along the aligned mean geodesic.
    const std::vector<TangentVector> vs = decode(subject.A, subject.basis);
    std::vector<TangentVector> moved;
    moved.reserve(vs.size());
    for (const TangentVector& v : vs)
        moved.push_back(TangentVector{push_vector(v.values, pa.rotation, pa.gamma, pa.aligned), pa.aligned});
    const TransportResult carried =
        opts.stepwise_k > 0
            ? transport_stepwise(pa.aligned, tmpl.beta_mu, moved, opts.stepwise_k, opts.paper_rescale)
            : transport_exact(pa.aligned, tmpl.beta_mu, moved);

    soft.transported_A = encode(carried.vectors, tmpl.basis);
    soft.template_coeffs = tmpl.A.entries;
    soft.rotation = procrustes_rotation(soft.transported_A.entries, tmpl.A.entries);
    soft.coeff_term = (tmpl.A.entries - soft.rotation * soft.transported_A.entries).norm();
    soft.distance = std::sqrt(soft.mean_term * soft.mean_term + soft.coeff_term * soft.coeff_term);

    const int n = subject.fiber_count();
    soft.correspondence.resize(n);
    for (int i = 0; i < n; ++i) {
        int best = 0;
        double best_w = std::abs(soft.rotation(0, i));
        for (int j = 1; j < n; ++j) {
            const double w = std::abs(soft.rotation(j, i));
            if (w > best_w) {
                best_w = w;
                best = j;
            }
        }
        soft.correspondence[i] = FiberWeight{best, soft.rotation(best, i)};
    }
    return {soft.distance, soft};
}

SoftAlignment soft_align(const BundleCode& subject, const BundleCode& tmpl,
                         const RegistrationOptions& opts) {
    SoftAlignment soft = bundle_distance(subject, tmpl, opts).second;
    const Eigen::MatrixXd rotated = soft.rotation * soft.transported_A.entries;
    CoeffMatrix rows{rotated, tmpl.basis.id, Eigen::VectorXd::Zero(rotated.rows())};
    const std::vector<TangentVector> vs = decode(rows, tmpl.basis);
    soft.reconstructed.reserve(vs.size());
    for (const TangentVector& v : vs) soft.reconstructed.push_back(exp_map(tmpl.beta_mu, v));
    return soft;
}

std::vector<Fiber> place_fibers(const std::vector<Srvf>& shapes, const Bundle& frame) {
    if (static_cast<int>(shapes.size()) != frame.fiber_count())
        throw FiberCountMismatch("place_fibers: shape count does not match frame bundle");
    std::vector<Fiber> out;
    out.reserve(shapes.size());
    for (std::size_t j = 0; j < shapes.size(); ++j) {
        const Fiber& anchor = frame.fibers[j];
        Fiber f = from_srvf(shapes[j], Vec3::Zero(), anchor.length());
        f.points.colwise() += anchor.centroid() - f.centroid();
        out.push_back(std::move(f));
    }
    return out;
}

HardAlignment hard_align(const SoftAlignment& soft, const Bundle& subject, const Bundle& tmpl) {
    const int n = subject.fiber_count();
    if (n != tmpl.fiber_count())
        throw FiberCountMismatch("hard_align: bundles hold different fiber counts");
    if (soft.transported_A.rows() != n)
        throw ShapeMismatch("hard_align: soft alignment built from different bundles");

    HardAlignment hard;
    hard.pairings.resize(n);
    hard.warped_fibers.resize(n);
    hard.per_pair_gammas.resize(n);

    std::vector<Srvf> tmpl_q;
    tmpl_q.reserve(n);
    for (const Fiber& f : tmpl.fibers) tmpl_q.push_back(to_srvf(f));

    for (int i = 0; i < n; ++i) {
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (int j = 0; j < n; ++j) {
            const double d =
                (soft.transported_A.entries.row(i) - soft.template_coeffs.row(j)).norm();
            if (d < best_d) {  // strict: ties stay at the lowest index
                best_d = d;
                best = j;
            }
        }
        hard.pairings[i] = best;

        const Srvf q_sub = to_srvf(subject.fibers[i]);
        PairAlignment pa = align_pair(tmpl_q[best], q_sub);
        Fiber warped = from_srvf(pa.aligned, Vec3::Zero(), subject.fibers[i].length());
        warped.points.colwise() += subject.fibers[i].centroid() - warped.centroid();
        hard.warped_fibers[i] = std::move(warped);
        hard.per_pair_gammas[i] = std::move(pa.gamma);
    }
    return hard;
}

}  // namespace tractalign
