#include "tractalign/bundle.hpp"

namespace tractalign {

std::vector<Srvf> bundle_srvfs(const Bundle& bundle) {
    std::vector<Srvf> out;
    out.reserve(bundle.fibers.size());
    for (const Fiber& f : bundle.fibers) out.push_back(to_srvf(f));
    return out;
}

Points3 bundle_points(const Bundle& bundle) {
    int total = 0;
    for (const Fiber& f : bundle.fibers) total += f.samples();
    Points3 out(3, total);
    int at = 0;
    for (const Fiber& f : bundle.fibers) {
        out.middleCols(at, f.samples()) = f.points;
        at += f.samples();
    }
    return out;
}

RigidTransform rigid_fit(const Points3& moving, const Points3& target) {
    if (moving.cols() != target.cols() || moving.cols() == 0)
        throw ShapeMismatch("rigid_fit: point sets must be nonempty and equally sized");
    const Vec3 cm = moving.rowwise().mean();
    const Vec3 ct = target.rowwise().mean();
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (int j = 0; j < moving.cols(); ++j)
        cov += (moving.col(j) - cm) * (target.col(j) - ct).transpose();
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
    if ((svd.matrixV() * svd.matrixU().transpose()).determinant() < 0.0) d(2, 2) = -1.0;
    const Rotation3 r = svd.matrixV() * d * svd.matrixU().transpose();
    return RigidTransform{r, ct - r * cm};
}

Bundle apply_transform(const Bundle& bundle, const RigidTransform& t) {
    Bundle out = bundle;
    for (Fiber& f : out.fibers)
        f.points = (t.rotation * f.points).colwise() + t.translation;
    return out;
}

Bundle rigid_align(const Bundle& subject, const Bundle& target) {
    return apply_transform(subject, rigid_fit(bundle_points(subject), bundle_points(target)));
}

Bundle orient_fibers(Bundle bundle) {
    if (bundle.fibers.size() < 2) return bundle;
    const Fiber ref = bundle.fibers.front();
    for (std::size_t i = 1; i < bundle.fibers.size(); ++i) {
        if (!should_flip(bundle.fibers[i], ref)) continue;
        bundle.fibers[i] = bundle.fibers[i].reversed();
        if (i < bundle.profiles.size()) bundle.profiles[i].reverseInPlace();
    }
    return bundle;
}

Bundle orient_to_reference(Bundle bundle, const Fiber& reference) {
    for (std::size_t i = 0; i < bundle.fibers.size(); ++i) {
        if (!should_flip(bundle.fibers[i], reference)) continue;
        bundle.fibers[i] = bundle.fibers[i].reversed();
        if (i < bundle.profiles.size()) bundle.profiles[i].reverseInPlace();
    }
    return bundle;
}

}  // namespace tractalign
