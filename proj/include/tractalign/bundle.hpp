#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tractalign/curve.hpp"

namespace tractalign {

struct Provenance {
    std::string source;
    int resample_t = 0;
    int subsample_m = 0;
    std::uint64_t seed = 0;
};

// A named set of fibers on a common grid, with optional per-fiber scalar
// profiles (FA and friends) of the same length.
struct Bundle {
    std::string name;
    std::vector<Fiber> fibers;
    std::vector<Eigen::VectorXd> profiles;
    std::vector<std::string> fiber_ids;
    Provenance provenance;

    int fiber_count() const { return static_cast<int>(fibers.size()); }
    int grid_size() const { return fibers.empty() ? 0 : fibers.front().samples(); }
    bool has_profiles() const { return !profiles.empty(); }
};

std::vector<Srvf> bundle_srvfs(const Bundle& bundle);

// Every sample point of every fiber, one column each.
Points3 bundle_points(const Bundle& bundle);

struct RigidTransform {
    Rotation3 rotation = Rotation3::Identity();
    Vec3 translation = Vec3::Zero();

    Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
};

// Least-squares rigid fit of `moving` onto `target` using columnwise
// correspondence (Kabsch about the centroids).
RigidTransform rigid_fit(const Points3& moving, const Points3& target);

// Applies the whole-bundle rigid fit of subject points onto target points.
Bundle rigid_align(const Bundle& subject, const Bundle& target);

Bundle apply_transform(const Bundle& bundle, const RigidTransform& t);

// Flip fibers whose traversal direction disagrees with fibers[0].
Bundle orient_fibers(Bundle bundle);

// Flip fibers (and their profiles) against an external reference fiber,
// e.g. a template's first fiber before cross-bundle registration.
Bundle orient_to_reference(Bundle bundle, const Fiber& reference);

}  // namespace tractalign
