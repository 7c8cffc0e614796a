#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tractalign/bundle.hpp"
#include "tractalign/tangent.hpp"

namespace tractalign {

// Versioned JSON interchange for bundles and their codes. Numeric blocks
// are base64-embedded little-endian float64. Unknown fields are rejected
// by name; the basis is regenerated from its stored spec on load and
// checked against the stored id.
struct BundleArchive {
    int version = 1;
    Bundle bundle;
    std::optional<BundleCode> code;
};

void save_archive(const BundleArchive& archive, const std::string& path);
BundleArchive load_archive(const std::string& path);

// Profiles as CSV, one row per fiber, grid_size columns.
void write_profiles_csv(const std::vector<Eigen::VectorXd>& profiles, const std::string& path);
std::vector<Eigen::VectorXd> read_profiles_csv(const std::string& path);

// Bundle ingestion: parse (TCK or archive JSON by extension), resample
// every fiber to T, harmonize traversal direction, deterministically
// subsample to M fibers (seed-dependent stride; throws FiberCountMismatch
// when fewer than M are present; M <= 0 keeps all).
Bundle load_bundle(const std::string& path, int T, int M, std::uint64_t seed);

// The seed-dependent stride used by load_bundle, exposed for tests.
std::vector<int> subsample_indices(int available, int wanted, std::uint64_t seed);

}  // namespace tractalign
