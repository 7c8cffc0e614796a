#pragma once

#include <string>
#include <vector>

#include "tractalign/curve.hpp"

namespace tractalign {

// Bidirectional Hausdorff distance max(h(a,b), h(b,a)) with
// h(a,b) = max over a of the min distance into b. Exact. Throws EmptySet.
double hausdorff(const Points3& a, const Points3& b);

// profile(gamma(t_j)) by linear interpolation; endpoints stay fixed.
Eigen::VectorXd warp_profile(const Eigen::VectorXd& profile, const Diffeo& gamma);

// Mean over the grid of the cross-fiber sample standard deviation (N-1
// convention). Throws TooFewProfiles below 2 profiles.
double profile_variability(const std::vector<Eigen::VectorXd>& profiles);

struct EvalRow {
    std::string pair_id;
    std::string tract;
    double rigid_hausdorff = 0.0;
    double soft_hausdorff = 0.0;
    double difference = 0.0;  // soft - rigid
};

struct EvalReport {
    std::vector<EvalRow> rows;
    double mean_rigid = 0.0;
    double mean_soft = 0.0;
    double mean_difference = 0.0;
    double sd_difference = 0.0;
};

struct BundlePoints {
    std::string pair_id;
    std::string tract;
    Points3 subject;
    Points3 reference;
};

// Per-pair Hausdorff values for rigid and soft variants of the same pairs
// plus paired-difference summaries. Statistical testing stays external;
// the CSV written from this report feeds it. Throws PairMismatch.
EvalReport compare_alignments(const std::vector<BundlePoints>& rigid,
                              const std::vector<BundlePoints>& soft);

// Columns: pair_id, tract_name, rigid_hausdorff, soft_hausdorff, difference.
void write_report_csv(const EvalReport& report, const std::string& path);

}  // namespace tractalign
