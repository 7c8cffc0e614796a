#include "tractalign/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace tractalign {

namespace {

double directed_hausdorff_sq(const Points3& a, const Points3& b) {
    double worst = 0.0;
    for (int i = 0; i < a.cols(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (int j = 0; j < b.cols(); ++j) {
            const double d = (a.col(i) - b.col(j)).squaredNorm();
            if (d < best) {
                best = d;
                if (best <= worst) break;  // cannot raise the max any more
            }
        }
        if (best > worst) worst = best;
    }
    return worst;
}

}  // namespace

double hausdorff(const Points3& a, const Points3& b) {
    if (a.cols() == 0 || b.cols() == 0) throw EmptySet("hausdorff: empty point set");
    return std::sqrt(std::max(directed_hausdorff_sq(a, b), directed_hausdorff_sq(b, a)));
}

Eigen::VectorXd warp_profile(const Eigen::VectorXd& profile, const Diffeo& gamma) {
    const int T = static_cast<int>(profile.size());
    if (T != gamma.samples()) throw GridMismatch("warp_profile: sample counts differ");
    detail::check_monotone(gamma);
    Eigen::VectorXd out(T);
    for (int j = 0; j < T; ++j) {
        const double x = gamma.values(j) * (T - 1);
        const int i0 = std::min(static_cast<int>(x), T - 2);
        const double f = std::min(std::max(x - i0, 0.0), 1.0);
        out(j) = (1.0 - f) * profile(i0) + f * profile(i0 + 1);
    }
    out(0) = profile(0);
    out(T - 1) = profile(T - 1);
    return out;
}

double profile_variability(const std::vector<Eigen::VectorXd>& profiles) {
    const int n = static_cast<int>(profiles.size());
    if (n < 2) throw TooFewProfiles("profile_variability: need at least 2 profiles");
    const int T = static_cast<int>(profiles[0].size());
    for (const auto& p : profiles)
        if (static_cast<int>(p.size()) != T) throw GridMismatch("profile_variability: mixed lengths");

    double acc = 0.0;
    for (int j = 0; j < T; ++j) {
        double mean = 0.0;
        for (const auto& p : profiles) mean += p(j);
        mean /= n;
        double var = 0.0;
        for (const auto& p : profiles) var += (p(j) - mean) * (p(j) - mean);
        acc += std::sqrt(var / (n - 1));
    }
    return acc / T;
}

EvalReport compare_alignments(const std::vector<BundlePoints>& rigid,
                              const std::vector<BundlePoints>& soft) {
    if (rigid.size() != soft.size())
        throw PairMismatch("compare_alignments: rigid and soft pair counts differ");
    EvalReport report;
    report.rows.reserve(rigid.size());
    for (std::size_t i = 0; i < rigid.size(); ++i) {
        if (rigid[i].pair_id != soft[i].pair_id)
            throw PairMismatch("compare_alignments: pair ids disagree at row " + std::to_string(i));
        EvalRow row;
        row.pair_id = rigid[i].pair_id;
        row.tract = rigid[i].tract;
        row.rigid_hausdorff = hausdorff(rigid[i].subject, rigid[i].reference);
        row.soft_hausdorff = hausdorff(soft[i].subject, soft[i].reference);
        row.difference = row.soft_hausdorff - row.rigid_hausdorff;
        report.rows.push_back(std::move(row));
    }
    const int n = static_cast<int>(report.rows.size());
    if (n > 0) {
        for (const EvalRow& r : report.rows) {
            report.mean_rigid += r.rigid_hausdorff;
            report.mean_soft += r.soft_hausdorff;
            report.mean_difference += r.difference;
        }
        report.mean_rigid /= n;
        report.mean_soft /= n;
        report.mean_difference /= n;
        if (n > 1) {
            double var = 0.0;
            for (const EvalRow& r : report.rows) {
                const double d = r.difference - report.mean_difference;
                var += d * d;
            }
            report.sd_difference = std::sqrt(var / (n - 1));
        }
    }
    return report;
}

void write_report_csv(const EvalReport& report, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw IoError("write_report_csv: cannot open " + path);
    std::fputs("pair_id,tract_name,rigid_hausdorff,soft_hausdorff,difference\n", f);
    for (const EvalRow& r : report.rows)
        std::fprintf(f, "%s,%s,%.17g,%.17g,%.17g\n", r.pair_id.c_str(), r.tract.c_str(),
                     r.rigid_hausdorff, r.soft_hausdorff, r.difference);
    std::fclose(f);
}

}  // namespace tractalign
