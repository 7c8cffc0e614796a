#pragma once

#include <string>
#include <vector>

#include "tractalign/curve.hpp"
#include "tractalign/metrics.hpp"

namespace tractalign {

// Warping functions against the identity diagonal, one polyline per fiber.
void plot_gamma_panel(const std::vector<Diffeo>& gammas, const std::string& title,
                      const std::string& path);

// Two heatmaps side by side (fibers x grid), shared color range: profiles
// before and after alignment.
void plot_profile_heatmaps(const std::vector<Eigen::VectorXd>& before,
                           const std::vector<Eigen::VectorXd>& after, const std::string& title,
                           const std::string& path);

// Paired bars, rigid next to soft, one group per report row.
void plot_hausdorff_bars(const EvalReport& report, const std::string& title,
                         const std::string& path);

}  // namespace tractalign
