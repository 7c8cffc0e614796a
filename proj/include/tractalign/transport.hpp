#pragma once

#include <vector>

#include "tractalign/tangent.hpp"

namespace tractalign {

struct TransportResult {
    std::vector<TangentVector> vectors;  // tangent at the destination
    int steps = 0;
    double path_length = 0.0;
};

// Single-shot parallel transport along the minimal geodesic between two
// sphere points: v -> v - <v, dst>/(1 + <src, dst>) (src + dst). Exact up
// to roundoff; used as the default path and as the validation reference
// for the stepwise variant.
TransportResult transport_exact(const Srvf& src_base, const Srvf& dst_base,
                                const std::vector<TangentVector>& vs);

// Discrete transport: walk k steps along the geodesic, project every
// vector onto the tangent space at each intermediate point and restore
// its norm. paper_rescale switches the norm restored per step to the
// geodesic length l_w instead of the vector's own norm (the literal
// printed variant, which is not an isometry).
TransportResult transport_stepwise(const Srvf& src_base, const Srvf& dst_base,
                                   const std::vector<TangentVector>& vs, int k = 10,
                                   bool paper_rescale = false);

}  // namespace tractalign
