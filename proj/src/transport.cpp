#include "tractalign/transport.hpp"

#include <cmath>

namespace tractalign {

namespace {

void check_based_at(const TangentVector& v, const Srvf& base, const char* where) {
    if (v.base.samples() != base.samples() ||
        (v.base.values - base.values).cwiseAbs().maxCoeff() > 1e-9)
        throw BaseMismatch(std::string(where) + ": vector not based at the source point");
}

}  // namespace

TransportResult transport_exact(const Srvf& src_base, const Srvf& dst_base,
                                const std::vector<TangentVector>& vs) {
    const TangentVector w = log_map(src_base, dst_base);
    const double lw = w.norm();
    TransportResult res;
    res.path_length = lw;
    if (lw < 1e-12) {
        res.vectors = vs;
        return res;
    }
    res.steps = 1;
    const double c = inner(src_base, dst_base);
    res.vectors.reserve(vs.size());
    for (const TangentVector& v : vs) {
        check_based_at(v, src_base, "transport_exact");
        const double a = l2_inner(v.values, dst_base.values);
        Points3 moved = v.values - (a / (1.0 + c)) * (src_base.values + dst_base.values);
        res.vectors.push_back(TangentVector{std::move(moved), dst_base});
    }
    return res;
}

TransportResult transport_stepwise(const Srvf& src_base, const Srvf& dst_base,
                                   const std::vector<TangentVector>& vs, int k,
                                   bool paper_rescale) {
    if (k < 2) throw Error("transport_stepwise: k must be >= 2");
    const TangentVector w = log_map(src_base, dst_base);
    const double lw = w.norm();
    TransportResult res;
    res.path_length = lw;
    if (lw < 1e-12) {
        res.vectors = vs;  // degenerate geodesic: nothing to move
        return res;
    }
    res.steps = k;

    const int n = static_cast<int>(vs.size());
    std::vector<Points3> cur;
    std::vector<double> norms(n);
    cur.reserve(n);
    for (int i = 0; i < n; ++i) {
        check_based_at(vs[i], src_base, "transport_stepwise");
        cur.push_back(vs[i].values);
        norms[i] = vs[i].norm();
    }

    for (int tau = 1; tau <= k; ++tau) {
        const Srvf qt = (tau == k) ? dst_base
                                   : exp_map(src_base, TangentVector{(static_cast<double>(tau) / k) * w.values,
                                                                     src_base});
        for (int i = 0; i < n; ++i) {
            cur[i] -= l2_inner(cur[i], qt.values) * qt.values;
            const double target = paper_rescale ? lw : norms[i];
            const double nn = l2_norm(cur[i]);
            if (nn > 1e-15) cur[i] *= target / nn;
        }
    }

    res.vectors.reserve(n);
    for (int i = 0; i < n; ++i) res.vectors.push_back(TangentVector{std::move(cur[i]), dst_base});
    return res;
}

}  // namespace tractalign
