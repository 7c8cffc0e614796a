#include "tractalign/mean.hpp"

#include <cmath>
#include <utility>

#include "tractalign/tangent.hpp"

namespace tractalign {

namespace {

struct AlignmentPass {
    std::vector<Srvf> aligned;
    std::vector<Diffeo> gammas;
    std::vector<Rotation3> rotations;
    double objective = 0.0;
};

AlignmentPass align_all(const Srvf& mu, const std::vector<Srvf>& qs) {
    AlignmentPass pass;
    const int n = static_cast<int>(qs.size());
    pass.aligned.reserve(n);
    pass.gammas.reserve(n);
    pass.rotations.reserve(n);
    double obj = 0.0;
    for (const Srvf& q : qs) {
        PairAlignment pa = align_pair(mu, q);
        obj += pa.distance * pa.distance;
        pass.aligned.push_back(std::move(pa.aligned));
        pass.gammas.push_back(std::move(pa.gamma));
        pass.rotations.push_back(pa.rotation);
    }
    pass.objective = obj / n;
    return pass;
}

Points3 average_log(const Srvf& mu, const std::vector<Srvf>& aligned) {
    Points3 acc = Points3::Zero(3, mu.samples());
    for (const Srvf& q : aligned) acc += log_map(mu, q).values;
    return acc / static_cast<double>(aligned.size());
}

}  // namespace

MeanResult karcher_mean(const std::vector<Srvf>& qs, int max_iters, double tol) {
    const int n = static_cast<int>(qs.size());
    if (n == 0) throw EmptyBundle("karcher_mean: no input shapes");
    const int T = qs[0].samples();
    for (const Srvf& q : qs)
        if (q.samples() != T) throw GridMismatch("karcher_mean: mixed sample counts");

    MeanResult res;
    if (n == 1) {
        res.beta_mu = qs[0];
        res.aligned = {qs[0]};
        res.gammas = {Diffeo::identity(T)};
        res.rotations = {Rotation3::Identity()};
        res.iterations = 1;
        return res;
    }

    Points3 sum = Points3::Zero(3, T);
    for (const Srvf& q : qs) sum += q.values;
    Srvf mu;
    try {
        mu = detail::normalize_srvf(std::move(sum));
    } catch (const DegenerateFiber&) {
        mu = qs[0];  // extrinsic average vanished; any member serves as seed
    }

    AlignmentPass pass = align_all(mu, qs);
    int iterations = 0;
    double gnorm = 0.0;
    for (int it = 1; it <= max_iters; ++it) {
        iterations = it;
        const Points3 vbar = average_log(mu, pass.aligned);
        gnorm = l2_norm(vbar);
        if (gnorm < tol) break;

        bool accepted = false;
        double step = 0.5;
        for (int attempt = 0; attempt < 5; ++attempt) {
            Srvf cand = exp_map(mu, TangentVector{step * vbar, mu});
            AlignmentPass cand_pass = align_all(cand, qs);
            if (cand_pass.objective <= pass.objective + 1e-12) {
                mu = std::move(cand);
                pass = std::move(cand_pass);
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;  // objective at its numerical floor
    }

    res.beta_mu = std::move(mu);
    res.aligned = std::move(pass.aligned);
    res.gammas = std::move(pass.gammas);
    res.rotations = std::move(pass.rotations);
    res.iterations = iterations;
    res.final_gradient_norm = gnorm;
    res.objective = pass.objective;
    return res;
}

}  // namespace tractalign
