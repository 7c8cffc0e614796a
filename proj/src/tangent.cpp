#include "tractalign/tangent.hpp"

#include <algorithm>
#include <cmath>

#include "tractalign/mean.hpp"

namespace tractalign {

namespace {

constexpr double kDropTol = 1e-8;

double clamp_unit(double x) { return std::clamp(x, -1.0, 1.0); }

// alpha / sin(alpha), stable near zero.
double inv_sinc(double alpha) {
    if (alpha < 1e-7) return 1.0 + alpha * alpha / 6.0;
    return alpha / std::sin(alpha);
}

std::uint64_t fnv1a(const unsigned char* data, std::size_t n, std::uint64_t h) {
    for (std::size_t i = 0; i < n; ++i) {
        h ^= data[i];
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t basis_id_of(const Srvf& base, int K, bool orthonormal) {
    std::uint64_t h = 14695981039346656037ULL;
    const int T = base.samples();
    h = fnv1a(reinterpret_cast<const unsigned char*>(&T), sizeof(T), h);
    h = fnv1a(reinterpret_cast<const unsigned char*>(&K), sizeof(K), h);
    const unsigned char o = orthonormal ? 1 : 0;
    h = fnv1a(&o, 1, h);
    h = fnv1a(reinterpret_cast<const unsigned char*>(base.values.data()),
              sizeof(double) * base.values.size(), h);
    return h;
}

void check_same_base(const TangentVector& v, const Srvf& base, const char* where) {
    if (v.base.samples() != base.samples() ||
        (v.base.values - base.values).cwiseAbs().maxCoeff() > 1e-9)
        throw BaseMismatch(std::string(where) + ": tangent vector based at a different point");
}

}  // namespace

TangentVector log_map(const Srvf& base, const Srvf& q) {
    if (base.samples() != q.samples()) throw GridMismatch("log_map: sample counts differ");
    const double c = clamp_unit(inner(base, q));
    if (c <= -1.0 + 1e-9) throw AntipodalPoint("log_map: points are antipodal");
    const double alpha = std::acos(c);
    if (alpha < 1e-14) return TangentVector{Points3::Zero(3, base.samples()), base};
    Points3 v = inv_sinc(alpha) * (q.values - c * base.values);
    return TangentVector{std::move(v), base};
}

Srvf exp_map(const Srvf& base, const TangentVector& v) {
    if (base.samples() != static_cast<int>(v.values.cols()))
        throw GridMismatch("exp_map: sample counts differ");
    if (std::abs(l2_inner(v.values, base.values)) >= 1e-6)
        throw TangencyViolation("exp_map: vector is not tangent at base");
    const double alpha = l2_norm(v.values);
    if (alpha < 1e-14) return base;
    Points3 out = std::cos(alpha) * base.values + (std::sin(alpha) / alpha) * v.values;
    return detail::normalize_srvf(std::move(out));
}

Basis make_basis(const Srvf& base, int K, bool orthonormalize) {
    if (K < 1) throw Error("make_basis: K must be >= 1");
    const int T = base.samples();
    const Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(T, 0.0, 1.0);

    Basis basis;
    basis.base = base;
    basis.requested = K;
    basis.orthonormal = orthonormalize;

    for (int r = 0; r < K; ++r) {
        const int block = r / 3;
        const int channel = r % 3;
        Eigen::VectorXd wave(T);
        if (block == 0) {
            wave.setOnes();
        } else {
            const int m = (block + 1) / 2;
            const double f = 2.0 * M_PI * m;
            if (block % 2 == 1)
                wave = (f * t.array()).sin();
            else
                wave = (f * t.array()).cos();
        }
        Points3 e = Points3::Zero(3, T);
        e.row(channel) = wave.transpose();
        e /= l2_norm(e);

        e -= l2_inner(e, base.values) * base.values;
        if (orthonormalize) {
            for (const Points3& prev : basis.elements) e -= l2_inner(e, prev) * prev;
            const double n = l2_norm(e);
            if (n < kDropTol) {
                ++basis.dropped;
                continue;
            }
            e /= n;
        } else if (l2_norm(e) < kDropTol) {
            ++basis.dropped;
            continue;
        }
        basis.elements.push_back(std::move(e));
    }
    basis.id = basis_id_of(base, K, orthonormalize);
    return basis;
}

CoeffMatrix encode(const std::vector<TangentVector>& vs, const Basis& basis) {
    const int N = static_cast<int>(vs.size());
    const int K = basis.size();
    CoeffMatrix out;
    out.entries.resize(N, K);
    out.residuals.resize(N);
    out.basis_id = basis.id;
    for (int i = 0; i < N; ++i) {
        check_same_base(vs[i], basis.base, "encode");
        for (int k = 0; k < K; ++k) out.entries(i, k) = l2_inner(vs[i].values, basis.elements[k]);
        Points3 rec = Points3::Zero(3, basis.base.samples());
        for (int k = 0; k < K; ++k) rec += out.entries(i, k) * basis.elements[k];
        out.residuals(i) = l2_norm(vs[i].values - rec);
    }
    return out;
}

std::vector<TangentVector> decode(const CoeffMatrix& A, const Basis& basis) {
    if (A.basis_id != basis.id) throw BaseMismatch("decode: coefficient matrix built with a different basis");
    if (A.cols() != basis.size()) throw BaseMismatch("decode: coefficient width does not match basis size");
    std::vector<TangentVector> out;
    out.reserve(A.rows());
    for (int i = 0; i < A.rows(); ++i) {
        Points3 v = Points3::Zero(3, basis.base.samples());
        for (int k = 0; k < basis.size(); ++k) v += A.entries(i, k) * basis.elements[k];
        out.push_back(TangentVector{std::move(v), basis.base});
    }
    return out;
}

BundleCode encode_bundle(const MeanResult& mean, int basis_size, std::vector<std::string> fiber_ids,
                         bool orthonormal) {
    const int N = static_cast<int>(mean.aligned.size());
    if (N == 0) throw EmptyBundle("encode_bundle: mean has no aligned members");
    Basis basis = make_basis(mean.beta_mu, basis_size, orthonormal);
    std::vector<TangentVector> vs;
    vs.reserve(N);
    for (const Srvf& q : mean.aligned) vs.push_back(log_map(mean.beta_mu, q));
    CoeffMatrix A = encode(vs, basis);
    if (fiber_ids.empty()) {
        fiber_ids.reserve(N);
        for (int i = 0; i < N; ++i) {
            char buf[16];
            std::snprintf(buf, sizeof(buf), "f%03d", i);
            fiber_ids.emplace_back(buf);
        }
    }
    if (static_cast<int>(fiber_ids.size()) != N)
        throw ShapeMismatch("encode_bundle: fiber id count does not match bundle size");
    return BundleCode{mean.beta_mu, std::move(A), std::move(basis), std::move(fiber_ids)};
}

}  // namespace tractalign
