#include "tractalign/curve.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

namespace tractalign {

namespace {

constexpr double kZeroVelocity = 1e-12;

// Linear interpolation of a 3xT sample block at real-valued grid index x.
Vec3 sample_at(const Points3& values, double x) {
    const int T = static_cast<int>(values.cols());
    if (x <= 0.0) return values.col(0);
    if (x >= T - 1) return values.col(T - 1);
    const int i0 = static_cast<int>(x);
    const double f = x - i0;
    return (1.0 - f) * values.col(i0) + f * values.col(i0 + 1);
}

double sample_at(const Eigen::VectorXd& values, double x) {
    const int T = static_cast<int>(values.size());
    if (x <= 0.0) return values(0);
    if (x >= T - 1) return values(T - 1);
    const int i0 = static_cast<int>(x);
    const double f = x - i0;
    return (1.0 - f) * values(i0) + f * values(i0 + 1);
}

}  // namespace

double grid_step(int T) { return 1.0 / (T - 1); }

Eigen::VectorXd quad_weights(int T) {
    const double h = grid_step(T);
    Eigen::VectorXd w = Eigen::VectorXd::Constant(T, h);
    w(0) = 0.5 * h;
    w(T - 1) = 0.5 * h;
    return w;
}

double Fiber::length() const {
    double total = 0.0;
    for (int j = 1; j < samples(); ++j) total += (points.col(j) - points.col(j - 1)).norm();
    return total;
}

Vec3 Fiber::centroid() const { return points.rowwise().mean(); }

Fiber Fiber::reversed() const { return Fiber{points.rowwise().reverse()}; }

Diffeo Diffeo::identity(int T) {
    Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(T, 0.0, 1.0);
    return Diffeo{std::move(v)};
}

Fiber resample(const Fiber& fiber, int T) {
    const int n = fiber.samples();
    if (n < 2) throw DegenerateFiber("resample: fiber needs at least 2 points");
    if (T < 3) throw DegenerateFiber("resample: target sample count must be >= 3");

    Eigen::VectorXd cum(n);
    cum(0) = 0.0;
    for (int j = 1; j < n; ++j)
        cum(j) = cum(j - 1) + (fiber.points.col(j) - fiber.points.col(j - 1)).norm();
    const double total = cum(n - 1);
    if (total <= 0.0) throw DegenerateFiber("resample: zero arc length");

    Points3 out(3, T);
    out.col(0) = fiber.points.col(0);
    out.col(T - 1) = fiber.points.col(n - 1);
    int seg = 0;
    for (int i = 1; i < T - 1; ++i) {
        const double s = total * static_cast<double>(i) / (T - 1);
        while (seg < n - 2 && cum(seg + 1) < s) ++seg;
        const double span = cum(seg + 1) - cum(seg);
        const double f = span > 0.0 ? (s - cum(seg)) / span : 0.0;
        out.col(i) = (1.0 - f) * fiber.points.col(seg) + f * fiber.points.col(seg + 1);
    }
    return Fiber{std::move(out)};
}

namespace detail {

Points3 derivative(const Points3& pts) {
    const int T = static_cast<int>(pts.cols());
    const double h = grid_step(T);
    Points3 d(3, T);
    d.col(0) = (-3.0 * pts.col(0) + 4.0 * pts.col(1) - pts.col(2)) / (2.0 * h);
    for (int j = 1; j < T - 1; ++j) d.col(j) = (pts.col(j + 1) - pts.col(j - 1)) / (2.0 * h);
    d.col(T - 1) = (3.0 * pts.col(T - 1) - 4.0 * pts.col(T - 2) + pts.col(T - 3)) / (2.0 * h);
    return d;
}

Srvf normalize_srvf(Points3 values) {
    const int T = static_cast<int>(values.cols());
    const Eigen::VectorXd w = quad_weights(T);
    double n2 = 0.0;
    for (int j = 0; j < T; ++j) n2 += w(j) * values.col(j).squaredNorm();
    if (n2 <= 0.0) throw DegenerateFiber("srvf: zero norm");
    values /= std::sqrt(n2);
    return Srvf{std::move(values)};
}

void check_monotone(const Diffeo& gamma) {
    const int T = gamma.samples();
    if (T < 3) throw NonMonotoneGamma("gamma: fewer than 3 samples");
    if (std::abs(gamma.values(0)) > 1e-9 || std::abs(gamma.values(T - 1) - 1.0) > 1e-9)
        throw NonMonotoneGamma("gamma: endpoints must be 0 and 1");
    for (int j = 1; j < T; ++j)
        if (gamma.values(j) < gamma.values(j - 1) - 1e-12)
            throw NonMonotoneGamma("gamma: decreasing at sample " + std::to_string(j));
}

Eigen::VectorXd gamma_derivative(const Diffeo& gamma) {
    const int T = gamma.samples();
    const double h = grid_step(T);
    const Eigen::VectorXd& g = gamma.values;
    Eigen::VectorXd d(T);
    d(0) = (-3.0 * g(0) + 4.0 * g(1) - g(2)) / (2.0 * h);
    for (int j = 1; j < T - 1; ++j) d(j) = (g(j + 1) - g(j - 1)) / (2.0 * h);
    d(T - 1) = (3.0 * g(T - 1) - 4.0 * g(T - 2) + g(T - 3)) / (2.0 * h);
    return d.cwiseMax(0.0);
}

}  // namespace detail

Srvf to_srvf(const Fiber& fiber) {
    const int T = fiber.samples();
    if (T < 3) throw DegenerateFiber("to_srvf: fiber needs at least 3 samples");
    const Points3 v = detail::derivative(fiber.points);
    Points3 q(3, T);
    for (int j = 0; j < T; ++j) {
        const double speed = v.col(j).norm();
        q.col(j) = speed < kZeroVelocity ? Vec3::Zero().eval() : (v.col(j) / std::sqrt(speed)).eval();
    }
    return detail::normalize_srvf(std::move(q));
}

Fiber from_srvf(const Srvf& q, const Vec3& origin, double scale) {
    const int T = q.samples();
    if (T < 3) throw DegenerateFiber("from_srvf: needs at least 3 samples");
    if (std::abs(inner(q, q) - 1.0) > 1e-6) throw Error("from_srvf: srvf is not unit norm");
    const double h = grid_step(T);

    Points3 g(3, T);
    for (int j = 0; j < T; ++j) g.col(j) = q.values.col(j) * q.values.col(j).norm();

    // Exact inverse of the difference scheme in detail::derivative:
    // interior rows give F(j+1) = F(j-1) + 2h g(j), the first row pins F(1).
    Points3 f(3, T);
    f.col(0) = Vec3::Zero();
    f.col(2) = f.col(0) + 2.0 * h * g.col(1);
    f.col(1) = (2.0 * h * g.col(0) + 3.0 * f.col(0) + f.col(2)) / 4.0;
    for (int j = 2; j < T - 1; ++j) f.col(j + 1) = f.col(j - 1) + 2.0 * h * g.col(j);

    Points3 out = (scale * f).colwise() + origin;
    return Fiber{std::move(out)};
}

double inner(const Srvf& q1, const Srvf& q2) {
    const int T = q1.samples();
    if (T != q2.samples()) throw GridMismatch("inner: sample counts differ");
    const Eigen::VectorXd w = quad_weights(T);
    double s = 0.0;
    for (int j = 0; j < T; ++j) s += w(j) * q1.values.col(j).dot(q2.values.col(j));
    return s;
}

double srvf_distance(const Srvf& q1, const Srvf& q2) {
    const int T = q1.samples();
    if (T != q2.samples()) throw GridMismatch("srvf_distance: sample counts differ");
    const Eigen::VectorXd w = quad_weights(T);
    double s = 0.0;
    for (int j = 0; j < T; ++j) s += w(j) * (q1.values.col(j) - q2.values.col(j)).squaredNorm();
    return std::sqrt(s);
}

double l2_inner(const Points3& a, const Points3& b) {
    const int T = static_cast<int>(a.cols());
    if (T != static_cast<int>(b.cols())) throw GridMismatch("l2_inner: sample counts differ");
    const Eigen::VectorXd w = quad_weights(T);
    double s = 0.0;
    for (int j = 0; j < T; ++j) s += w(j) * a.col(j).dot(b.col(j));
    return s;
}

double l2_norm(const Points3& a) { return std::sqrt(std::max(0.0, l2_inner(a, a))); }

Srvf apply_gamma(const Srvf& q, const Diffeo& gamma) {
    const int T = q.samples();
    if (T != gamma.samples()) throw GridMismatch("apply_gamma: sample counts differ");
    detail::check_monotone(gamma);
    const Eigen::VectorXd gdot = detail::gamma_derivative(gamma);
    Points3 out(3, T);
    for (int j = 0; j < T; ++j)
        out.col(j) = std::sqrt(gdot(j)) * sample_at(q.values, gamma.values(j) * (T - 1));
    return detail::normalize_srvf(std::move(out));
}

Points3 warp_values(const Points3& values, const Diffeo& gamma) {
    const int T = static_cast<int>(values.cols());
    if (T != gamma.samples()) throw GridMismatch("warp_values: sample counts differ");
    detail::check_monotone(gamma);
    const Eigen::VectorXd gdot = detail::gamma_derivative(gamma);
    Points3 out(3, T);
    for (int j = 0; j < T; ++j)
        out.col(j) = std::sqrt(gdot(j)) * sample_at(values, gamma.values(j) * (T - 1));
    return out;
}

Fiber reparameterize(const Fiber& fiber, const Diffeo& gamma) {
    const int T = fiber.samples();
    if (T != gamma.samples()) throw GridMismatch("reparameterize: sample counts differ");
    detail::check_monotone(gamma);
    Points3 out(3, T);
    for (int j = 0; j < T; ++j) out.col(j) = sample_at(fiber.points, gamma.values(j) * (T - 1));
    return Fiber{std::move(out)};
}

Rotation3 kabsch_rotation(const Srvf& q_ref, const Srvf& q) {
    const int T = q_ref.samples();
    if (T != q.samples()) throw GridMismatch("kabsch_rotation: sample counts differ");
    const Eigen::VectorXd w = quad_weights(T);
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (int j = 0; j < T; ++j) cov += w(j) * q.values.col(j) * q_ref.values.col(j).transpose();
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
    // Singular values are sorted descending: flipping the last one keeps
    // the result in SO(3) at least cost.
    if ((svd.matrixV() * svd.matrixU().transpose()).determinant() < 0.0) d(2, 2) = -1.0;
    return svd.matrixV() * d * svd.matrixU().transpose();
}

namespace {

// Monotone lattice steps: coprime (di, dj) with slopes in {1/3 .. 3}.
struct LatticeStep {
    int di, dj;
};
constexpr std::array<LatticeStep, 7> kSteps{{{1, 1}, {1, 2}, {2, 1}, {1, 3}, {3, 1}, {2, 3}, {3, 2}}};

// Cost of the gamma segment from node (i-di, j-dj) to (i, j): trapezoidal
// integral of ||q_ref(t) - sqrt(m) q(gamma(t))||^2 over the reference
// samples it spans, with gamma linear of slope m = dj/di.
double edge_cost(const Points3& qr, const Points3& qv, double h, int i, int j, int di, int dj) {
    const int i0 = i - di;
    const int j0 = j - dj;
    const double m = static_cast<double>(dj) / di;
    const double sm = std::sqrt(m);
    double acc = 0.0;
    for (int k = i0; k <= i; ++k) {
        const double pos = j0 + m * (k - i0);
        const Vec3 qk = sample_at(qv, pos);
        const double val = (qr.col(k) - sm * qk).squaredNorm();
        acc += (k == i0 || k == i) ? 0.5 * val : val;
    }
    return h * acc;
}

}  // namespace

GammaResult optimal_gamma(const Srvf& q_ref, const Srvf& q) {
    const int T = q_ref.samples();
    if (T != q.samples()) throw GridMismatch("optimal_gamma: sample counts differ");
    const double h = grid_step(T);
    const Points3& qr = q_ref.values;
    const Points3& qv = q.values;

    constexpr double kInf = std::numeric_limits<double>::infinity();
    Eigen::MatrixXd energy = Eigen::MatrixXd::Constant(T, T, kInf);
    Eigen::Matrix<signed char, Eigen::Dynamic, Eigen::Dynamic> pred(T, T);
    pred.setConstant(-1);
    energy(0, 0) = 0.0;

    for (int i = 1; i < T; ++i) {
        for (int j = 1; j < T; ++j) {
            double best = kInf;
            signed char best_s = -1;
            for (int s = 0; s < static_cast<int>(kSteps.size()); ++s) {
                const int i0 = i - kSteps[s].di;
                const int j0 = j - kSteps[s].dj;
                if (i0 < 0 || j0 < 0 || energy(i0, j0) == kInf) continue;
                const double c = energy(i0, j0) + edge_cost(qr, qv, h, i, j, kSteps[s].di, kSteps[s].dj);
                if (c < best) {
                    best = c;
                    best_s = static_cast<signed char>(s);
                }
            }
            energy(i, j) = best;
            pred(i, j) = best_s;
        }
    }

    // Backtrack and fill gamma linearly between visited nodes.
    Eigen::VectorXd gv(T);
    int i = T - 1, j = T - 1;
    gv(T - 1) = 1.0;
    while (i > 0) {
        const LatticeStep st = kSteps[static_cast<int>(pred(i, j))];
        const int i0 = i - st.di;
        const int j0 = j - st.dj;
        const double m = static_cast<double>(st.dj) / st.di;
        for (int k = i0; k < i; ++k) gv(k) = h * (j0 + m * (k - i0));
        i = i0;
        j = j0;
    }
    gv(0) = 0.0;
    return GammaResult{Diffeo{std::move(gv)}, std::sqrt(energy(T - 1, T - 1))};
}

namespace {

// gamma_prev followed by gamma_next: t -> gamma_prev(gamma_next(t)).
Diffeo compose_gamma(const Diffeo& prev, const Diffeo& next) {
    const int T = prev.samples();
    Eigen::VectorXd out(T);
    for (int j = 0; j < T; ++j) out(j) = sample_at(prev.values, next.values(j) * (T - 1));
    out(0) = 0.0;
    out(T - 1) = 1.0;
    return Diffeo{std::move(out)};
}

}  // namespace

namespace detail {

// Coarse-to-fine coordinate descent on the true warp objective. The
// lattice only offers seven slopes, which leaves a sqrt(gamma-dot)
// quantization floor; sliding nodes inside their monotone intervals
// removes it, and coarse strides (moving a node drags its neighborhood
// linearly) propagate large-scale corrections in few sweeps.
class GammaRefiner {
  public:
    GammaRefiner(const Srvf& q_ref, const Srvf& q)
        : qr_(q_ref.values), qv_(q.values), T_(q_ref.samples()), h_(grid_step(T_)),
          w_(quad_weights(T_)) {}

    Diffeo refine(const Diffeo& start, int sweeps_per_level) const {
        Eigen::VectorXd v = start.values;
        for (const int stride : {8, 4, 2, 1}) {
            if (2 * stride >= T_) continue;
            for (int sweep = 0; sweep < sweeps_per_level; ++sweep)
                if (!sweep_once(v, stride)) break;
        }
        return Diffeo{std::move(v)};
    }

  private:
    // Move every stride-th node within (v[j-stride], v[j+stride]), filling
    // the dragged neighbors linearly, and keep the move when the local
    // quadrature terms drop.
    bool sweep_once(Eigen::VectorXd& v, int stride) const {
        bool moved = false;
        std::vector<double> saved(2 * stride + 1);
        for (int j = stride; j < T_ - 1; j += stride) {
            const int jm = j - stride;
            const int jp = std::min(j + stride, T_ - 1);
            const double lo = v(jm), hi = v(jp);
            if (hi - lo < 1e-12) continue;
            for (int k = jm; k <= jp; ++k) saved[k - jm] = v(k);

            const auto fill = [&](double x) {
                v(j) = x;
                for (int k = jm + 1; k < j; ++k)
                    v(k) = lo + (x - lo) * (k - jm) / double(j - jm);
                for (int k = j + 1; k < jp; ++k)
                    v(k) = x + (hi - x) * (k - j) / double(jp - j);
            };
            const double before = segment_cost(v, jm, jp);

            double a = lo, b = hi;
            for (int it = 0; it < 20; ++it) {
                const double m1 = a + (b - a) / 3.0, m2 = b - (b - a) / 3.0;
                fill(m1);
                const double c1 = segment_cost(v, jm, jp);
                fill(m2);
                const double c2 = segment_cost(v, jm, jp);
                if (c1 < c2)
                    b = m2;
                else
                    a = m1;
            }
            fill(0.5 * (a + b));
            if (segment_cost(v, jm, jp) + 1e-15 < before) {
                moved = true;
            } else {
                for (int k = jm; k <= jp; ++k) v(k) = saved[k - jm];
            }
        }
        return moved;
    }

    // Quadrature terms affected by nodes strictly inside [jm, jp]: the
    // touching gamma derivative stencils reach one sample beyond each side
    // (and that range also covers the one-sided endpoint stencils).
    double segment_cost(const Eigen::VectorXd& v, int jm, int jp) const {
        double acc = 0.0;
        for (int k = std::max(0, jm - 1); k <= std::min(T_ - 1, jp + 1); ++k) acc += term(v, k);
        return acc;
    }

    double term(const Eigen::VectorXd& v, int k) const {
        double gdot;
        if (k == 0)
            gdot = (-3.0 * v(0) + 4.0 * v(1) - v(2)) / (2.0 * h_);
        else if (k == T_ - 1)
            gdot = (3.0 * v(T_ - 1) - 4.0 * v(T_ - 2) + v(T_ - 3)) / (2.0 * h_);
        else
            gdot = (v(k + 1) - v(k - 1)) / (2.0 * h_);
        gdot = std::max(gdot, 0.0);
        const Vec3 warped = std::sqrt(gdot) * sample_at(qv_, v(k) * (T_ - 1));
        return w_(k) * (qr_.col(k) - warped).squaredNorm();
    }

    const Points3& qr_;
    const Points3& qv_;
    int T_;
    double h_;
    Eigen::VectorXd w_;
};

Diffeo refine_gamma(const Srvf& q_ref, const Srvf& q, const Diffeo& start, int max_sweeps) {
    return GammaRefiner(q_ref, q).refine(start, max_sweeps);
}

}  // namespace detail

PairAlignment align_pair(const Srvf& q_ref, const Srvf& q, int iters) {
    if (iters < 1) throw Error("align_pair: iters must be >= 1");
    const int T = q_ref.samples();
    if (T != q.samples()) throw GridMismatch("align_pair: sample counts differ");

    Srvf current = q;
    Rotation3 rot_total = Rotation3::Identity();
    Diffeo gamma_total = Diffeo::identity(T);
    double obj = srvf_distance(q_ref, current);
    int rounds = 0;

    for (int it = 0; it < iters; ++it) {
        const double before = obj;

        const Rotation3 r = kabsch_rotation(q_ref, current);
        Srvf rotated{r * current.values};
        const double d_rot = srvf_distance(q_ref, rotated);
        if (d_rot <= obj) {
            current = std::move(rotated);
            rot_total = r * rot_total;
            obj = d_rot;
        }

        const GammaResult g = optimal_gamma(q_ref, current);
        Diffeo best_gamma = g.gamma;
        Srvf best_warp = apply_gamma(current, g.gamma);
        double d_warp = srvf_distance(q_ref, best_warp);
        {
            Diffeo cand = detail::refine_gamma(q_ref, current, g.gamma);
            Srvf warped = apply_gamma(current, cand);
            const double d = srvf_distance(q_ref, warped);
            if (d < d_warp) {
                d_warp = d;
                best_gamma = std::move(cand);
                best_warp = std::move(warped);
            }
        }
        if (d_warp <= obj) {
            current = std::move(best_warp);
            gamma_total = compose_gamma(gamma_total, best_gamma);
            obj = d_warp;
        }

        ++rounds;
        if (before - obj < 1e-8) break;
    }
    return PairAlignment{std::move(current), rot_total, std::move(gamma_total), obj, rounds};
}

bool should_flip(const Fiber& fiber, const Fiber& reference) {
    const Vec3 r0 = reference.points.col(0);
    const Vec3 r1 = reference.points.col(reference.samples() - 1);
    const Vec3 f0 = fiber.points.col(0);
    const Vec3 f1 = fiber.points.col(fiber.samples() - 1);
    const double keep = (f0 - r0).norm() + (f1 - r1).norm();
    const double flip = (f1 - r0).norm() + (f0 - r1).norm();
    return flip < keep;
}

Fiber oriented_toward(const Fiber& fiber, const Fiber& reference) {
    return should_flip(fiber, reference) ? fiber.reversed() : fiber;
}

double gamma_identity_deviation(const Diffeo& gamma) {
    const int T = gamma.samples();
    const Eigen::VectorXd w = quad_weights(T);
    const double h = grid_step(T);
    double s = 0.0;
    for (int j = 0; j < T; ++j) {
        const double d = gamma.values(j) - h * j;
        s += w(j) * d * d;
    }
    return s;
}

}  // namespace tractalign
