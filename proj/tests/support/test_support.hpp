#pragma once

// Shared generators and independent oracles for the test suites. Oracles
// deliberately take their own code paths (different formulas/quadratures)
// from the library implementations they check.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "tractalign/curve.hpp"

namespace tst {

using tractalign::Diffeo;
using tractalign::Fiber;
using tractalign::Points3;
using tractalign::Srvf;
using tractalign::Vec3;

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform() { return (eng_() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    int index(int n) { return static_cast<int>(eng_() % static_cast<std::uint64_t>(n)); }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = uniform(-1.0, 1.0);
            v = uniform(-1.0, 1.0);
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        has_spare_ = true;
        return u * m;
    }

    Vec3 unit_vector() {
        Vec3 v;
        do {
            v = Vec3(normal(), normal(), normal());
        } while (v.norm() < 1e-9);
        return v.normalized();
    }

    Eigen::Matrix3d rotation() {
        return Eigen::AngleAxisd(uniform(0.0, M_PI), unit_vector()).toRotationMatrix();
    }

    // Haar-ish random SO(n) via QR with sign fixing.
    Eigen::MatrixXd rotation_n(int n) {
        Eigen::MatrixXd g(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) g(i, j) = normal();
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
        Eigen::MatrixXd q = qr.householderQ();
        const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
        for (int j = 0; j < n; ++j)
            if (r(j, j) < 0) q.col(j) *= -1.0;
        if (q.determinant() < 0) q.col(0) *= -1.0;
        return q;
    }

  private:
    std::mt19937_64 eng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// Smooth random space curve with a dominant drift term so the speed never
// vanishes. `wiggle` scales the oscillatory part.
inline Fiber random_fiber(Rng& rng, int T, double wiggle = 0.25, int max_freq = 2) {
    const Vec3 dir = rng.unit_vector();
    std::vector<Vec3> amps_s(max_freq), amps_c(max_freq);
    for (int m = 0; m < max_freq; ++m) {
        amps_s[m] = wiggle / (m + 1) * Vec3(rng.normal(), rng.normal(), rng.normal());
        amps_c[m] = wiggle / (m + 1) * Vec3(rng.normal(), rng.normal(), rng.normal());
    }
    Points3 pts(3, T);
    for (int j = 0; j < T; ++j) {
        const double t = j / double(T - 1);
        Vec3 p = dir * t;
        for (int m = 0; m < max_freq; ++m)
            p += amps_s[m] * std::sin((m + 1) * M_PI * t) + amps_c[m] * (std::cos((m + 1) * M_PI * t) - 1.0);
        pts.col(j) = p;
    }
    return Fiber{std::move(pts)};
}

inline Srvf random_srvf(Rng& rng, int T, double wiggle = 0.25) {
    return tractalign::to_srvf(random_fiber(rng, T, wiggle));
}

// Monotone warp from the exponential family; |a| <= strength.
inline Diffeo random_gamma(Rng& rng, int T, double strength = 1.0) {
    const double a = rng.uniform(-strength, strength);
    Eigen::VectorXd v(T);
    for (int j = 0; j < T; ++j) {
        const double t = j / double(T - 1);
        v(j) = std::abs(a) < 1e-8 ? t : (std::exp(a * t) - 1.0) / (std::exp(a) - 1.0);
    }
    v(0) = 0.0;
    v(T - 1) = 1.0;
    return Diffeo{v};
}

// ---- Oracles ----------------------------------------------------------

// Composite Simpson integration of an analytic scalar function over [0,1].
inline double simpson(const std::function<double(double)>& f, int intervals) {
    if (intervals % 2 == 1) ++intervals;
    const double h = 1.0 / intervals;
    double acc = f(0.0) + f(1.0);
    for (int k = 1; k < intervals; ++k) acc += f(k * h) * (k % 2 == 1 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

// Exhaustive monotone-lattice search matching the documented DP cost: the
// same coprime steps, the same per-segment trapezoid, accumulated left to
// right along every path.
inline double brute_force_gamma_cost(const Points3& qr, const Points3& qv) {
    const int T = static_cast<int>(qr.cols());
    const double h = 1.0 / (T - 1);
    static const int steps[7][2] = {{1, 1}, {1, 2}, {2, 1}, {1, 3}, {3, 1}, {2, 3}, {3, 2}};

    const auto lerp = [&](double pos) -> Vec3 {
        if (pos <= 0.0) return qv.col(0);
        if (pos >= T - 1) return qv.col(T - 1);
        const int i0 = static_cast<int>(pos);
        const double f = pos - i0;
        return (1.0 - f) * qv.col(i0) + f * qv.col(i0 + 1);
    };
    const auto segment = [&](int i, int j, int di, int dj) {
        const int i0 = i - di, j0 = j - dj;
        const double m = double(dj) / di;
        const double sm = std::sqrt(m);
        double acc = 0.0;
        for (int k = i0; k <= i; ++k) {
            const double val = (qr.col(k) - sm * lerp(j0 + m * (k - i0))).squaredNorm();
            acc += (k == i0 || k == i) ? 0.5 * val : val;
        }
        return h * acc;
    };

    double best = std::numeric_limits<double>::infinity();
    // Depth-first over all paths, cost accumulated along the way.
    std::function<void(int, int, double)> walk = [&](int i, int j, double acc) {
        if (i == T - 1 && j == T - 1) {
            if (acc < best) best = acc;
            return;
        }
        for (const auto& s : steps) {
            const int ni = i + s[0], nj = j + s[1];
            if (ni > T - 1 || nj > T - 1) continue;
            walk(ni, nj, acc + segment(ni, nj, s[0], s[1]));
        }
    };
    walk(0, 0, 0.0);
    return std::sqrt(best);
}

// Independent great-circle parallel transport: decompose the vector along
// the geodesic direction, rotate that component in the (src, u) plane and
// keep the orthogonal remainder. A different algebraic route from the
// library's reflection formula.
inline Points3 oracle_transport(const Points3& src, const Points3& dst, const Points3& v) {
    using tractalign::l2_inner;
    const double c = std::clamp(l2_inner(src, dst), -1.0, 1.0);
    const double l = std::acos(c);
    if (l < 1e-14) return v;
    Points3 u = dst - c * src;
    u /= tractalign::l2_norm(u);
    const double a = l2_inner(v, u);
    const Points3 rest = v - a * u;
    return rest + a * (std::cos(l) * u - std::sin(l) * src);
}

inline double sup_diff(const Points3& a, const Points3& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace tst
