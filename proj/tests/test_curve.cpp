#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_support.hpp"
#include "tractalign/curve.hpp"

using namespace tractalign;

namespace {

Fiber line_fiber(const Vec3& a, const Vec3& b, int T) {
    Points3 pts(3, T);
    for (int j = 0; j < T; ++j) pts.col(j) = a + (b - a) * (j / double(T - 1));
    return Fiber{std::move(pts)};
}

Fiber helix_fiber(int T) {
    Points3 pts(3, T);
    for (int j = 0; j < T; ++j) {
        const double t = j / double(T - 1);
        pts.col(j) = Vec3(std::cos(2 * M_PI * t), std::sin(2 * M_PI * t), t);
    }
    return Fiber{std::move(pts)};
}

// Analytic helix SRVF: the speed is constant, so q is the scaled tangent.
Srvf helix_srvf_analytic(int T) {
    const double speed = std::sqrt(4 * M_PI * M_PI + 1.0);
    Points3 q(3, T);
    for (int j = 0; j < T; ++j) {
        const double t = j / double(T - 1);
        q.col(j) = Vec3(-2 * M_PI * std::sin(2 * M_PI * t), 2 * M_PI * std::cos(2 * M_PI * t), 1.0) / speed;
    }
    return Srvf{q};
}

// Translate to the first point and scale to unit length.
Points3 normalized_shape(const Fiber& f) {
    Points3 p = f.points.colwise() - f.points.col(0);
    return p / Fiber{p}.length();
}

}  // namespace

TEST_CASE("resample straight segment") {
    Points3 pts(3, 2);
    pts.col(0) = Vec3(0, 0, 0);
    pts.col(1) = Vec3(1, 0, 0);
    const Fiber out = resample(Fiber{pts}, 5);
    REQUIRE(out.samples() == 5);
    for (int j = 0; j < 5; ++j) {
        CHECK(out.points(0, j) == doctest::Approx(j * 0.25).epsilon(1e-12));
        CHECK(out.points(1, j) == 0.0);
        CHECK(out.points(2, j) == 0.0);
    }
}

TEST_CASE("resample of an already uniform fiber is the identity") {
    const Fiber f = line_fiber(Vec3(1, 2, 3), Vec3(4, 5, 6), 17);
    const Fiber out = resample(f, 17);
    CHECK(tst::sup_diff(out.points, f.points) < 1e-12);
}

TEST_CASE("resample quarter circle yields uniform chords") {
    // Non-uniformly sampled quarter circle: cluster samples near one end.
    const int n = 160;
    Points3 pts(3, n);
    for (int j = 0; j < n; ++j) {
        const double u = std::pow(j / double(n - 1), 2.5);
        pts.col(j) = Vec3(std::cos(u * M_PI / 2), std::sin(u * M_PI / 2), 0.0);
    }
    const Fiber out = resample(Fiber{pts}, 100);
    double lo = 1e30, hi = 0.0;
    for (int j = 1; j < 100; ++j) {
        const double c = (out.points.col(j) - out.points.col(j - 1)).norm();
        lo = std::min(lo, c);
        hi = std::max(hi, c);
    }
    CHECK((hi - lo) / hi < 1e-3);
    // Oracle: the analytic arc-length parameterization has points at
    // uniform angles.
    for (int j = 0; j < 100; ++j) {
        const double ang = (j / 99.0) * M_PI / 2;
        CHECK((out.points.col(j) - Vec3(std::cos(ang), std::sin(ang), 0)).norm() < 2e-3);
    }
}

TEST_CASE("resample rejects degenerate input") {
    Points3 pts = Points3::Zero(3, 4);
    CHECK_THROWS_AS(resample(Fiber{pts}, 10), DegenerateFiber);
}

TEST_CASE("to_srvf of a unit-speed line is constant") {
    const Srvf q = to_srvf(line_fiber(Vec3(0, 0, 0), Vec3(1, 0, 0), 50));
    for (int j = 0; j < 50; ++j) CHECK((q.values.col(j) - Vec3(1, 0, 0)).norm() < 1e-12);
}

TEST_CASE("to_srvf is translation invariant") {
    tst::Rng rng(7);
    const Fiber f = tst::random_fiber(rng, 100);
    Fiber g = f;
    g.points.colwise() += Vec3(5, 5, 5);
    CHECK(tst::sup_diff(to_srvf(f).values, to_srvf(g).values) < 1e-9);
}

TEST_CASE("to_srvf matches the analytic helix SRVF") {
    const int T = 200;
    const Srvf q = to_srvf(helix_fiber(T));
    const Srvf ref = helix_srvf_analytic(T);
    CHECK(tst::sup_diff(q.values, ref.values) < 1e-3);
}

TEST_CASE("from_srvf of a constant SRVF is a straight segment") {
    const int T = 60;
    Points3 v(3, T);
    for (int j = 0; j < T; ++j) v.col(j) = Vec3(1, 0, 0);
    const Fiber f = from_srvf(Srvf{v}, Vec3::Zero(), 1.0);
    for (int j = 0; j < T; ++j)
        CHECK((f.points.col(j) - Vec3(j / double(T - 1), 0, 0)).norm() < 1e-12);
    CHECK(f.length() == doctest::Approx(1.0));
}

TEST_CASE("srvf roundtrip reproduces the fiber after normalization") {
    tst::Rng rng(11);
    for (int rep = 0; rep < 20; ++rep) {
        const Fiber f = tst::random_fiber(rng, 100 + 10 * (rep % 3));
        const Fiber back = from_srvf(to_srvf(f));
        CHECK(tst::sup_diff(normalized_shape(f), normalized_shape(back)) < 1e-6);
    }
}

TEST_CASE("srvf roundtrip in the other direction") {
    tst::Rng rng(13);
    for (int rep = 0; rep < 20; ++rep) {
        const Srvf q = tst::random_srvf(rng, 120);
        const Srvf back = to_srvf(from_srvf(q, Vec3(1, 2, 3), 2.5));
        CHECK(tst::sup_diff(q.values, back.values) < 1e-6);
    }
}

TEST_CASE("helix shape recovered from its analytic SRVF") {
    const int T = 200;
    const Fiber rec = from_srvf(helix_srvf_analytic(T));
    CHECK(tst::sup_diff(normalized_shape(rec), normalized_shape(helix_fiber(T))) < 2e-3);
}

TEST_CASE("inner products") {
    tst::Rng rng(17);
    const Srvf q = tst::random_srvf(rng, 100);
    CHECK(std::abs(inner(q, q) - 1.0) < 1e-9);

    const int T = 40;
    Points3 a(3, T), b(3, T);
    for (int j = 0; j < T; ++j) {
        a.col(j) = Vec3(1, 0, 0);
        b.col(j) = Vec3(0, 1, 0);
    }
    CHECK(std::abs(inner(Srvf{a}, Srvf{b})) < 1e-15);

    Points3 short_block(3, 10);
    CHECK_THROWS_AS(inner(q, Srvf{short_block}), GridMismatch);
}

TEST_CASE("inner matches Simpson quadrature at 10x resolution") {
    // Closed-form integrands so the oracle integrates the true functions.
    const int T = 500;
    const auto f1 = [](double t) { return Vec3(std::sin(M_PI * t), 0.3 * t, std::cos(2 * M_PI * t)); };
    const auto f2 = [](double t) { return Vec3(0.2, std::cos(M_PI * t), 0.5 * t * t); };
    Points3 a(3, T), b(3, T);
    for (int j = 0; j < T; ++j) {
        const double t = j / double(T - 1);
        a.col(j) = f1(t);
        b.col(j) = f2(t);
    }
    const double got = l2_inner(a, b);
    const double want = tst::simpson([&](double t) { return f1(t).dot(f2(t)); }, 10 * T);
    CHECK(std::abs(got - want) < 1e-6);
}

TEST_CASE("apply_gamma with the identity changes nothing") {
    tst::Rng rng(19);
    const Srvf q = tst::random_srvf(rng, 100);
    const Srvf out = apply_gamma(q, Diffeo::identity(100));
    CHECK(tst::sup_diff(out.values, q.values) < 1e-12);
}

TEST_CASE("apply_gamma keeps unit norm and rejects bad warps") {
    tst::Rng rng(23);
    for (int rep = 0; rep < 10; ++rep) {
        const Srvf q = tst::random_srvf(rng, 100);
        const Diffeo g = tst::random_gamma(rng, 100);
        CHECK(std::abs(inner(apply_gamma(q, g), apply_gamma(q, g)) - 1.0) < 1e-9);
    }
    Eigen::VectorXd bad = Eigen::VectorXd::LinSpaced(100, 0.0, 1.0);
    bad(50) = bad(40);  // plateau then drop
    bad(45) = 0.9;
    CHECK_THROWS_AS(apply_gamma(tst::random_srvf(rng, 100), Diffeo{bad}), NonMonotoneGamma);
}

TEST_CASE("reparameterization acts by isometries") {
    tst::Rng rng(29);
    for (int rep = 0; rep < 25; ++rep) {
        const Srvf q1 = tst::random_srvf(rng, 100);
        const Srvf q2 = tst::random_srvf(rng, 100);
        const Diffeo g = tst::random_gamma(rng, 100);
        const double before = srvf_distance(q1, q2);
        const double after = srvf_distance(apply_gamma(q1, g), apply_gamma(q2, g));
        CHECK(std::abs(before - after) < 1e-3);
    }
}

TEST_CASE("kabsch identity and recovery") {
    tst::Rng rng(31);
    const Srvf q = tst::random_srvf(rng, 100);
    CHECK((kabsch_rotation(q, q) - Rotation3::Identity()).norm() < 1e-9);

    for (int rep = 0; rep < 10; ++rep) {
        const Rotation3 r = rng.rotation();
        const Srvf rotated{(r.transpose() * q.values).eval()};
        const Rotation3 got = kabsch_rotation(q, rotated);
        CHECK((got - r).norm() < 1e-6);
        CHECK(std::abs(got.determinant() - 1.0) < 1e-9);
    }
}

TEST_CASE("kabsch beats sampled rotations") {
    tst::Rng rng(37);
    const Srvf q_ref = tst::random_srvf(rng, 80);
    const Srvf q = tst::random_srvf(rng, 80);
    const Rotation3 best = kabsch_rotation(q_ref, q);
    const double d_best = srvf_distance(q_ref, Srvf{(best * q.values).eval()});
    for (int rep = 0; rep < 1000; ++rep) {
        const Rotation3 r = rng.rotation();
        CHECK(d_best <= srvf_distance(q_ref, Srvf{(r * q.values).eval()}) + 1e-12);
    }
}

TEST_CASE("optimal_gamma on identical inputs is the identity") {
    tst::Rng rng(41);
    const Srvf q = tst::random_srvf(rng, 100);
    const GammaResult g = optimal_gamma(q, q);
    CHECK(g.distance == 0.0);
    CHECK((g.gamma.values - Diffeo::identity(100).values).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("optimal_gamma recovers a bounded-slope warp") {
    tst::Rng rng(43);
    const int T = 100;
    for (int rep = 0; rep < 5; ++rep) {
        const Srvf q_ref = tst::random_srvf(rng, T);
        const Diffeo g_star = tst::random_gamma(rng, T, 1.0);
        const Srvf q = apply_gamma(q_ref, g_star);
        const GammaResult got = optimal_gamma(q_ref, q);
        // The raw lattice quantizes slopes, leaving a sqrt(gamma-dot)
        // mismatch floor; align_pair's smoothing shrinks it further.
        CHECK(got.distance < 0.1);
        CHECK(align_pair(q_ref, q).distance < 1e-2);
        // Composing the recovered warp with g_star should land near the
        // identity: g_star(got(t)) = t.
        double worst = 0.0;
        for (int j = 0; j < T; ++j) {
            const double x = got.gamma.values(j) * (T - 1);
            const int i0 = std::min(static_cast<int>(x), T - 2);
            const double f = x - i0;
            const double composed = (1 - f) * g_star.values(i0) + f * g_star.values(i0 + 1);
            worst = std::max(worst, std::abs(composed - j / double(T - 1)));
        }
        CHECK(worst <= 2.0 / T + 1e-9);
    }
}

TEST_CASE("optimal_gamma distance on a quadratic warp stays small") {
    // gamma*(t) = t*t has unbounded inverse slope at zero, outside the
    // lattice's slope window; the distance still has to come out small
    // because the SRVF nearly vanishes there.
    const int T = 100;
    tst::Rng rng(47);
    const Srvf q_ref = tst::random_srvf(rng, T);
    Eigen::VectorXd gv(T);
    for (int j = 0; j < T; ++j) {
        const double t = j / double(T - 1);
        gv(j) = t * t;
    }
    gv(T - 1) = 1.0;
    const Srvf q = apply_gamma(q_ref, Diffeo{gv});
    CHECK(optimal_gamma(q_ref, q).distance < 0.1);
    CHECK(align_pair(q_ref, q).distance < 2e-2);
}

TEST_CASE("optimal_gamma is approximately symmetric") {
    tst::Rng rng(53);
    for (int rep = 0; rep < 8; ++rep) {
        const Srvf a = tst::random_srvf(rng, 100);
        const Srvf b = apply_gamma(tst::random_srvf(rng, 100), tst::random_gamma(rng, 100, 0.8));
        CHECK(std::abs(optimal_gamma(a, b).distance - optimal_gamma(b, a).distance) < 5e-3);
    }
}

TEST_CASE("optimal_gamma equals brute force on coarse grids") {
    tst::Rng rng(59);
    for (int rep = 0; rep < 5; ++rep) {
        const Srvf a = tst::random_srvf(rng, 12);
        const Srvf b = tst::random_srvf(rng, 12);
        const double dp = optimal_gamma(a, b).distance;
        const double brute = tst::brute_force_gamma_cost(a.values, b.values);
        CHECK(dp == brute);
    }
}

TEST_CASE("align_pair leaves aligned inputs alone") {
    tst::Rng rng(61);
    const Srvf q = tst::random_srvf(rng, 100);
    const PairAlignment pa = align_pair(q, q);
    CHECK(pa.distance < 1e-12);
    CHECK((pa.rotation - Rotation3::Identity()).norm() < 1e-9);
    CHECK((pa.gamma.values - Diffeo::identity(100).values).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("align_pair undoes a planted rotation plus warp") {
    tst::Rng rng(67);
    for (int rep = 0; rep < 5; ++rep) {
        const Srvf q_ref = tst::random_srvf(rng, 100);
        const Rotation3 r = rng.rotation();
        const Diffeo g = tst::random_gamma(rng, 100, 0.8);
        const Srvf q = apply_gamma(Srvf{(r * q_ref.values).eval()}, g);
        const PairAlignment pa = align_pair(q_ref, q);
        CHECK(pa.distance < 1e-2);
        // The objective never rises as rounds accumulate.
        const double d1 = align_pair(q_ref, q, 1).distance;
        const double d2 = align_pair(q_ref, q, 2).distance;
        CHECK(d2 <= d1 + 1e-12);
        CHECK(pa.distance <= d2 + 1e-12);
    }
}

TEST_CASE("fiber orientation flip rule") {
    const Fiber ref = line_fiber(Vec3(0, 0, 0), Vec3(1, 0, 0), 10);
    const Fiber fwd = line_fiber(Vec3(0, 0.1, 0), Vec3(1, 0.1, 0), 10);
    const Fiber bwd = line_fiber(Vec3(1, 0.1, 0), Vec3(0, 0.1, 0), 10);
    CHECK(!should_flip(fwd, ref));
    CHECK(should_flip(bwd, ref));
    CHECK(tst::sup_diff(oriented_toward(bwd, ref).points, fwd.points) < 1e-15);
}

TEST_CASE("unit norm closure across constructors") {
    tst::Rng rng(71);
    for (int rep = 0; rep < 10; ++rep) {
        const Srvf q = tst::random_srvf(rng, 100);
        CHECK(std::abs(inner(q, q) - 1.0) < 1e-9);
        const Srvf w = apply_gamma(q, tst::random_gamma(rng, 100));
        CHECK(std::abs(inner(w, w) - 1.0) < 1e-9);
    }
}
