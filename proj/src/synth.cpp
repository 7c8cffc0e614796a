#include "tractalign/synth.hpp"

#include <cmath>
#include <random>

namespace tractalign {

namespace {

// Hand-rolled draws on top of mt19937_64 keep the byte streams identical
// across standard libraries.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform() { return (eng_() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }

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
        } while (v.norm() < 1e-12);
        return v.normalized();
    }

  private:
    std::mt19937_64 eng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

Rotation3 axis_angle(const Vec3& axis, double angle) {
    return Eigen::AngleAxisd(angle, axis).toRotationMatrix();
}

Vec3 backbone_point(Backbone b, double t) {
    switch (b) {
        case Backbone::Arc:
            return Vec3(std::cos(0.9 * M_PI * (t - 0.5)), std::sin(0.9 * M_PI * (t - 0.5)),
                        0.2 * (t - 0.5));
        case Backbone::Helix:
            return Vec3(0.5 * std::cos(2.0 * M_PI * t), 0.5 * std::sin(2.0 * M_PI * t), t);
        case Backbone::CShape:
            return Vec3(std::cos(1.6 * M_PI * (t - 0.5)), 0.8 * std::sin(1.6 * M_PI * (t - 0.5)),
                        0.1 * std::sin(M_PI * t));
    }
    throw BadSpec("unknown backbone");
}

// Monotone exponential-family warp; a = 0 is the identity.
double warp_at(double a, double t) {
    if (std::abs(a) < 1e-8) return t;
    return (std::exp(a * t) - 1.0) / (std::exp(a) - 1.0);
}

// Smooth low-frequency vector field: constant term plus two sine/cosine
// harmonics with decaying weights.
struct SmoothField {
    Vec3 c0, s1, c1, s2;

    static SmoothField draw(Rng& rng, double magnitude) {
        auto v = [&] { return Vec3(rng.normal(), rng.normal(), rng.normal()) * magnitude; };
        return SmoothField{0.5 * v(), 0.7 * v(), 0.5 * v(), 0.35 * v()};
    }

    Vec3 at(double t) const {
        return c0 + s1 * std::sin(M_PI * t) + c1 * std::cos(M_PI * t) + s2 * std::sin(2.0 * M_PI * t);
    }
};

double bump_profile(double t) {
    const double d = (t - 0.45) / 0.13;
    return 0.35 + 0.45 * std::exp(-0.5 * d * d);
}

void check_magnitudes(double displacement, double warp, double rotation) {
    if (displacement < 0.0 || warp < 0.0 || rotation < 0.0)
        throw BadSpec("synth: perturbation magnitudes must be >= 0");
}

}  // namespace

std::string backbone_name(Backbone b) {
    switch (b) {
        case Backbone::Arc: return "arc";
        case Backbone::Helix: return "helix";
        case Backbone::CShape: return "cshape";
    }
    return "arc";
}

Backbone backbone_from_name(const std::string& name) {
    if (name == "arc") return Backbone::Arc;
    if (name == "helix") return Backbone::Helix;
    if (name == "cshape") return Backbone::CShape;
    throw BadSpec("synth: unknown backbone '" + name + "'");
}

Bundle synth_bundle(const SynthSpec& spec, std::uint64_t seed) {
    if (spec.fibers < 1) throw BadSpec("synth: need at least one fiber");
    if (spec.samples < 3) throw BadSpec("synth: need at least three samples");
    if (spec.scale <= 0.0) throw BadSpec("synth: scale must be positive");
    check_magnitudes(spec.displacement, spec.warp, spec.rotation);

    Rng rng(seed);
    const int T = spec.samples;
    Vec3 center = Vec3::Zero();
    for (int j = 0; j < T; ++j) center += backbone_point(spec.backbone, j / double(T - 1));
    center *= spec.scale / T;

    Bundle bundle;
    bundle.name = backbone_name(spec.backbone);
    bundle.provenance =
        Provenance{"synth:" + backbone_name(spec.backbone), T, spec.fibers, seed};
    for (int i = 0; i < spec.fibers; ++i) {
        const double a = rng.uniform(-spec.warp, spec.warp);
        const SmoothField field = SmoothField::draw(rng, spec.displacement);
        const Vec3 axis = rng.unit_vector();
        const double angle = rng.uniform(0.0, spec.rotation);
        const Rotation3 rot = axis_angle(axis, angle);

        Points3 pts(3, T);
        Eigen::VectorXd prof(T);
        const double amp = spec.profiles ? 1.0 + spec.profile_noise * rng.normal() : 1.0;
        for (int j = 0; j < T; ++j) {
            const double t = j / double(T - 1);
            const double w = warp_at(a, t);
            const Vec3 p = spec.scale * (backbone_point(spec.backbone, w) + field.at(t));
            pts.col(j) = rot * (p - center) + center;
            if (spec.profiles) prof(j) = amp * bump_profile(w) + spec.profile_noise * rng.normal();
        }
        bundle.fibers.push_back(Fiber{std::move(pts)});
        if (spec.profiles) bundle.profiles.push_back(std::move(prof));
        char buf[16];
        std::snprintf(buf, sizeof(buf), "f%03d", i);
        bundle.fiber_ids.emplace_back(buf);
    }
    return bundle;
}

Bundle perturb_bundle(const Bundle& bundle, const PerturbSpec& spec, std::uint64_t seed) {
    check_magnitudes(spec.displacement, spec.warp, spec.rotation);
    Rng rng(seed);
    const int T = bundle.grid_size();
    Bundle out;
    out.name = bundle.name;
    out.fiber_ids = bundle.fiber_ids;
    out.provenance = bundle.provenance;
    out.provenance.source += "+perturb";
    out.provenance.seed = seed;

    const Vec3 center = bundle_points(bundle).rowwise().mean();
    const Rotation3 global_rot =
        axis_angle(rng.unit_vector(), rng.uniform(0.0, spec.global_rotation));
    const Vec3 shift = spec.global_shift * rng.unit_vector();

    for (int i = 0; i < bundle.fiber_count(); ++i) {
        const double a = rng.uniform(-spec.warp, spec.warp);
        Eigen::VectorXd gv(T);
        for (int j = 0; j < T; ++j) gv(j) = warp_at(a, j / double(T - 1));
        const Diffeo gamma{gv};

        Fiber f = reparameterize(bundle.fibers[i], gamma);
        const SmoothField field = SmoothField::draw(rng, spec.displacement);
        for (int j = 0; j < T; ++j) f.points.col(j) += field.at(j / double(T - 1));

        const Rotation3 rot = axis_angle(rng.unit_vector(), rng.uniform(0.0, spec.rotation));
        const Vec3 fc = f.centroid();
        f.points = (rot * (f.points.colwise() - fc)).colwise() + fc;
        f.points = (global_rot * (f.points.colwise() - center)).colwise() + (center + shift);
        out.fibers.push_back(std::move(f));

        if (i < static_cast<int>(bundle.profiles.size())) {
            Eigen::VectorXd p(T);
            for (int j = 0; j < T; ++j) {
                const double x = gv(j) * (T - 1);
                const int i0 = std::min(static_cast<int>(x), T - 2);
                const double fr = std::min(std::max(x - i0, 0.0), 1.0);
                p(j) = (1.0 - fr) * bundle.profiles[i](i0) + fr * bundle.profiles[i](i0 + 1) +
                       spec.profile_noise * rng.normal();
            }
            out.profiles.push_back(std::move(p));
        }
    }
    return out;
}

}  // namespace tractalign
