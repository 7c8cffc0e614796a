#pragma once

#include <cstdint>
#include <string>

#include "tractalign/bundle.hpp"

namespace tractalign {

enum class Backbone { Arc, Helix, CShape };

// Seeded synthetic tract generator: a smooth backbone plus per-fiber
// smooth displacement, reparameterization and rotation perturbations of
// controllable magnitude, with optional FA-like bump profiles that move
// with each fiber's warp. Zero magnitudes give identical fibers.
struct SynthSpec {
    Backbone backbone = Backbone::Arc;
    int fibers = 50;
    int samples = 100;
    double displacement = 0.08;   // smooth spatial offset amplitude
    double warp = 0.5;            // reparameterization strength
    double rotation = 0.08;       // per-fiber rotation angle bound (radians)
    double scale = 1.0;
    bool profiles = false;
    double profile_noise = 0.01;
};

Bundle synth_bundle(const SynthSpec& spec, std::uint64_t seed);

// Derives a synthetic subject from an existing bundle: extra per-fiber
// perturbations plus one whole-bundle rigid motion.
struct PerturbSpec {
    double displacement = 0.08;
    double warp = 0.5;
    double rotation = 0.08;
    double global_rotation = 0.2;  // radians
    double global_shift = 0.3;     // spatial units
    double profile_noise = 0.01;
};

Bundle perturb_bundle(const Bundle& bundle, const PerturbSpec& spec, std::uint64_t seed);

Backbone backbone_from_name(const std::string& name);  // BadSpec on unknown names
std::string backbone_name(Backbone b);

}  // namespace tractalign
