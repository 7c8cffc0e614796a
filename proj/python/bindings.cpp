#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tractalign/archive.hpp"
#include "tractalign/cli.hpp"
#include "tractalign/mean.hpp"
#include "tractalign/metrics.hpp"
#include "tractalign/registration.hpp"
#include "tractalign/synth.hpp"
#include "tractalign/tck.hpp"
#include "tractalign/transport.hpp"

namespace py = pybind11;
using namespace tractalign;

namespace {

std::vector<Srvf> srvfs_from_arrays(const std::vector<Points3>& arrays) {
    std::vector<Srvf> out;
    out.reserve(arrays.size());
    for (const Points3& a : arrays) out.push_back(Srvf{a});
    return out;
}

std::vector<Points3> fibers_to_arrays(const std::vector<Fiber>& fibers) {
    std::vector<Points3> out;
    out.reserve(fibers.size());
    for (const Fiber& f : fibers) out.push_back(f.points);
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Fiber bundle registration via means, tangent codes and parallel transport";

    py::register_exception<Error>(m, "TractalignError");

    py::class_<Diffeo>(m, "Diffeo")
        .def(py::init([](Eigen::VectorXd v) { return Diffeo{std::move(v)}; }))
        .def_static("identity", &Diffeo::identity)
        .def_readonly("values", &Diffeo::values);

    py::class_<Bundle>(m, "Bundle")
        .def(py::init<>())
        .def_readwrite("name", &Bundle::name)
        .def_readwrite("fiber_ids", &Bundle::fiber_ids)
        .def_property(
            "fibers", [](const Bundle& b) { return fibers_to_arrays(b.fibers); },
            [](Bundle& b, const std::vector<Points3>& arrays) {
                b.fibers.clear();
                for (const Points3& a : arrays) b.fibers.push_back(Fiber{a});
            })
        .def_readwrite("profiles", &Bundle::profiles)
        .def("fiber_count", &Bundle::fiber_count)
        .def("grid_size", &Bundle::grid_size);

    py::class_<MeanResult>(m, "MeanResult")
        .def_property_readonly("beta_mu", [](const MeanResult& r) { return r.beta_mu.values; })
        .def_property_readonly("aligned",
                               [](const MeanResult& r) {
                                   std::vector<Points3> out;
                                   for (const Srvf& q : r.aligned) out.push_back(q.values);
                                   return out;
                               })
        .def_readonly("gammas", &MeanResult::gammas)
        .def_readonly("iterations", &MeanResult::iterations)
        .def_readonly("final_gradient_norm", &MeanResult::final_gradient_norm)
        .def_readonly("objective", &MeanResult::objective);

    py::class_<BundleCode>(m, "BundleCode")
        .def_property_readonly("beta_mu", [](const BundleCode& c) { return c.beta_mu.values; })
        .def_property_readonly("coeffs", [](const BundleCode& c) { return c.A.entries; })
        .def_property_readonly("residuals", [](const BundleCode& c) { return c.A.residuals; })
        .def_property_readonly("basis_size", [](const BundleCode& c) { return c.basis.size(); })
        .def_readonly("fiber_ids", &BundleCode::fiber_ids);

    py::class_<SoftAlignment>(m, "SoftAlignment")
        .def_readonly("distance", &SoftAlignment::distance)
        .def_readonly("mean_term", &SoftAlignment::mean_term)
        .def_readonly("coeff_term", &SoftAlignment::coeff_term)
        .def_readonly("mean_gamma", &SoftAlignment::mean_gamma)
        .def_readonly("rotation", &SoftAlignment::rotation)
        .def_property_readonly("transported_coeffs",
                               [](const SoftAlignment& s) { return s.transported_A.entries; })
        .def_property_readonly("reconstructed", [](const SoftAlignment& s) {
            std::vector<Points3> out;
            for (const Srvf& q : s.reconstructed) out.push_back(q.values);
            return out;
        });

    py::class_<HardAlignment>(m, "HardAlignment")
        .def_property_readonly("warped_fibers",
                               [](const HardAlignment& h) { return fibers_to_arrays(h.warped_fibers); })
        .def_readonly("pairings", &HardAlignment::pairings)
        .def_readonly("per_pair_gammas", &HardAlignment::per_pair_gammas);

    // curve ops on raw (3, T) arrays
    m.def("resample",
          [](const Points3& pts, int T) { return resample(Fiber{pts}, T).points; },
          py::arg("points"), py::arg("samples"));
    m.def("to_srvf", [](const Points3& pts) { return to_srvf(Fiber{pts}).values; });
    m.def("from_srvf",
          [](const Points3& q, const Vec3& origin, double scale) {
              return from_srvf(Srvf{q}, origin, scale).points;
          },
          py::arg("q"), py::arg("origin") = Vec3::Zero(), py::arg("scale") = 1.0);
    m.def("inner", [](const Points3& a, const Points3& b) { return inner(Srvf{a}, Srvf{b}); });
    m.def("srvf_distance",
          [](const Points3& a, const Points3& b) { return srvf_distance(Srvf{a}, Srvf{b}); });
    m.def("apply_gamma",
          [](const Points3& q, const Diffeo& g) { return apply_gamma(Srvf{q}, g).values; });
    m.def("optimal_gamma", [](const Points3& a, const Points3& b) {
        const GammaResult g = optimal_gamma(Srvf{a}, Srvf{b});
        return py::make_tuple(g.gamma, g.distance);
    });
    m.def("kabsch_rotation",
          [](const Points3& a, const Points3& b) { return kabsch_rotation(Srvf{a}, Srvf{b}); });
    m.def("align_pair",
          [](const Points3& ref, const Points3& q, int iters) {
              const PairAlignment pa = align_pair(Srvf{ref}, Srvf{q}, iters);
              return py::make_tuple(pa.aligned.values, pa.rotation, pa.gamma, pa.distance);
          },
          py::arg("q_ref"), py::arg("q"), py::arg("iters") = 3);

    m.def("karcher_mean",
          [](const std::vector<Points3>& qs, int max_iters, double tol) {
              return karcher_mean(srvfs_from_arrays(qs), max_iters, tol);
          },
          py::arg("srvfs"), py::arg("max_iters") = 50, py::arg("tol") = 1e-6);
    m.def("encode_bundle",
          [](const MeanResult& mean, int basis_size, bool orthonormal) {
              return encode_bundle(mean, basis_size, {}, orthonormal);
          },
          py::arg("mean"), py::arg("basis_size"), py::arg("orthonormal") = true);

    m.def("transport_exact",
          [](const Points3& src, const Points3& dst, const std::vector<Points3>& vs) {
              const Srvf s{src}, d{dst};
              std::vector<TangentVector> tv;
              for (const Points3& v : vs) tv.push_back(TangentVector{v, s});
              std::vector<Points3> out;
              for (const TangentVector& v : transport_exact(s, d, tv).vectors)
                  out.push_back(v.values);
              return out;
          });

    m.def("procrustes_rotation", &procrustes_rotation);
    m.def("bundle_distance",
          [](const BundleCode& a, const BundleCode& b) { return bundle_distance(a, b); });
    m.def("soft_align",
          [](const BundleCode& a, const BundleCode& b) { return soft_align(a, b); });
    m.def("hard_align", &hard_align);
    m.def("place_fibers", [](const std::vector<Points3>& shapes, const Bundle& frame) {
        std::vector<Srvf> qs = srvfs_from_arrays(shapes);
        return fibers_to_arrays(place_fibers(qs, frame));
    });
    m.def("rigid_align", &rigid_align);

    m.def("hausdorff", &hausdorff);
    m.def("bundle_points", &bundle_points);
    m.def("warp_profile", &warp_profile);
    m.def("profile_variability", &profile_variability);

    m.def("synth_bundle",
          [](const std::string& backbone, int fibers, int samples, double displacement,
             double warp, double rotation, double scale, bool profiles, double profile_noise,
             std::uint64_t seed) {
              SynthSpec spec;
              spec.backbone = backbone_from_name(backbone);
              spec.fibers = fibers;
              spec.samples = samples;
              spec.displacement = displacement;
              spec.warp = warp;
              spec.rotation = rotation;
              spec.scale = scale;
              spec.profiles = profiles;
              spec.profile_noise = profile_noise;
              return synth_bundle(spec, seed);
          },
          py::arg("backbone") = "arc", py::arg("fibers") = 50, py::arg("samples") = 100,
          py::arg("displacement") = 0.08, py::arg("warp") = 0.5, py::arg("rotation") = 0.08,
          py::arg("scale") = 1.0, py::arg("profiles") = false, py::arg("profile_noise") = 0.01,
          py::arg("seed") = 0);
    m.def("perturb_bundle",
          [](const Bundle& b, double displacement, double warp, double rotation,
             double global_rotation, double global_shift, std::uint64_t seed) {
              PerturbSpec spec;
              spec.displacement = displacement;
              spec.warp = warp;
              spec.rotation = rotation;
              spec.global_rotation = global_rotation;
              spec.global_shift = global_shift;
              return perturb_bundle(b, spec, seed);
          },
          py::arg("bundle"), py::arg("displacement") = 0.08, py::arg("warp") = 0.5,
          py::arg("rotation") = 0.08, py::arg("global_rotation") = 0.2,
          py::arg("global_shift") = 0.3, py::arg("seed") = 1);

    m.def("load_bundle", &load_bundle, py::arg("path"), py::arg("samples") = 100,
          py::arg("fibers") = 50, py::arg("seed") = 0);
    m.def("save_bundle", [](const Bundle& b, const std::string& path) {
        save_archive(BundleArchive{1, b, std::nullopt}, path);
    });
    m.def("write_tck", [](const std::vector<Points3>& fibers, const std::string& path) {
        std::vector<Fiber> fs;
        for (const Points3& p : fibers) fs.push_back(Fiber{p});
        write_tck(make_tck(std::move(fs)), path);
    });
    m.def("read_tck", [](const std::string& path) {
        return fibers_to_arrays(read_tck(path).streamlines);
    });

    m.def("run_cli", [](const std::vector<std::string>& args) { return run_cli(args); });
}
