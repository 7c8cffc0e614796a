#include "tractalign/cli.hpp"

#include <atomic>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "tractalign/archive.hpp"
#include "tractalign/mean.hpp"
#include "tractalign/metrics.hpp"
#include "tractalign/registration.hpp"
#include "tractalign/svg.hpp"
#include "tractalign/synth.hpp"
#include "tractalign/tck.hpp"

namespace tractalign {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json config_to_json(const RunConfig& c) {
    return json{{"subcommand", c.subcommand},
                {"inputs", c.inputs},
                {"template", c.template_path},
                {"out", c.output},
                {"samples", c.samples},
                {"fibers", c.fibers},
                {"basis", c.basis},
                {"transport", c.transport},
                {"paper_rescale", c.paper_rescale},
                {"raw_basis", c.raw_basis},
                {"seed", c.seed},
                {"jobs", c.jobs},
                {"max_iters", c.max_iters},
                {"tol", c.tol},
                {"backbone", c.backbone},
                {"displacement", c.displacement},
                {"warp", c.warp},
                {"rotation", c.rotation},
                {"scale", c.scale},
                {"profiles", c.profiles},
                {"profile_noise", c.profile_noise},
                {"emit_tck", c.emit_tck}};
}

void config_from_json(const json& j, RunConfig& c) {
    const auto get = [&](const char* key, auto& out) {
        if (j.contains(key)) out = j.at(key).get<std::decay_t<decltype(out)>>();
    };
    get("inputs", c.inputs);
    get("template", c.template_path);
    get("out", c.output);
    get("samples", c.samples);
    get("fibers", c.fibers);
    get("basis", c.basis);
    get("transport", c.transport);
    get("paper_rescale", c.paper_rescale);
    get("raw_basis", c.raw_basis);
    get("seed", c.seed);
    get("jobs", c.jobs);
    get("max_iters", c.max_iters);
    get("tol", c.tol);
    get("backbone", c.backbone);
    get("displacement", c.displacement);
    get("warp", c.warp);
    get("rotation", c.rotation);
    get("scale", c.scale);
    get("profiles", c.profiles);
    get("profile_noise", c.profile_noise);
    get("emit_tck", c.emit_tck);
}

void write_provenance(const RunConfig& cfg) {
    fs::create_directories(cfg.output);
    std::ofstream out(fs::path(cfg.output) / "config.json");
    out << config_to_json(cfg).dump(1, '\t') << '\n';
}

RegistrationOptions transport_options(const RunConfig& cfg) {
    RegistrationOptions opts;
    opts.paper_rescale = cfg.paper_rescale;
    if (cfg.transport == "exact") return opts;
    if (cfg.transport.rfind("stepwise:", 0) == 0) {
        opts.stepwise_k = std::stoi(cfg.transport.substr(9));
        if (opts.stepwise_k < 2) throw Error("transport: stepwise k must be >= 2");
        return opts;
    }
    throw Error("transport mode must be 'exact' or 'stepwise:<k>': got " + cfg.transport);
}

SynthSpec synth_spec(const RunConfig& cfg) {
    SynthSpec spec;
    spec.backbone = backbone_from_name(cfg.backbone);
    spec.fibers = cfg.fibers;
    spec.samples = cfg.samples;
    spec.displacement = cfg.displacement;
    spec.warp = cfg.warp;
    spec.rotation = cfg.rotation;
    spec.scale = cfg.scale;
    spec.profiles = cfg.profiles;
    spec.profile_noise = cfg.profile_noise;
    return spec;
}

int cmd_synth(const RunConfig& cfg) {
    write_provenance(cfg);
    const Bundle bundle = synth_bundle(synth_spec(cfg), cfg.seed);
    save_archive(BundleArchive{1, bundle, std::nullopt},
                 (fs::path(cfg.output) / "bundle.json").string());
    if (cfg.emit_tck)
        write_tck(make_tck(bundle.fibers), (fs::path(cfg.output) / "bundle.tck").string());
    if (bundle.has_profiles())
        write_profiles_csv(bundle.profiles, (fs::path(cfg.output) / "profiles.csv").string());
    std::fprintf(stderr, "synth: wrote %d fibers to %s\n", bundle.fiber_count(),
                 cfg.output.c_str());
    return 0;
}

int cmd_convert(const RunConfig& cfg) {
    if (cfg.inputs.size() != 1) throw Error("convert: exactly one --input required");
    const std::string& in = cfg.inputs.front();
    const std::string& out = cfg.output;
    const auto has_ext = [](const std::string& p, const char* e) {
        return p.size() > std::strlen(e) && p.substr(p.size() - std::strlen(e)) == e;
    };
    if (has_ext(in, ".tck") && has_ext(out, ".json")) {
        TckFile tck = read_tck(in);
        Bundle b;
        b.name = fs::path(in).stem().string();
        b.fibers = std::move(tck.streamlines);
        for (int i = 0; i < b.fiber_count(); ++i) b.fiber_ids.push_back("f" + std::to_string(i));
        b.provenance.source = in;
        save_archive(BundleArchive{1, std::move(b), std::nullopt}, out);
    } else if (has_ext(in, ".json") && has_ext(out, ".tck")) {
        BundleArchive archive = load_archive(in);
        write_tck(make_tck(std::move(archive.bundle.fibers)), out);
    } else {
        throw Error("convert: expected .tck <-> .json, got " + in + " -> " + out);
    }
    std::fprintf(stderr, "convert: %s -> %s\n", in.c_str(), out.c_str());
    return 0;
}

int cmd_mean(const RunConfig& cfg) {
    if (cfg.inputs.size() != 1) throw Error("mean: exactly one --input required");
    write_provenance(cfg);
    const Bundle bundle = load_bundle(cfg.inputs.front(), cfg.samples, cfg.fibers, cfg.seed);
    const MeanResult mean = karcher_mean(bundle_srvfs(bundle), cfg.max_iters, cfg.tol);
    std::fprintf(stderr, "mean: %d fibers, %d iterations, gradient %.3g\n", bundle.fiber_count(),
                 mean.iterations, mean.final_gradient_norm);
    const BundleCode code = encode_bundle(mean, cfg.basis, bundle.fiber_ids, !cfg.raw_basis);
    save_archive(BundleArchive{1, bundle, code}, (fs::path(cfg.output) / "mean.json").string());
    plot_gamma_panel(mean.gammas, "within-bundle warps to the mean",
                     (fs::path(cfg.output) / "gammas.svg").string());
    if (bundle.has_profiles()) {
        std::vector<Eigen::VectorXd> after;
        after.reserve(bundle.profiles.size());
        for (std::size_t i = 0; i < bundle.profiles.size(); ++i)
            after.push_back(warp_profile(bundle.profiles[i], mean.gammas[i]));
        plot_profile_heatmaps(bundle.profiles, after, "profiles before/after alignment",
                              (fs::path(cfg.output) / "profiles.svg").string());
    }
    return 0;
}

struct SubjectOutcome {
    std::string id;
    bool ok = false;
    std::string message;
    double distance = 0.0;
    double mean_term = 0.0;
    double coeff_term = 0.0;
};

SubjectOutcome process_subject(const RunConfig& cfg, const std::string& path,
                               const Bundle& tmpl_bundle, const BundleCode& tmpl_code) {
    SubjectOutcome res;
    res.id = fs::path(path).stem().string();
    const fs::path dir = fs::path(cfg.output) / res.id;
    try {
        fs::create_directories(dir);
        Bundle subject = load_bundle(path, cfg.samples, cfg.fibers, cfg.seed);
        subject = rigid_align(subject, tmpl_bundle);
        subject = orient_to_reference(std::move(subject), tmpl_bundle.fibers.front());
        save_archive(BundleArchive{1, subject, std::nullopt}, (dir / "rigid.json").string());

        const MeanResult mean = karcher_mean(bundle_srvfs(subject), cfg.max_iters, cfg.tol);
        const BundleCode code = encode_bundle(mean, cfg.basis, subject.fiber_ids, !cfg.raw_basis);

        const SoftAlignment soft = soft_align(code, tmpl_code, transport_options(cfg));
        Bundle soft_bundle;
        soft_bundle.name = subject.name + "-soft";
        soft_bundle.fibers = place_fibers(soft.reconstructed, tmpl_bundle);
        soft_bundle.fiber_ids = subject.fiber_ids;
        soft_bundle.provenance = subject.provenance;
        save_archive(BundleArchive{1, soft_bundle, std::nullopt}, (dir / "soft.json").string());

        const HardAlignment hard = hard_align(soft, subject, tmpl_bundle);
        Bundle hard_bundle;
        hard_bundle.name = subject.name + "-hard";
        hard_bundle.fibers = hard.warped_fibers;
        hard_bundle.fiber_ids = subject.fiber_ids;
        hard_bundle.provenance = subject.provenance;
        save_archive(BundleArchive{1, hard_bundle, std::nullopt}, (dir / "hard.json").string());

        plot_gamma_panel(hard.per_pair_gammas, "per-fiber warps onto the template",
                         (dir / "gammas.svg").string());

        res.distance = soft.distance;
        res.mean_term = soft.mean_term;
        res.coeff_term = soft.coeff_term;
        res.ok = true;
    } catch (const std::exception& e) {
        res.message = e.what();
    }
    return res;
}

int cmd_register(const RunConfig& cfg) {
    if (cfg.template_path.empty()) throw Error("register: --template required");
    if (cfg.inputs.empty()) throw Error("register: at least one --subject required");
    write_provenance(cfg);

    BundleArchive tmpl = load_archive(cfg.template_path);
    if (tmpl.bundle.grid_size() != cfg.samples || tmpl.bundle.fiber_count() != cfg.fibers)
        throw Error("register: template grid/fiber counts disagree with --samples/--fibers");
    if (!tmpl.code) {
        std::fprintf(stderr, "register: template lacks a code, computing its mean\n");
        const MeanResult mean = karcher_mean(bundle_srvfs(tmpl.bundle), cfg.max_iters, cfg.tol);
        tmpl.code = encode_bundle(mean, cfg.basis, tmpl.bundle.fiber_ids, !cfg.raw_basis);
    }

    const int n = static_cast<int>(cfg.inputs.size());
    std::vector<SubjectOutcome> outcomes(n);
    const int jobs = std::max(1, std::min(cfg.jobs, n));
    std::atomic<int> next{0};
    const auto worker = [&] {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1))
            outcomes[i] = process_subject(cfg, cfg.inputs[i], tmpl.bundle, *tmpl.code);
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(jobs);
        for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::FILE* csv = std::fopen((fs::path(cfg.output) / "distances.csv").string().c_str(), "wb");
    if (!csv) throw Error("register: cannot write distances.csv");
    std::fputs("pair_id,tract_name,distance,mean_term,coeff_term\n", csv);
    int failures = 0;
    for (const SubjectOutcome& o : outcomes) {
        if (o.ok) {
            std::fprintf(csv, "%s,%s,%.17g,%.17g,%.17g\n", o.id.c_str(),
                         tmpl.bundle.name.c_str(), o.distance, o.mean_term, o.coeff_term);
        } else {
            ++failures;
            std::fprintf(stderr, "register: subject %s failed: %s\n", o.id.c_str(),
                         o.message.c_str());
        }
    }
    std::fclose(csv);
    std::fprintf(stderr, "register: %d/%d subjects done\n", n - failures, n);
    return failures == 0 ? 0 : 1;
}

int cmd_eval(const RunConfig& cfg) {
    if (cfg.template_path.empty()) throw Error("eval: --template required");
    if (cfg.inputs.size() != 1) throw Error("eval: --input must name one register output directory");
    write_provenance(cfg);

    const BundleArchive tmpl = load_archive(cfg.template_path);
    const Points3 ref = bundle_points(tmpl.bundle);

    std::vector<std::string> subdirs;
    for (const auto& entry : fs::directory_iterator(cfg.inputs.front()))
        if (entry.is_directory()) subdirs.push_back(entry.path().string());
    std::sort(subdirs.begin(), subdirs.end());
    if (subdirs.empty()) throw Error("eval: no subject directories under " + cfg.inputs.front());

    std::vector<BundlePoints> rigid, soft;
    for (const std::string& dir : subdirs) {
        const fs::path r = fs::path(dir) / "rigid.json";
        const fs::path s = fs::path(dir) / "soft.json";
        if (!fs::exists(r) || !fs::exists(s))
            throw PairMismatch("eval: " + dir + " lacks rigid.json or soft.json");
        const std::string id = fs::path(dir).filename().string();
        rigid.push_back(BundlePoints{id, tmpl.bundle.name,
                                     bundle_points(load_archive(r.string()).bundle), ref});
        soft.push_back(BundlePoints{id, tmpl.bundle.name,
                                    bundle_points(load_archive(s.string()).bundle), ref});
    }

    const EvalReport report = compare_alignments(rigid, soft);
    write_report_csv(report, (fs::path(cfg.output) / "report.csv").string());
    plot_hausdorff_bars(report, "Hausdorff distance, rigid vs soft",
                        (fs::path(cfg.output) / "hausdorff.svg").string());
    std::fprintf(stderr, "eval: %zu pairs, mean rigid %.4g, mean soft %.4g\n", report.rows.size(),
                 report.mean_rigid, report.mean_soft);
    return 0;
}

std::string find_config_path(const std::vector<std::string>& args) {
    for (std::size_t i = 0; i + 1 < args.size(); ++i)
        if (args[i] == "--config") return args[i + 1];
    return {};
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    RunConfig cfg;
    const std::string config_path = find_config_path(args);
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) {
            std::fprintf(stderr, "cannot open config %s\n", config_path.c_str());
            return 2;
        }
        try {
            json j;
            in >> j;
            config_from_json(j, cfg);
        } catch (const std::exception& e) {
            std::fprintf(stderr, "bad config %s: %s\n", config_path.c_str(), e.what());
            return 2;
        }
    }

    CLI::App app{"fiber bundle registration via bundle codes"};
    app.require_subcommand(1);
    std::string config_dummy;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_dummy, "JSON file with RunConfig defaults");
        sub->add_option("--out", cfg.output, "output directory");
        sub->add_option("--samples", cfg.samples, "grid size T");
        sub->add_option("--fibers", cfg.fibers, "fibers per bundle M");
        sub->add_option("--seed", cfg.seed, "seed for subsampling/generation");
    };

    CLI::App* synth = app.add_subcommand("synth", "generate a seeded synthetic bundle");
    add_common(synth);
    synth->add_option("--backbone", cfg.backbone, "arc | helix | cshape");
    synth->add_option("--displacement", cfg.displacement, "spatial perturbation magnitude");
    synth->add_option("--warp", cfg.warp, "reparameterization magnitude");
    synth->add_option("--rotation", cfg.rotation, "per-fiber rotation magnitude (rad)");
    synth->add_option("--scale", cfg.scale, "overall size");
    synth->add_flag("--profiles", cfg.profiles, "emit synthetic FA bump profiles");
    synth->add_option("--profile-noise", cfg.profile_noise, "profile noise level");
    synth->add_flag("--tck", cfg.emit_tck, "also write bundle.tck");

    CLI::App* convert = app.add_subcommand("convert", "convert between .tck and archive .json");
    convert->add_option("--config", config_dummy, "JSON file with RunConfig defaults");
    convert->add_option("--input", cfg.inputs, "input file")->expected(1);
    convert->add_option("--output", cfg.output, "output file");

    CLI::App* mean = app.add_subcommand("mean", "Karcher mean and bundle code");
    add_common(mean);
    mean->add_option("--input", cfg.inputs, "bundle (.tck or archive .json)")->expected(1);
    mean->add_option("--basis", cfg.basis, "coefficient count K");
    mean->add_option("--max-iters", cfg.max_iters, "mean iteration cap");
    mean->add_option("--tol", cfg.tol, "gradient norm tolerance");
    mean->add_flag("--raw-basis", cfg.raw_basis, "projected-only (non-orthonormal) basis");

    CLI::App* reg = app.add_subcommand("register", "register subjects to a template");
    add_common(reg);
    reg->add_option("--template", cfg.template_path, "template archive with code");
    reg->add_option("--subject", cfg.inputs, "subject bundle(s)")->expected(-1);
    reg->add_option("--basis", cfg.basis, "coefficient count K");
    reg->add_option("--max-iters", cfg.max_iters, "mean iteration cap");
    reg->add_option("--tol", cfg.tol, "gradient norm tolerance");
    reg->add_option("--jobs", cfg.jobs, "parallel subjects");
    reg->add_option("--transport", cfg.transport, "exact | stepwise:<k>");
    reg->add_flag("--paper-rescale", cfg.paper_rescale, "stepwise rescale to geodesic length");
    reg->add_flag("--raw-basis", cfg.raw_basis, "projected-only (non-orthonormal) basis");

    CLI::App* eval = app.add_subcommand("eval", "Hausdorff comparison of rigid vs soft outputs");
    eval->add_option("--config", config_dummy, "JSON file with RunConfig defaults");
    eval->add_option("--template", cfg.template_path, "template archive");
    eval->add_option("--input", cfg.inputs, "register output directory")->expected(1);
    eval->add_option("--out", cfg.output, "output directory");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (cfg.output.empty() && !convert->parsed()) throw Error("--out is required");
        if (synth->parsed()) return (cfg.subcommand = "synth", cmd_synth(cfg));
        if (convert->parsed()) return (cfg.subcommand = "convert", cmd_convert(cfg));
        if (mean->parsed()) return (cfg.subcommand = "mean", cmd_mean(cfg));
        if (reg->parsed()) return (cfg.subcommand = "register", cmd_register(cfg));
        if (eval->parsed()) return (cfg.subcommand = "eval", cmd_eval(cfg));
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}

int run_cli(int argc, const char* const* argv) {
    std::vector<std::string> args;
    args.reserve(argc > 0 ? argc - 1 : 0);
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(args);
}

}  // namespace tractalign
