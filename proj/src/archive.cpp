#include "tractalign/archive.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tractalign/tck.hpp"

namespace tractalign {

namespace {

using nlohmann::json;

constexpr const char* kFormat = "tractalign-bundle";
constexpr const char* kB64 =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string b64_encode(const double* data, std::size_t count) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(data);
    const std::size_t n = count * sizeof(double);
    std::string out;
    out.reserve((n + 2) / 3 * 4);
    for (std::size_t i = 0; i < n; i += 3) {
        unsigned v = bytes[i] << 16;
        if (i + 1 < n) v |= bytes[i + 1] << 8;
        if (i + 2 < n) v |= bytes[i + 2];
        out += kB64[(v >> 18) & 63];
        out += kB64[(v >> 12) & 63];
        out += i + 1 < n ? kB64[(v >> 6) & 63] : '=';
        out += i + 2 < n ? kB64[v & 63] : '=';
    }
    return out;
}

std::vector<double> b64_decode(const std::string& s, std::size_t expect_count) {
    static int lut[256];
    static bool init = false;
    if (!init) {
        std::fill(std::begin(lut), std::end(lut), -1);
        for (int i = 0; i < 64; ++i) lut[static_cast<unsigned char>(kB64[i])] = i;
        init = true;
    }
    std::vector<unsigned char> bytes;
    bytes.reserve(s.size() / 4 * 3);
    unsigned acc = 0;
    int bits = 0;
    for (const char c : s) {
        if (c == '=') break;
        const int v = lut[static_cast<unsigned char>(c)];
        if (v < 0) throw Error("archive: invalid base64 character");
        acc = (acc << 6) | static_cast<unsigned>(v);
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            bytes.push_back(static_cast<unsigned char>((acc >> bits) & 0xFF));
        }
    }
    if (bytes.size() != expect_count * sizeof(double))
        throw Error("archive: base64 block holds " + std::to_string(bytes.size()) +
                    " bytes, expected " + std::to_string(expect_count * sizeof(double)));
    std::vector<double> out(expect_count);
    std::memcpy(out.data(), bytes.data(), bytes.size());
    return out;
}

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed,
                    const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                ok = true;
                break;
            }
        if (!ok) throw Error("archive: unknown field '" + it.key() + "' in " + where);
    }
}

json encode_points(const Points3& pts) {
    return json{{"samples", pts.cols()},
                {"data", b64_encode(pts.data(), static_cast<std::size_t>(pts.size()))}};
}

Points3 decode_points(const json& j, const std::string& where) {
    reject_unknown(j, {"samples", "data"}, where);
    const int T = j.at("samples").get<int>();
    const std::vector<double> raw = b64_decode(j.at("data").get<std::string>(), 3 * T);
    Points3 pts(3, T);
    std::memcpy(pts.data(), raw.data(), raw.size() * sizeof(double));
    return pts;
}

}  // namespace

void save_archive(const BundleArchive& archive, const std::string& path) {
    const Bundle& b = archive.bundle;
    json j;
    j["format"] = kFormat;
    j["version"] = archive.version;
    j["name"] = b.name;
    j["fiber_ids"] = b.fiber_ids;
    json fibers = json::array();
    for (const Fiber& f : b.fibers) fibers.push_back(encode_points(f.points));
    j["fibers"] = std::move(fibers);
    if (!b.profiles.empty()) {
        json profs = json::array();
        for (const auto& p : b.profiles)
            profs.push_back(json{{"samples", p.size()},
                                 {"data", b64_encode(p.data(), static_cast<std::size_t>(p.size()))}});
        j["profiles"] = std::move(profs);
    }
    j["provenance"] = json{{"source", b.provenance.source},
                           {"resample_t", b.provenance.resample_t},
                           {"subsample_m", b.provenance.subsample_m},
                           {"seed", b.provenance.seed}};
    if (archive.code) {
        const BundleCode& c = *archive.code;
        json code;
        code["beta_mu"] = encode_points(c.beta_mu.values);
        code["coeffs"] = json{
            {"rows", c.A.rows()},
            {"cols", c.A.cols()},
            {"data", b64_encode(c.A.entries.data(), static_cast<std::size_t>(c.A.entries.size()))}};
        code["residuals"] =
            b64_encode(c.A.residuals.data(), static_cast<std::size_t>(c.A.residuals.size()));
        code["basis"] = json{{"requested", c.basis.requested},
                             {"orthonormal", c.basis.orthonormal},
                             {"dropped", c.basis.dropped},
                             {"id", c.basis.id}};
        code["fiber_ids"] = c.fiber_ids;
        j["code"] = std::move(code);
    }

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("save_archive: cannot open " + path);
    out << j.dump(1, '\t') << '\n';
}

BundleArchive load_archive(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("load_archive: cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error("load_archive: " + path + ": " + e.what());
    }

    reject_unknown(j, {"format", "version", "name", "fiber_ids", "fibers", "profiles",
                       "provenance", "code"},
                   "archive root");
    if (j.at("format").get<std::string>() != kFormat)
        throw Error("load_archive: not a " + std::string(kFormat) + " file");
    BundleArchive archive;
    archive.version = j.at("version").get<int>();
    if (archive.version != 1)
        throw Error("load_archive: unsupported version " + std::to_string(archive.version));

    Bundle& b = archive.bundle;
    b.name = j.at("name").get<std::string>();
    b.fiber_ids = j.at("fiber_ids").get<std::vector<std::string>>();
    for (const json& f : j.at("fibers")) b.fibers.push_back(Fiber{decode_points(f, "fibers")});
    if (j.contains("profiles")) {
        for (const json& p : j.at("profiles")) {
            reject_unknown(p, {"samples", "data"}, "profiles");
            const int T = p.at("samples").get<int>();
            const std::vector<double> raw = b64_decode(p.at("data").get<std::string>(), T);
            b.profiles.push_back(Eigen::Map<const Eigen::VectorXd>(raw.data(), T));
        }
    }
    const json& prov = j.at("provenance");
    reject_unknown(prov, {"source", "resample_t", "subsample_m", "seed"}, "provenance");
    b.provenance.source = prov.at("source").get<std::string>();
    b.provenance.resample_t = prov.at("resample_t").get<int>();
    b.provenance.subsample_m = prov.at("subsample_m").get<int>();
    b.provenance.seed = prov.at("seed").get<std::uint64_t>();

    if (j.contains("code")) {
        const json& code = j.at("code");
        reject_unknown(code, {"beta_mu", "coeffs", "residuals", "basis", "fiber_ids"}, "code");
        BundleCode c;
        c.beta_mu = Srvf{decode_points(code.at("beta_mu"), "code.beta_mu")};
        const json& basis = code.at("basis");
        reject_unknown(basis, {"requested", "orthonormal", "dropped", "id"}, "code.basis");
        c.basis = make_basis(c.beta_mu, basis.at("requested").get<int>(),
                             basis.at("orthonormal").get<bool>());
        if (c.basis.id != basis.at("id").get<std::uint64_t>())
            throw Error("load_archive: regenerated basis id disagrees with the stored one");
        if (c.basis.dropped != basis.at("dropped").get<int>())
            throw Error("load_archive: regenerated basis dropped count disagrees");
        const json& coeffs = code.at("coeffs");
        reject_unknown(coeffs, {"rows", "cols", "data"}, "code.coeffs");
        const int rows = coeffs.at("rows").get<int>();
        const int cols = coeffs.at("cols").get<int>();
        if (cols != c.basis.size())
            throw Error("load_archive: coefficient width disagrees with basis size");
        const std::vector<double> raw =
            b64_decode(coeffs.at("data").get<std::string>(), static_cast<std::size_t>(rows) * cols);
        c.A.entries = Eigen::Map<const Eigen::MatrixXd>(raw.data(), rows, cols);
        c.A.basis_id = c.basis.id;
        const std::vector<double> res = b64_decode(code.at("residuals").get<std::string>(), rows);
        c.A.residuals = Eigen::Map<const Eigen::VectorXd>(res.data(), rows);
        c.fiber_ids = code.at("fiber_ids").get<std::vector<std::string>>();
        archive.code = std::move(c);
    }
    return archive;
}

void write_profiles_csv(const std::vector<Eigen::VectorXd>& profiles, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw IoError("write_profiles_csv: cannot open " + path);
    for (const auto& p : profiles) {
        for (int j = 0; j < p.size(); ++j)
            std::fprintf(f, j + 1 < p.size() ? "%.17g," : "%.17g\n", p(j));
    }
    std::fclose(f);
}

std::vector<Eigen::VectorXd> read_profiles_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("read_profiles_csv: cannot open " + path);
    std::vector<Eigen::VectorXd> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        out.push_back(Eigen::Map<const Eigen::VectorXd>(row.data(), row.size()));
    }
    return out;
}

std::vector<int> subsample_indices(int available, int wanted, std::uint64_t seed) {
    std::vector<int> idx;
    if (wanted <= 0 || wanted >= available) {
        idx.resize(available);
        for (int i = 0; i < available; ++i) idx[i] = i;
        return idx;
    }
    const int offset = static_cast<int>(seed % static_cast<std::uint64_t>(available));
    idx.reserve(wanted);
    for (int i = 0; i < wanted; ++i) {
        const long long stride = static_cast<long long>(i) * available / wanted;
        idx.push_back(static_cast<int>((offset + stride) % available));
    }
    std::sort(idx.begin(), idx.end());
    return idx;
}

namespace {

Eigen::VectorXd resample_profile(const Eigen::VectorXd& p, int T) {
    const int n = static_cast<int>(p.size());
    if (n == T) return p;
    Eigen::VectorXd out(T);
    for (int j = 0; j < T; ++j) {
        const double x = static_cast<double>(j) * (n - 1) / (T - 1);
        const int i0 = std::min(static_cast<int>(x), n - 2);
        const double f = x - i0;
        out(j) = (1.0 - f) * p(i0) + f * p(i0 + 1);
    }
    return out;
}

}  // namespace

Bundle load_bundle(const std::string& path, int T, int M, std::uint64_t seed) {
    Bundle raw;
    const bool is_tck = path.size() > 4 && path.substr(path.size() - 4) == ".tck";
    if (is_tck) {
        TckFile tck = read_tck(path);
        raw.fibers = std::move(tck.streamlines);
        raw.name = path;
    } else {
        BundleArchive archive = load_archive(path);
        raw = std::move(archive.bundle);
    }

    if (M > 0 && raw.fiber_count() < M)
        throw FiberCountMismatch("load_bundle: " + path + " holds " +
                                 std::to_string(raw.fiber_count()) + " fibers, need " +
                                 std::to_string(M));

    const std::vector<int> keep = subsample_indices(raw.fiber_count(), M, seed);
    Bundle out;
    out.name = raw.name;
    out.fibers.reserve(keep.size());
    for (const int i : keep) {
        out.fibers.push_back(resample(raw.fibers[i], T));
        if (i < static_cast<int>(raw.profiles.size()))
            out.profiles.push_back(resample_profile(raw.profiles[i], T));
        out.fiber_ids.push_back(i < static_cast<int>(raw.fiber_ids.size())
                                    ? raw.fiber_ids[i]
                                    : "f" + std::to_string(i));
    }
    out = orient_fibers(std::move(out));
    out.provenance = Provenance{path, T, M, seed};
    return out;
}

}  // namespace tractalign
