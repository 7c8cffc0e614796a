#include "tractalign/tck.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace tractalign {

namespace {

constexpr const char* kMagic = "mrtrix tracks";

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("read_tck: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

double read_value(const char* p, TckDatatype d) {
    if (d == TckDatatype::Float32LE) {
        float v;
        std::memcpy(&v, p, 4);
        return static_cast<double>(v);
    }
    double v;
    std::memcpy(&v, p, 8);
    return v;
}

}  // namespace

std::string datatype_name(TckDatatype d) {
    return d == TckDatatype::Float32LE ? "Float32LE" : "Float64LE";
}

TckFile read_tck(const std::string& path) {
    const std::string data = slurp(path);

    // Header: magic line, then "key: value" lines up to END.
    std::size_t pos = data.find('\n');
    if (pos == std::string::npos || data.substr(0, pos) != kMagic)
        throw BadMagic("read_tck: first line is not '" + std::string(kMagic) + "'", 0);
    ++pos;

    TckFile tck;
    bool saw_end = false;
    bool saw_datatype = false;
    std::size_t offset = 0;
    bool saw_offset = false;

    while (pos < data.size()) {
        const std::size_t line_start = pos;
        const std::size_t nl = data.find('\n', pos);
        if (nl == std::string::npos)
            throw BadMagic("read_tck: header not terminated by END", line_start);
        const std::string line = data.substr(line_start, nl - line_start);
        pos = nl + 1;
        if (line == "END") {
            saw_end = true;
            break;
        }
        const std::size_t colon = line.find(':');
        if (colon == std::string::npos)
            throw BadMagic("read_tck: malformed header line '" + line + "'", line_start);
        std::string key = line.substr(0, colon);
        std::string value = line.substr(colon + 1);
        if (!value.empty() && value.front() == ' ') value.erase(0, 1);

        if (key == "file") {
            const std::size_t sp = value.rfind(' ');
            if (value.size() < 3 || value.substr(0, 2) != ". " || sp == std::string::npos)
                throw MissingOffset("read_tck: file field must be '. <offset>'", line_start);
            try {
                offset = std::stoull(value.substr(sp + 1));
            } catch (const std::exception&) {
                throw MissingOffset("read_tck: unparsable offset '" + value + "'", line_start);
            }
            saw_offset = true;
        } else if (key == "datatype") {
            if (value == "Float32LE")
                tck.datatype = TckDatatype::Float32LE;
            else if (value == "Float64LE")
                tck.datatype = TckDatatype::Float64LE;
            else
                throw UnknownDatatype("read_tck: unsupported datatype '" + value + "'",
                                      line_start + colon + 2);
            saw_datatype = true;
        } else {
            tck.header.emplace_back(std::move(key), std::move(value));
        }
    }
    if (!saw_end) throw BadMagic("read_tck: header not terminated by END", pos);
    if (!saw_datatype) throw UnknownDatatype("read_tck: header lacks a datatype field", pos);
    if (!saw_offset) throw MissingOffset("read_tck: header lacks a file offset field", pos);
    if (offset < pos || offset > data.size())
        throw MissingOffset("read_tck: offset " + std::to_string(offset) +
                                " is inconsistent with the header end",
                            pos);

    const std::size_t width = tck.datatype == TckDatatype::Float32LE ? 4 : 8;
    std::size_t at = offset;
    std::vector<Vec3> current;
    bool terminated = false;
    while (!terminated) {
        if (at + 3 * width > data.size())
            throw TruncatedPayload("read_tck: payload ends before the Inf terminator", at);
        double v[3];
        for (int c = 0; c < 3; ++c) v[c] = read_value(data.data() + at + c * width, tck.datatype);
        const int nans = std::isnan(v[0]) + std::isnan(v[1]) + std::isnan(v[2]);
        const int infs = std::isinf(v[0]) + std::isinf(v[1]) + std::isinf(v[2]);
        if (infs == 3) {
            terminated = true;
        } else if (nans == 3) {
            if (!current.empty()) {
                Points3 pts(3, static_cast<int>(current.size()));
                for (std::size_t i = 0; i < current.size(); ++i) pts.col(i) = current[i];
                tck.streamlines.push_back(Fiber{std::move(pts)});
                current.clear();
            }
        } else if (nans > 0 || infs > 0) {
            throw TruncatedPayload("read_tck: malformed separator triplet", at);
        } else {
            current.emplace_back(v[0], v[1], v[2]);
        }
        at += 3 * width;
    }
    if (!current.empty()) {
        Points3 pts(3, static_cast<int>(current.size()));
        for (std::size_t i = 0; i < current.size(); ++i) pts.col(i) = current[i];
        tck.streamlines.push_back(Fiber{std::move(pts)});
    }
    return tck;
}

namespace {

void append_value(std::string& out, double v, TckDatatype d) {
    if (d == TckDatatype::Float32LE) {
        const float f = static_cast<float>(v);
        char buf[4];
        std::memcpy(buf, &f, 4);
        out.append(buf, 4);
    } else {
        char buf[8];
        std::memcpy(buf, &v, 8);
        out.append(buf, 8);
    }
}

void append_triplet(std::string& out, double a, double b, double c, TckDatatype d) {
    append_value(out, a, d);
    append_value(out, b, d);
    append_value(out, c, d);
}

}  // namespace

void write_tck(const TckFile& tck, const std::string& path) {
    std::string head;
    head += kMagic;
    head += '\n';
    for (const auto& [k, v] : tck.header) {
        head += k;
        head += ": ";
        head += v;
        head += '\n';
    }
    head += "datatype: ";
    head += datatype_name(tck.datatype);
    head += '\n';

    // The offset counts its own digits; iterate until stable.
    std::size_t offset = head.size() + std::string("file: . \nEND\n").size() + 1;
    for (int pass = 0; pass < 4; ++pass) {
        const std::size_t next =
            head.size() + std::string("file: . ").size() + std::to_string(offset).size() + std::string("\nEND\n").size();
        if (next == offset) break;
        offset = next;
    }
    head += "file: . " + std::to_string(offset) + "\nEND\n";
    if (head.size() != offset)
        throw IoError("write_tck: offset fixed point failed");

    std::string payload;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double inf = std::numeric_limits<double>::infinity();
    for (const Fiber& f : tck.streamlines) {
        for (int j = 0; j < f.samples(); ++j)
            append_triplet(payload, f.points(0, j), f.points(1, j), f.points(2, j), tck.datatype);
        append_triplet(payload, nan, nan, nan, tck.datatype);
    }
    append_triplet(payload, inf, inf, inf, tck.datatype);

    std::FILE* out = std::fopen(path.c_str(), "wb");
    if (!out) throw IoError("write_tck: cannot open " + path);
    std::fwrite(head.data(), 1, head.size(), out);
    std::fwrite(payload.data(), 1, payload.size(), out);
    std::fclose(out);
}

TckFile make_tck(std::vector<Fiber> streamlines, TckDatatype datatype) {
    TckFile tck;
    tck.datatype = datatype;
    tck.streamlines = std::move(streamlines);
    tck.header.emplace_back("count", std::to_string(tck.streamlines.size()));
    return tck;
}

}  // namespace tractalign
