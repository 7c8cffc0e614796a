#pragma once

#include <string>
#include <utility>
#include <vector>

#include "tractalign/curve.hpp"

namespace tractalign {

enum class TckDatatype { Float32LE, Float64LE };

// In-memory MRtrix track file: the verbatim header entries (minus the
// file/datatype bookkeeping, which the writer regenerates), the datatype
// tag and the streamlines. Round trips through write_tck byte-exactly.
struct TckFile {
    std::vector<std::pair<std::string, std::string>> header;
    TckDatatype datatype = TckDatatype::Float32LE;
    std::vector<Fiber> streamlines;
};

// Parses the text header (magic line, "key: value" entries, END), seeks to
// the declared offset and reads little-endian float triplets; NaN triplets
// separate streamlines, an Inf triplet ends the file. Errors carry the
// byte position.
TckFile read_tck(const std::string& path);

// Canonical serialization: magic, stored header entries in order, then
// datatype, the self-referential offset and END, then the payload.
void write_tck(const TckFile& tck, const std::string& path);

TckFile make_tck(std::vector<Fiber> streamlines, TckDatatype datatype = TckDatatype::Float32LE);

std::string datatype_name(TckDatatype d);

}  // namespace tractalign
