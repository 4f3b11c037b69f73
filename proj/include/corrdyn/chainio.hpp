#pragma once

#include <string>

#include "corrdyn/chain.hpp"

namespace corrdyn {

// Chain file format (JSON):
// { "components": [ { "bidegree": [dz, dw],
//                     "coeffs": [[[re, im], ...], ...],   // (dz+1) rows x (dw+1) cols
//                     "mult": m } ] }
// Doubles round-trip bit-exactly through serialization.
std::string chain_to_json(const Chain& c);
Chain chain_from_json(const std::string& text);

Chain load_chain_file(const std::string& path);
void save_chain_file(const Chain& c, const std::string& path);

// Point syntax used by files and CLI flags: [re_a, im_a, re_b, im_b] or the
// affine shorthand [re, im]; strings "inf"/"infinity" mean the point at
// infinity, "re,im" the affine point.
ProjPoint parse_point(const std::string& text);

}  // namespace corrdyn
