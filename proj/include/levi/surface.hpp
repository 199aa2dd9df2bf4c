#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "levi/expr.hpp"

namespace levi {

// Key of one mixed partial derivative: sorted 0-based coordinate indices,
// holomorphic (a) and antiholomorphic (b) separately.
struct JetKey {
    std::vector<int> a;
    std::vector<int> b;
    bool operator<(const JetKey& o) const {
        return a != o.a ? a < o.a : b < o.b;
    }
};

class JetExprTable; // built once per surface, see jet.cpp

// A surface {F = 0} in C^{n+1}. Immutable; construct via make() or the
// file parser so the variable-range invariant holds and the derivative
// table is prepared.
struct SurfaceDef {
    std::string name;
    int n = 0; // CR dimension; ambient complex dimension is n+1
    ExprPtr f;
    std::map<std::string, std::string> metadata;

    std::shared_ptr<const JetExprTable> jets;

    static SurfaceDef make(std::string name, int n, ExprPtr f,
                           std::map<std::string, std::string> metadata = {});
};

// Parses the line-oriented "key = value" format (keys: n, F, optional name;
// '#' starts a comment; unknown keys land in metadata).
SurfaceDef parse_surface(const std::string& text);
SurfaceDef parse_surface_file(const std::string& path);

// Round-trip text for a SurfaceDef in the same file format.
std::string to_string(const SurfaceDef& s);

struct RealnessReport {
    double max_imag = 0.0;
    bool pass = false;
};

// Samples trial_count pseudo-random points in the unit polydisc box and
// checks |Im F| stays at rounding level. F is required to be real-valued
// for any of the geometry below to make sense; this is the check.
RealnessReport check_real_valued(const SurfaceDef& s, int trial_count,
                                 std::uint64_t seed);

} // namespace levi
