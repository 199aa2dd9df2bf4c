#pragma once

// Insertion-ordered JSON emission with fixed numeric formatting, so that
// identical inputs always serialize to identical bytes.

#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace levi {

class JValue {
  public:
    enum class Kind { Null, Bool, Int, Num, Str, Arr, Obj };

    Kind kind = Kind::Null;
    bool bval = false;
    long long ival = 0;
    double nval = 0.0;
    std::string sval;
    std::vector<JValue> arr;
    std::vector<std::pair<std::string, JValue>> obj;

    JValue() = default;

    static JValue boolean(bool b);
    static JValue integer(long long i);
    static JValue number(double d); // throws on non-finite values
    static JValue str(std::string s);
    static JValue array();
    static JValue object();

    // append a key (object) or element (array), returning the new slot
    JValue& set(const std::string& key, JValue v);
    JValue& push(JValue v);

    void dump(std::ostream& os, int indent = 0) const;
    std::string dump_string() const;
};

// fixed 17-significant-digit formatting shared by JSON and CSV output
std::string format_number(double d);

// 4-significant-digit formatting for human-facing diagnostics
std::string format_short(double d);

} // namespace levi
