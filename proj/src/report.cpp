#include "levi/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "levi/errors.hpp"

namespace levi {

std::string format_number(double d) {
    if (!std::isfinite(d)) throw Error("non-finite number in report");
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", d);
    return buf;
}

std::string format_short(double d) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.4g", d);
    return buf;
}

JValue JValue::boolean(bool b) {
    JValue v;
    v.kind = Kind::Bool;
    v.bval = b;
    return v;
}

JValue JValue::integer(long long i) {
    JValue v;
    v.kind = Kind::Int;
    v.ival = i;
    return v;
}

JValue JValue::number(double d) {
    if (!std::isfinite(d)) throw Error("non-finite number in report");
    JValue v;
    v.kind = Kind::Num;
    v.nval = d;
    return v;
}

JValue JValue::str(std::string s) {
    JValue v;
    v.kind = Kind::Str;
    v.sval = std::move(s);
    return v;
}

JValue JValue::array() {
    JValue v;
    v.kind = Kind::Arr;
    return v;
}

JValue JValue::object() {
    JValue v;
    v.kind = Kind::Obj;
    return v;
}

JValue& JValue::set(const std::string& key, JValue v) {
    obj.emplace_back(key, std::move(v));
    return obj.back().second;
}

JValue& JValue::push(JValue v) {
    arr.push_back(std::move(v));
    return arr.back();
}

namespace {

void dump_escaped(std::ostream& os, const std::string& s) {
    os << '"';
    for (char c : s) {
        switch (c) {
            case '"': os << "\\\""; break;
            case '\\': os << "\\\\"; break;
            case '\n': os << "\\n"; break;
            case '\r': os << "\\r"; break;
            case '\t': os << "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    os << buf;
                } else {
                    os << c;
                }
        }
    }
    os << '"';
}

void pad(std::ostream& os, int depth) {
    for (int i = 0; i < depth; ++i) os << "  ";
}

} // namespace

void JValue::dump(std::ostream& os, int indent) const {
    switch (kind) {
        case Kind::Null: os << "null"; break;
        case Kind::Bool: os << (bval ? "true" : "false"); break;
        case Kind::Int: os << ival; break;
        case Kind::Num: os << format_number(nval); break;
        case Kind::Str: dump_escaped(os, sval); break;
        case Kind::Arr: {
            if (arr.empty()) {
                os << "[]";
                break;
            }
            bool flat = true;
            for (const JValue& v : arr)
                if (v.kind == Kind::Arr || v.kind == Kind::Obj) flat = false;
            os << '[';
            for (size_t i = 0; i < arr.size(); ++i) {
                if (!flat) {
                    os << '\n';
                    pad(os, indent + 1);
                }
                arr[i].dump(os, indent + 1);
                if (i + 1 < arr.size()) os << (flat ? ", " : ",");
            }
            if (!flat) {
                os << '\n';
                pad(os, indent);
            }
            os << ']';
            break;
        }
        case Kind::Obj: {
            if (obj.empty()) {
                os << "{}";
                break;
            }
            os << '{';
            for (size_t i = 0; i < obj.size(); ++i) {
                os << '\n';
                pad(os, indent + 1);
                dump_escaped(os, obj[i].first);
                os << ": ";
                obj[i].second.dump(os, indent + 1);
                if (i + 1 < obj.size()) os << ',';
            }
            os << '\n';
            pad(os, indent);
            os << '}';
            break;
        }
    }
}

std::string JValue::dump_string() const {
    std::ostringstream os;
    dump(os, 0);
    os << '\n';
    return os.str();
}

} // namespace levi
