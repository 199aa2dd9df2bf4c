#include "levi/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <utility>

#include "levi/errors.hpp"

namespace levi {

namespace {

ExprPtr make_node(Expr&& e) { return std::make_shared<const Expr>(std::move(e)); }

} // namespace

ExprPtr Expr::constant(cplx v) {
    Expr e;
    e.kind = ExprKind::Constant;
    e.value = v;
    return make_node(std::move(e));
}

ExprPtr Expr::variable(int index, bool conjugated) {
    if (index < 1) throw Error("variable index must be >= 1");
    Expr e;
    e.kind = ExprKind::Variable;
    e.index = index;
    e.conjugated = conjugated;
    return make_node(std::move(e));
}

ExprPtr Expr::sum(std::vector<ExprPtr> terms) {
    Expr e;
    e.kind = ExprKind::Sum;
    e.children = std::move(terms);
    return make_node(std::move(e));
}

ExprPtr Expr::product(std::vector<ExprPtr> factors) {
    Expr e;
    e.kind = ExprKind::Product;
    e.children = std::move(factors);
    return make_node(std::move(e));
}

ExprPtr Expr::power(ExprPtr base, int exponent) {
    if (exponent < 0) throw Error("power exponent must be a nonnegative integer");
    Expr e;
    e.kind = ExprKind::Power;
    e.exponent = exponent;
    e.children = {std::move(base)};
    return make_node(std::move(e));
}

ExprPtr Expr::negate(ExprPtr e0) {
    Expr e;
    e.kind = ExprKind::Negate;
    e.children = {std::move(e0)};
    return make_node(std::move(e));
}

ExprPtr Expr::real_part(ExprPtr e0) {
    Expr e;
    e.kind = ExprKind::RealPart;
    e.children = {std::move(e0)};
    return make_node(std::move(e));
}

ExprPtr Expr::imag_part(ExprPtr e0) {
    Expr e;
    e.kind = ExprKind::ImagPart;
    e.children = {std::move(e0)};
    return make_node(std::move(e));
}

// ---------------------------------------------------------------------------
// folding

ExprPtr fold(const ExprPtr& e) {
    switch (e->kind) {
    case ExprKind::Constant:
    case ExprKind::Variable:
        return e;

    case ExprKind::Negate: {
        ExprPtr c = fold(e->children[0]);
        if (c->kind == ExprKind::Constant) return Expr::constant(-c->value);
        if (c->kind == ExprKind::Negate) return c->children[0];
        if (c.get() == e->children[0].get()) return e;
        return Expr::negate(c);
    }

    case ExprKind::Power: {
        ExprPtr base = fold(e->children[0]);
        if (e->exponent == 0) return Expr::constant(1.0);
        if (e->exponent == 1) return base;
        if (base->kind == ExprKind::Constant) {
            cplx v = 1.0;
            for (int i = 0; i < e->exponent; ++i) v *= base->value;
            return Expr::constant(v);
        }
        if (base.get() == e->children[0].get()) return e;
        return Expr::power(base, e->exponent);
    }

    case ExprKind::RealPart: {
        ExprPtr c = fold(e->children[0]);
        if (c->kind == ExprKind::Constant) return Expr::constant(c->value.real());
        if (c.get() == e->children[0].get()) return e;
        return Expr::real_part(c);
    }

    case ExprKind::ImagPart: {
        ExprPtr c = fold(e->children[0]);
        if (c->kind == ExprKind::Constant) return Expr::constant(c->value.imag());
        if (c.get() == e->children[0].get()) return e;
        return Expr::imag_part(c);
    }

    case ExprKind::Sum: {
        std::vector<ExprPtr> out;
        cplx acc = 0.0;
        bool had_const = false;
        bool changed = false;
        for (const ExprPtr& raw : e->children) {
            ExprPtr c = fold(raw);
            if (c.get() != raw.get()) changed = true;
            if (c->kind == ExprKind::Sum) { // flatten
                changed = true;
                for (const ExprPtr& g : c->children) {
                    if (g->kind == ExprKind::Constant) {
                        acc += g->value;
                        had_const = true;
                    } else {
                        out.push_back(g);
                    }
                }
            } else if (c->kind == ExprKind::Constant) {
                acc += c->value;
                had_const = true;
                changed = changed || e->children.size() > 1;
            } else {
                out.push_back(c);
            }
        }
        if (had_const && acc != 0.0) out.push_back(Expr::constant(acc));
        if (had_const && acc == 0.0) changed = true;
        if (out.empty()) return Expr::constant(acc);
        if (out.size() == 1) return out[0];
        if (!changed) return e;
        return Expr::sum(std::move(out));
    }

    case ExprKind::Product: {
        std::vector<ExprPtr> out;
        cplx acc = 1.0;
        bool had_const = false;
        bool changed = false;
        for (const ExprPtr& raw : e->children) {
            ExprPtr c = fold(raw);
            if (c.get() != raw.get()) changed = true;
            if (c->kind == ExprKind::Product) { // flatten
                changed = true;
                for (const ExprPtr& g : c->children) {
                    if (g->kind == ExprKind::Constant) {
                        acc *= g->value;
                        had_const = true;
                    } else {
                        out.push_back(g);
                    }
                }
            } else if (c->kind == ExprKind::Constant) {
                acc *= c->value;
                had_const = true;
                changed = changed || e->children.size() > 1;
            } else {
                out.push_back(c);
            }
        }
        if (acc == 0.0) return Expr::constant(0.0);
        if (had_const && acc != 1.0) out.insert(out.begin(), Expr::constant(acc));
        if (had_const && acc == 1.0) changed = true;
        if (out.empty()) return Expr::constant(acc);
        if (out.size() == 1) return out[0];
        if (!changed) return e;
        return Expr::product(std::move(out));
    }
    }
    throw Error("unreachable expression kind");
}

// ---------------------------------------------------------------------------
// equality / conjugation / substitution

bool structurally_equal(const ExprPtr& a, const ExprPtr& b) {
    if (a.get() == b.get()) return true;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
    case ExprKind::Constant:
        return a->value == b->value;
    case ExprKind::Variable:
        return a->index == b->index && a->conjugated == b->conjugated;
    case ExprKind::Power:
        if (a->exponent != b->exponent) return false;
        break;
    default:
        break;
    }
    if (a->children.size() != b->children.size()) return false;
    for (std::size_t i = 0; i < a->children.size(); ++i)
        if (!structurally_equal(a->children[i], b->children[i])) return false;
    return true;
}

ExprPtr conj_tree(const ExprPtr& e) {
    switch (e->kind) {
    case ExprKind::Constant:
        return Expr::constant(std::conj(e->value));
    case ExprKind::Variable:
        return Expr::variable(e->index, !e->conjugated);
    case ExprKind::RealPart:
    case ExprKind::ImagPart:
        return e; // real-valued subtree
    default: {
        std::vector<ExprPtr> kids;
        kids.reserve(e->children.size());
        for (const ExprPtr& c : e->children) kids.push_back(conj_tree(c));
        switch (e->kind) {
        case ExprKind::Sum: return Expr::sum(std::move(kids));
        case ExprKind::Product: return Expr::product(std::move(kids));
        case ExprKind::Power: return Expr::power(kids[0], e->exponent);
        case ExprKind::Negate: return Expr::negate(kids[0]);
        default: throw Error("unreachable");
        }
    }
    }
}

ExprPtr substitute(const ExprPtr& e,
                   const std::function<ExprPtr(int, bool)>& repl) {
    switch (e->kind) {
    case ExprKind::Constant:
        return e;
    case ExprKind::Variable: {
        ExprPtr r = repl(e->index, e->conjugated);
        return r ? r : e;
    }
    default: {
        std::vector<ExprPtr> kids;
        kids.reserve(e->children.size());
        for (const ExprPtr& c : e->children) kids.push_back(substitute(c, repl));
        switch (e->kind) {
        case ExprKind::Sum: return Expr::sum(std::move(kids));
        case ExprKind::Product: return Expr::product(std::move(kids));
        case ExprKind::Power: return Expr::power(kids[0], e->exponent);
        case ExprKind::Negate: return Expr::negate(kids[0]);
        case ExprKind::RealPart: return Expr::real_part(kids[0]);
        case ExprKind::ImagPart: return Expr::imag_part(kids[0]);
        default: throw Error("unreachable");
        }
    }
    }
}

int max_var_index(const ExprPtr& e) {
    if (e->kind == ExprKind::Variable) return e->index;
    int m = 0;
    for (const ExprPtr& c : e->children) m = std::max(m, max_var_index(c));
    return m;
}

// ---------------------------------------------------------------------------
// differentiation

ExprPtr wirtinger_derive(const ExprPtr& e, int index, bool conjugated) {
    switch (e->kind) {
    case ExprKind::Constant:
        return Expr::constant(0.0);

    case ExprKind::Variable:
        return Expr::constant(
            (e->index == index && e->conjugated == conjugated) ? 1.0 : 0.0);

    case ExprKind::Sum: {
        std::vector<ExprPtr> terms;
        terms.reserve(e->children.size());
        for (const ExprPtr& c : e->children)
            terms.push_back(wirtinger_derive(c, index, conjugated));
        return fold(Expr::sum(std::move(terms)));
    }

    case ExprKind::Product: {
        std::vector<ExprPtr> terms;
        for (std::size_t i = 0; i < e->children.size(); ++i) {
            std::vector<ExprPtr> factors = e->children;
            factors[i] = wirtinger_derive(e->children[i], index, conjugated);
            terms.push_back(Expr::product(std::move(factors)));
        }
        return fold(Expr::sum(std::move(terms)));
    }

    case ExprKind::Power: {
        if (e->exponent == 0) return Expr::constant(0.0);
        ExprPtr d = wirtinger_derive(e->children[0], index, conjugated);
        ExprPtr lowered = e->exponent == 1
                              ? Expr::constant(1.0)
                              : Expr::power(e->children[0], e->exponent - 1);
        return fold(Expr::product(
            {Expr::constant(double(e->exponent)), std::move(lowered), std::move(d)}));
    }

    case ExprKind::Negate:
        return fold(Expr::negate(wirtinger_derive(e->children[0], index, conjugated)));

    // re(u) = (u + conj u)/2 and im(u) = (u - conj u)/(2i) as functions of
    // (z, conj z); the conjugate branch is differentiated structurally on the
    // swapped-variable tree.
    case ExprKind::RealPart: {
        ExprPtr du = wirtinger_derive(e->children[0], index, conjugated);
        ExprPtr dc = wirtinger_derive(conj_tree(e->children[0]), index, conjugated);
        return fold(Expr::product(
            {Expr::constant(0.5), Expr::sum({du, dc})}));
    }

    case ExprKind::ImagPart: {
        ExprPtr du = wirtinger_derive(e->children[0], index, conjugated);
        ExprPtr dc = wirtinger_derive(conj_tree(e->children[0]), index, conjugated);
        return fold(Expr::product(
            {Expr::constant(cplx(0.0, -0.5)), Expr::sum({du, Expr::negate(dc)})}));
    }
    }
    throw Error("unreachable expression kind");
}

// ---------------------------------------------------------------------------
// evaluation

cplx evaluate(const ExprPtr& e, const std::vector<cplx>& z) {
    switch (e->kind) {
    case ExprKind::Constant:
        return e->value;
    case ExprKind::Variable: {
        if (e->index > static_cast<int>(z.size()))
            throw DimensionMismatch("variable z" + std::to_string(e->index) +
                                    " out of range for a point with " +
                                    std::to_string(z.size()) + " coordinates");
        cplx v = z[e->index - 1];
        return e->conjugated ? std::conj(v) : v;
    }
    case ExprKind::Sum: {
        cplx acc = 0.0;
        for (const ExprPtr& c : e->children) acc += evaluate(c, z);
        return acc;
    }
    case ExprKind::Product: {
        cplx acc = 1.0;
        for (const ExprPtr& c : e->children) acc *= evaluate(c, z);
        return acc;
    }
    case ExprKind::Power: {
        cplx b = evaluate(e->children[0], z);
        cplx acc = 1.0;
        for (int i = 0; i < e->exponent; ++i) acc *= b;
        return acc;
    }
    case ExprKind::Negate:
        return -evaluate(e->children[0], z);
    case ExprKind::RealPart:
        return evaluate(e->children[0], z).real();
    case ExprKind::ImagPart:
        return evaluate(e->children[0], z).imag();
    }
    throw Error("unreachable expression kind");
}

// ---------------------------------------------------------------------------
// printing

namespace {

// shortest decimal that round-trips
std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string format_const(cplx v) {
    if (v.imag() == 0.0) return format_double(v.real());
    // not expressible in the grammar; debug form only
    char buf[96];
    std::snprintf(buf, sizeof(buf), "(%s+%s*i)", format_double(v.real()).c_str(),
                  format_double(v.imag()).c_str());
    return buf;
}

// precedence: sum 1, product 2, unary minus 2, power 3, atom 4
int precedence(const Expr& e) {
    switch (e.kind) {
    case ExprKind::Sum: return 1;
    case ExprKind::Product: return 2;
    case ExprKind::Negate: return 2;
    case ExprKind::Power: return 3;
    default: return 4;
    }
}

void print_rec(const ExprPtr& e, int parent_prec, std::string& out) {
    int prec = precedence(*e);
    bool parens = prec < parent_prec;
    if (e->kind == ExprKind::Constant &&
        (e->value.real() < 0.0 || (e->value.real() == 0.0 && e->value.imag() != 0.0)) &&
        parent_prec > 1)
        parens = true; // keep "-2" out of factor position without parens
    if (parens) out += '(';
    switch (e->kind) {
    case ExprKind::Constant:
        out += format_const(e->value);
        break;
    case ExprKind::Variable:
        out += e->conjugated ? "cz" : "z";
        out += std::to_string(e->index);
        break;
    case ExprKind::Sum:
        for (std::size_t i = 0; i < e->children.size(); ++i) {
            if (i) out += " + ";
            print_rec(e->children[i], 1, out);
        }
        break;
    case ExprKind::Product:
        for (std::size_t i = 0; i < e->children.size(); ++i) {
            if (i) out += '*';
            print_rec(e->children[i], 2, out);
        }
        break;
    case ExprKind::Power:
        print_rec(e->children[0], 4, out);
        out += '^';
        out += std::to_string(e->exponent);
        break;
    case ExprKind::Negate:
        out += '-';
        print_rec(e->children[0], 3, out);
        break;
    case ExprKind::RealPart:
        out += "re(";
        print_rec(e->children[0], 0, out);
        out += ')';
        break;
    case ExprKind::ImagPart:
        out += "im(";
        print_rec(e->children[0], 0, out);
        out += ')';
        break;
    }
    if (parens) out += ')';
}

} // namespace

std::string to_string(const ExprPtr& e) {
    std::string out;
    print_rec(e, 0, out);
    return out;
}

// ---------------------------------------------------------------------------
// expression parser (recursive descent)

namespace {

struct Lexer {
    const std::string& text;
    std::size_t pos = 0;
    int line;
    int col_offset;

    Lexer(const std::string& t, int line_, int col_offset_)
        : text(t), line(line_), col_offset(col_offset_) {}

    [[noreturn]] void fail(const std::string& msg, std::size_t at) const {
        throw ParseError(msg, line, col_offset + static_cast<int>(at) + 1);
    }

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
            ++pos;
    }

    bool eof() {
        skip_ws();
        return pos >= text.size();
    }

    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }

    bool consume(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    void expect(char c, const char* what) {
        if (!consume(c)) fail(std::string("expected '") + c + "' " + what, pos);
    }
};

struct Parser {
    Lexer lex;

    Parser(const std::string& text, int line, int col_offset)
        : lex(text, line, col_offset) {}

    ExprPtr parse() {
        ExprPtr e = parse_sum();
        if (!lex.eof()) lex.fail("unexpected trailing input", lex.pos);
        return fold(e);
    }

    ExprPtr parse_sum() {
        std::vector<ExprPtr> terms;
        terms.push_back(parse_term());
        for (;;) {
            if (lex.consume('+')) {
                terms.push_back(parse_term());
            } else if (lex.consume('-')) {
                terms.push_back(Expr::negate(parse_term()));
            } else {
                break;
            }
        }
        return terms.size() == 1 ? terms[0] : Expr::sum(std::move(terms));
    }

    ExprPtr parse_term() {
        std::vector<ExprPtr> factors;
        factors.push_back(parse_factor());
        for (;;) {
            if (lex.consume('*')) {
                factors.push_back(parse_factor());
            } else if (lex.consume('/')) {
                std::size_t at = lex.pos;
                double d = parse_literal_number("divisor must be a numeric literal");
                if (d == 0.0) lex.fail("division by zero", at);
                factors.push_back(Expr::constant(1.0 / d));
            } else {
                break;
            }
        }
        return factors.size() == 1 ? factors[0] : Expr::product(std::move(factors));
    }

    ExprPtr parse_factor() {
        if (lex.consume('-')) return Expr::negate(parse_factor());
        ExprPtr base = parse_primary();
        if (lex.consume('^')) {
            std::size_t at = lex.pos;
            int expo = parse_literal_int("exponent must be a nonnegative integer literal");
            if (expo < 0) lex.fail("exponent must be nonnegative", at);
            return Expr::power(std::move(base), expo);
        }
        return base;
    }

    ExprPtr parse_primary() {
        lex.skip_ws();
        if (lex.pos >= lex.text.size()) lex.fail("unexpected end of expression", lex.pos);
        char c = lex.text[lex.pos];

        if (c == '(') {
            ++lex.pos;
            ExprPtr e = parse_sum();
            lex.expect(')', "to close '('");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            return Expr::constant(parse_literal_number("malformed number"));
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = lex.pos;
            while (lex.pos < lex.text.size() &&
                   std::isalpha(static_cast<unsigned char>(lex.text[lex.pos])))
                ++lex.pos;
            std::string word = lex.text.substr(start, lex.pos - start);
            if (word == "re" || word == "im") {
                lex.expect('(', ("after '" + word + "'").c_str());
                ExprPtr inner = parse_sum();
                lex.expect(')', ("to close '" + word + "('").c_str());
                return word == "re" ? Expr::real_part(inner) : Expr::imag_part(inner);
            }
            bool conj = false;
            if (word == "cz") {
                conj = true;
            } else if (word != "z") {
                lex.fail("unknown identifier '" + word + "'", start);
            }
            std::size_t dstart = lex.pos;
            while (lex.pos < lex.text.size() &&
                   std::isdigit(static_cast<unsigned char>(lex.text[lex.pos])))
                ++lex.pos;
            if (lex.pos == dstart) lex.fail("variable needs an index, e.g. z1", start);
            int idx = 0;
            auto res = std::from_chars(lex.text.data() + dstart, lex.text.data() + lex.pos, idx);
            if (res.ec != std::errc() || idx < 1)
                lex.fail("bad variable index", dstart);
            return Expr::variable(idx, conj);
        }
        lex.fail(std::string("unexpected character '") + c + "'", lex.pos);
    }

    double parse_literal_number(const char* what) {
        lex.skip_ws();
        std::size_t start = lex.pos;
        while (lex.pos < lex.text.size()) {
            char c = lex.text[lex.pos];
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
                ++lex.pos;
            } else if ((c == 'e' || c == 'E') && lex.pos + 1 < lex.text.size()) {
                char nxt = lex.text[lex.pos + 1];
                if (std::isdigit(static_cast<unsigned char>(nxt)) || nxt == '+' || nxt == '-') {
                    lex.pos += 2;
                    while (lex.pos < lex.text.size() &&
                           std::isdigit(static_cast<unsigned char>(lex.text[lex.pos])))
                        ++lex.pos;
                }
                break;
            } else {
                break;
            }
        }
        if (lex.pos == start) lex.fail(what, start);
        double v = 0.0;
        auto res = std::from_chars(lex.text.data() + start, lex.text.data() + lex.pos, v);
        if (res.ec != std::errc() || res.ptr != lex.text.data() + lex.pos)
            lex.fail(what, start);
        return v;
    }

    int parse_literal_int(const char* what) {
        lex.skip_ws();
        std::size_t start = lex.pos;
        while (lex.pos < lex.text.size() &&
               std::isdigit(static_cast<unsigned char>(lex.text[lex.pos])))
            ++lex.pos;
        if (lex.pos == start) lex.fail(what, start);
        int v = 0;
        auto res = std::from_chars(lex.text.data() + start, lex.text.data() + lex.pos, v);
        if (res.ec != std::errc()) lex.fail(what, start);
        return v;
    }
};

} // namespace

ExprPtr parse_expression(const std::string& text, int line, int column_offset) {
    Parser p(text, line, column_offset);
    return p.parse();
}

} // namespace levi
