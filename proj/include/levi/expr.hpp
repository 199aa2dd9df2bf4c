#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace levi {

using cplx = std::complex<double>;

enum class ExprKind {
    Constant,
    Variable,
    Sum,
    Product,
    Power,
    Negate,
    RealPart,
    ImagPart,
};

class Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Immutable expression tree over the coordinates z_k and their conjugates.
// Conjugated variables are a token of their own (index + flag), never a
// conj() operator, so both Wirtinger derivatives are purely structural.
// Indices are 1-based to match the surface grammar.
class Expr {
public:
    ExprKind kind;
    cplx value{0.0, 0.0};     // Constant
    int index = 0;            // Variable
    bool conjugated = false;  // Variable
    int exponent = 0;         // Power
    std::vector<ExprPtr> children;

    static ExprPtr constant(cplx v);
    static ExprPtr variable(int index, bool conjugated = false);
    static ExprPtr sum(std::vector<ExprPtr> terms);
    static ExprPtr product(std::vector<ExprPtr> factors);
    static ExprPtr power(ExprPtr base, int exponent);
    static ExprPtr negate(ExprPtr e);
    static ExprPtr real_part(ExprPtr e);
    static ExprPtr imag_part(ExprPtr e);
};

// Constant folding plus flattening of nested sums/products. Idempotent;
// no reordering or full canonicalization.
ExprPtr fold(const ExprPtr& e);

// Node-by-node equality (kind, payload, children in order).
bool structurally_equal(const ExprPtr& a, const ExprPtr& b);

// Tree whose value is the complex conjugate of e: constants conjugated,
// z_k and cz_k swapped. re/im subtrees are real-valued and stay as they are.
ExprPtr conj_tree(const ExprPtr& e);

// Exact symbolic d/dz_index (conjugated=false) or d/dconj(z_index),
// constant-folded.
ExprPtr wirtinger_derive(const ExprPtr& e, int index, bool conjugated);

// z is 0-based: variable k reads z[k-1], its conjugate reads conj(z[k-1]).
cplx evaluate(const ExprPtr& e, const std::vector<cplx>& z);

// Grammar-compatible text for trees built from parsed input. Trees with
// non-real constants (possible via the API or differentiation of im())
// print those constants in a (a+b*i) debug form outside the grammar.
std::string to_string(const ExprPtr& e);

// Replaces variables; repl returns nullptr to keep a variable unchanged.
ExprPtr substitute(const ExprPtr& e,
                   const std::function<ExprPtr(int index, bool conjugated)>& repl);

// Largest variable index appearing in e (0 if none).
int max_var_index(const ExprPtr& e);

// Expression grammar entry point (used by the surface parser and tests).
// line/column offsets are used for error reporting.
ExprPtr parse_expression(const std::string& text, int line = 1, int column_offset = 0);

} // namespace levi
