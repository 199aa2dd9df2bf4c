#pragma once

#include <initializer_list>
#include <map>
#include <vector>

#include "levi/surface.hpp"

namespace levi {

// All Wirtinger derivatives of F at one point, up to a requested order.
// Multi-indices are sorted and 0-based.
struct JetF {
    std::vector<cplx> z;
    int order = 0;
    std::map<JetKey, cplx> derivs;

    cplx d(std::initializer_list<int> a, std::initializer_list<int> b) const;
    cplx d(const JetKey& key) const;
};

// Symbolic derivative expressions of F, derived once per surface and shared.
class JetExprTable {
public:
    static constexpr int kMaxOrder = 3;

    JetExprTable(const ExprPtr& f, int num_vars);

    const ExprPtr& expr(const JetKey& key) const;
    int num_vars() const { return num_vars_; }

    JetF eval(const std::vector<cplx>& z, int order) const;

private:
    int num_vars_;
    std::map<JetKey, ExprPtr> table_;
};

// Evaluates every derivative of F at z up to the given order (order <= 3).
JetF jet(const SurfaceDef& s, const std::vector<cplx>& z, int order);

} // namespace levi
