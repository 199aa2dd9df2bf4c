#include "levi/jet.hpp"

#include <algorithm>

#include "levi/errors.hpp"

namespace levi {

cplx JetF::d(std::initializer_list<int> a, std::initializer_list<int> b) const {
    JetKey key{std::vector<int>(a), std::vector<int>(b)};
    std::sort(key.a.begin(), key.a.end());
    std::sort(key.b.begin(), key.b.end());
    return d(key);
}

cplx JetF::d(const JetKey& key) const {
    auto it = derivs.find(key);
    if (it == derivs.end())
        throw Error("jet entry of order " +
                    std::to_string(key.a.size() + key.b.size()) +
                    " requested but jet was built to order " + std::to_string(order));
    return it->second;
}

// Derivation order is canonical (antiholomorphic indices first, each side in
// ascending index order) so the cached trees are reproducible run to run.
JetExprTable::JetExprTable(const ExprPtr& f, int num_vars) : num_vars_(num_vars) {
    table_[JetKey{}] = f;
    for (int order = 1; order <= kMaxOrder; ++order) {
        for (const auto& [key, expr] : std::map<JetKey, ExprPtr>(table_)) {
            if (static_cast<int>(key.a.size() + key.b.size()) != order - 1) continue;
            if (key.a.empty()) {
                // extend the antiholomorphic side (keys stay sorted: only
                // indices >= the current maximum are appended)
                int lo = key.b.empty() ? 0 : key.b.back();
                for (int k = lo; k < num_vars_; ++k) {
                    JetKey nk = key;
                    nk.b.push_back(k);
                    table_[nk] = wirtinger_derive(expr, k + 1, true);
                }
            }
            int lo = key.a.empty() ? 0 : key.a.back();
            for (int h = lo; h < num_vars_; ++h) {
                JetKey nk = key;
                nk.a.push_back(h);
                table_[nk] = wirtinger_derive(expr, h + 1, false);
            }
        }
    }
}

const ExprPtr& JetExprTable::expr(const JetKey& key) const {
    auto it = table_.find(key);
    if (it == table_.end()) throw Error("derivative order exceeds table order 3");
    return it->second;
}

JetF JetExprTable::eval(const std::vector<cplx>& z, int order) const {
    if (order < 0 || order > kMaxOrder)
        throw Error("jet order must be between 0 and 3");
    if (static_cast<int>(z.size()) != num_vars_)
        throw DimensionMismatch("point has " + std::to_string(z.size()) +
                                " coordinates, surface needs " +
                                std::to_string(num_vars_));
    JetF out;
    out.z = z;
    out.order = order;
    for (const auto& [key, expr] : table_) {
        if (static_cast<int>(key.a.size() + key.b.size()) > order) continue;
        out.derivs[key] = evaluate(expr, z);
    }
    return out;
}

JetF jet(const SurfaceDef& s, const std::vector<cplx>& z, int order) {
    if (!s.jets) throw Error("surface was not built via SurfaceDef::make");
    return s.jets->eval(z, order);
}

} // namespace levi
