#include "almac/real_solver.hpp"

#include <algorithm>
#include <cmath>

namespace almac {

namespace {

void add_term(std::vector<std::pair<double, UnknownId>>& terms, double coef,
              UnknownId u) {
    for (auto& t : terms) {
        if (t.second == u) {
            t.first += coef;
            return;
        }
    }
    terms.emplace_back(coef, u);
}

void sort_terms(std::vector<std::pair<double, UnknownId>>& terms) {
    std::sort(terms.begin(), terms.end(),
              [](const auto& a, const auto& b) { return a.second < b.second; });
}

} // namespace

RealSolver::TellResult RealSolver::tell(
    std::vector<std::pair<double, UnknownId>> in_terms, double konst) {
    double scale = std::fabs(konst);
    for (const auto& [c, u] : in_terms) scale = std::max(scale, std::fabs(c));

    // Substitute the current solved form into the incoming equation.
    std::vector<std::pair<double, UnknownId>> terms;
    double c = konst;
    for (const auto& [coef, u] : in_terms) {
        auto it = rows_.find(u);
        if (it == rows_.end()) {
            add_term(terms, coef, u);
        } else {
            c += coef * it->second.c;
            for (const auto& [rc, ru] : it->second.terms)
                add_term(terms, coef * rc, ru);
        }
    }
    for (const auto& [coef, u] : terms) scale = std::max(scale, std::fabs(coef));
    double tol = kPivotTol * (1.0 + scale);
    terms.erase(std::remove_if(terms.begin(), terms.end(),
                               [&](const auto& t) {
                                   return std::fabs(t.first) <= tol;
                               }),
                terms.end());

    if (terms.empty())
        return std::fabs(c) <= 1e-9 * (1.0 + scale) ? TellResult::Redundant
                                                    : TellResult::Failed;

    // Partial pivoting: take the unknown with the largest coefficient.
    auto pivot_it = std::max_element(
        terms.begin(), terms.end(), [](const auto& a, const auto& b) {
            return std::fabs(a.first) < std::fabs(b.first);
        });
    double pc = pivot_it->first;
    UnknownId pivot = pivot_it->second;
    terms.erase(pivot_it);

    // pivot = -(c + sum(terms)) / pc
    Row row;
    row.c = -c / pc;
    for (const auto& [coef, u] : terms)
        row.terms.emplace_back(-coef / pc, u);
    sort_terms(row.terms);

    // Eliminate the new pivot from existing rows.
    for (auto& [u, r] : rows_) {
        auto it = std::find_if(r.terms.begin(), r.terms.end(),
                               [&](const auto& t) { return t.second == pivot; });
        if (it == r.terms.end()) continue;
        double k = it->first;
        r.terms.erase(it);
        r.c += k * row.c;
        for (const auto& [rc, ru] : row.terms) add_term(r.terms, k * rc, ru);
        double rtol = kPivotTol;
        for (const auto& t : r.terms) rtol = std::max(rtol, kPivotTol * std::fabs(t.first));
        r.terms.erase(std::remove_if(r.terms.begin(), r.terms.end(),
                                     [&](const auto& t) {
                                         return std::fabs(t.first) <= rtol;
                                     }),
                      r.terms.end());
        sort_terms(r.terms);
    }

    rows_[pivot] = std::move(row);
    return TellResult::Ok;
}

} // namespace almac
