#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "almac/value.hpp"

namespace almac {

// Incremental Gaussian elimination over linear real equations. Maintains a
// triangular solved form: each pivot unknown is expressed over non-pivot
// unknowns plus a constant. Copyable; the trail snapshots whole states.
class RealSolver {
public:
    struct Row {
        std::vector<std::pair<double, UnknownId>> terms; // sorted by id
        double c = 0.0;
        bool operator==(const Row&) const = default;
    };

    enum class TellResult { Ok, Redundant, Failed };

    // Tells sum(coef*u) + konst = 0.
    TellResult tell(std::vector<std::pair<double, UnknownId>> terms,
                    double konst);

    bool determined(UnknownId u) const {
        auto it = rows_.find(u);
        return it != rows_.end() && it->second.terms.empty();
    }
    std::optional<double> value(UnknownId u) const {
        auto it = rows_.find(u);
        if (it == rows_.end() || !it->second.terms.empty()) return std::nullopt;
        return it->second.c;
    }

    const std::map<UnknownId, Row>& rows() const { return rows_; }

    bool operator==(const RealSolver&) const = default;

private:
    // pivot tolerance is relative to the largest coefficient seen in the
    // incoming equation; keeps near-cancelled terms from becoming pivots.
    static constexpr double kPivotTol = 1e-12;

    std::map<UnknownId, Row> rows_;
};

} // namespace almac
