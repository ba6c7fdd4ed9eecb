#include "almac/domain.hpp"

#include <algorithm>

namespace almac {

bool FiniteDomain::contains(int64_t v) const {
    auto it = std::upper_bound(
        ranges_.begin(), ranges_.end(), v,
        [](int64_t x, const Range& r) { return x < r.lo; });
    if (it == ranges_.begin()) return false;
    --it;
    return v <= it->hi;
}

bool FiniteDomain::remove(int64_t v) {
    for (size_t i = 0; i < ranges_.size(); ++i) {
        Range& r = ranges_[i];
        if (v < r.lo) return false;
        if (v > r.hi) continue;
        if (r.lo == r.hi) {
            ranges_.erase(ranges_.begin() + static_cast<long>(i));
        } else if (v == r.lo) {
            r.lo++;
        } else if (v == r.hi) {
            r.hi--;
        } else {
            Range right{v + 1, r.hi};
            r.hi = v - 1;
            ranges_.insert(ranges_.begin() + static_cast<long>(i) + 1, right);
        }
        return true;
    }
    return false;
}

bool FiniteDomain::clamp_min(int64_t lo) {
    bool changed = false;
    while (!ranges_.empty() && ranges_.front().hi < lo) {
        ranges_.erase(ranges_.begin());
        changed = true;
    }
    if (!ranges_.empty() && ranges_.front().lo < lo) {
        ranges_.front().lo = lo;
        changed = true;
    }
    return changed;
}

bool FiniteDomain::clamp_max(int64_t hi) {
    bool changed = false;
    while (!ranges_.empty() && ranges_.back().lo > hi) {
        ranges_.pop_back();
        changed = true;
    }
    if (!ranges_.empty() && ranges_.back().hi > hi) {
        ranges_.back().hi = hi;
        changed = true;
    }
    return changed;
}

bool FiniteDomain::intersect(const FiniteDomain& other) {
    std::vector<Range> out;
    size_t i = 0, j = 0;
    while (i < ranges_.size() && j < other.ranges_.size()) {
        const Range& a = ranges_[i];
        const Range& b = other.ranges_[j];
        int64_t lo = std::max(a.lo, b.lo);
        int64_t hi = std::min(a.hi, b.hi);
        if (lo <= hi) out.push_back({lo, hi});
        if (a.hi < b.hi) ++i;
        else ++j;
    }
    if (out == ranges_) return false;
    ranges_ = std::move(out);
    return true;
}

bool FiniteDomain::assign(int64_t v) {
    if (!contains(v)) {
        bool changed = !ranges_.empty();
        ranges_.clear();
        return changed;
    }
    if (is_singleton()) return false;
    ranges_.assign(1, Range{v, v});
    return true;
}

FiniteDomain FiniteDomain::from_sorted_values(const std::vector<int64_t>& values) {
    std::vector<Range> ranges;
    for (int64_t v : values) {
        if (!ranges.empty() && ranges.back().hi + 1 == v)
            ranges.back().hi = v;
        else
            ranges.push_back({v, v});
    }
    return from_ranges(std::move(ranges));
}

std::string FiniteDomain::str() const {
    std::string out = "{";
    for (size_t i = 0; i < ranges_.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(ranges_[i].lo);
        if (ranges_[i].hi != ranges_[i].lo)
            out += ".." + std::to_string(ranges_[i].hi);
    }
    out += "}";
    return out;
}

} // namespace almac
