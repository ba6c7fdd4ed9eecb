#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace almac {

// Finite integer domain as sorted disjoint inclusive ranges ("interval with
// holes"). Values are int64; enumeration members and booleans map onto
// member indices / {0,1}.
class FiniteDomain {
public:
    struct Range {
        int64_t lo, hi;
        bool operator==(const Range&) const = default;
    };

    FiniteDomain() = default;
    FiniteDomain(int64_t lo, int64_t hi) {
        if (lo <= hi) ranges_.push_back({lo, hi});
    }
    static FiniteDomain singleton_of(int64_t v) { return FiniteDomain(v, v); }
    static FiniteDomain empty_domain() { return FiniteDomain(); }
    // `ranges` must be sorted, disjoint and non-adjacent.
    static FiniteDomain from_ranges(std::vector<Range> ranges) {
        FiniteDomain d;
        d.ranges_ = std::move(ranges);
        return d;
    }
    // `values` must be strictly ascending.
    static FiniteDomain from_sorted_values(const std::vector<int64_t>& values);

    bool empty() const { return ranges_.empty(); }
    bool is_singleton() const {
        return ranges_.size() == 1 && ranges_[0].lo == ranges_[0].hi;
    }
    int64_t min() const { return ranges_.front().lo; }
    int64_t max() const { return ranges_.back().hi; }
    int64_t single_value() const { return ranges_.front().lo; }

    int64_t count() const {
        int64_t n = 0;
        for (const auto& r : ranges_) n += r.hi - r.lo + 1;
        return n;
    }

    bool contains(int64_t v) const;

    // Mutators return true when the domain changed.
    bool remove(int64_t v);
    bool clamp_min(int64_t lo); // remove values < lo
    bool clamp_max(int64_t hi); // remove values > hi
    bool intersect(const FiniteDomain& other);
    bool assign(int64_t v); // reduce to {v}; empties the domain if v absent

    // Ascending value enumeration.
    template <typename Fn>
    void for_each(Fn&& fn) const {
        for (const auto& r : ranges_)
            for (int64_t v = r.lo; v <= r.hi; ++v) fn(v);
    }
    std::vector<int64_t> values() const {
        std::vector<int64_t> out;
        out.reserve(static_cast<size_t>(count()));
        for_each([&](int64_t v) { out.push_back(v); });
        return out;
    }

    // Rendered as {1..3,5,7}; used by the store dump.
    std::string str() const;

    bool operator==(const FiniteDomain&) const = default;

    const std::vector<Range>& ranges() const { return ranges_; }

private:
    std::vector<Range> ranges_;
};

} // namespace almac
