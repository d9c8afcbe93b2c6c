#pragma once

#include "generacci/types.hpp"

#include <algorithm>
#include <utility>
#include <vector>

namespace generacci::detail {

// Finite union of half-open integer intervals [lo, hi), kept sorted and
// coalesced so adjacent runs merge.
class IntervalSet {
public:
    IntervalSet() = default;
    static IntervalSet point(const BigInt& v) {
        IntervalSet s;
        s.runs_.emplace_back(v, v + 1);
        return s;
    }

    bool empty() const { return runs_.empty(); }
    std::size_t runs() const { return runs_.size(); }

    IntervalSet shifted(const BigInt& x) const {
        IntervalSet s;
        s.runs_.reserve(runs_.size());
        for (const auto& [lo, hi] : runs_) s.runs_.emplace_back(lo + x, hi + x);
        return s;
    }

    void unite(const IntervalSet& other) {
        if (other.runs_.empty()) return;
        std::vector<std::pair<BigInt, BigInt>> all;
        all.reserve(runs_.size() + other.runs_.size());
        std::merge(runs_.begin(), runs_.end(), other.runs_.begin(), other.runs_.end(),
                   std::back_inserter(all),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
        runs_.clear();
        for (auto& r : all) {
            if (!runs_.empty() && r.first <= runs_.back().second) {
                if (r.second > runs_.back().second) runs_.back().second = r.second;
            } else {
                runs_.push_back(std::move(r));
            }
        }
    }

    bool contains(const BigInt& v) const {
        auto it = std::upper_bound(runs_.begin(), runs_.end(), v,
                                   [](const BigInt& x, const auto& r) { return x < r.first; });
        if (it == runs_.begin()) return false;
        --it;
        return v < it->second;
    }

    // Least integer >= 1 outside the set.
    BigInt mex_positive() const {
        BigInt m = 1;
        for (const auto& [lo, hi] : runs_) {
            if (lo > m) break;
            if (hi > m) m = hi;
        }
        return m;
    }

private:
    std::vector<std::pair<BigInt, BigInt>> runs_;
};

}  // namespace generacci::detail
