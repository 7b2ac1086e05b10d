#pragma once

#include "wcsched/error.hpp"

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace wcsched {

using i64 = std::int64_t;

/// Sentinel for slot queries that fall past the saturating tail ("never").
/// Sorts after every finite slot index.
inline constexpr i64 kBeyondHorizon = std::numeric_limits<i64>::max();

inline bool is_beyond(i64 slot) noexcept { return slot == kBeyondHorizon; }

/// Finite-horizon cumulative counting vector: entries[0] == 0, nondecreasing,
/// nonnegative. Index reads past the horizon saturate at the last entry, the
/// finite stand-in for a semi-infinite vector with a constant tail.
class CumVec {
public:
    explicit CumVec(std::vector<i64> entries);

    static CumVec zeros(i64 horizon);
    /// [0, 1, 1, ..., 1]
    static CumVec delta(i64 horizon);
    /// value * delta: [0, value, value, ...]
    static CumVec scaled_delta(i64 value, i64 horizon);
    /// count units appearing in slot `at`: count * R^at delta.
    static CumVec step(i64 count, i64 at, i64 horizon);
    /// [0, rate, 2*rate, ...]
    static CumVec constant_rate(i64 rate, i64 horizon);
    /// Piecewise-linear: starts at 0, jumps by `offset` at slot 1, then grows
    /// by the segment rates ((length, rate) pairs, last rate extended to the
    /// horizon).
    static CumVec piecewise(i64 offset, std::span<const std::pair<i64, i64>> segments,
                            i64 horizon);

    i64 horizon() const noexcept { return static_cast<i64>(e_.size()) - 1; }
    i64 tail() const noexcept { return e_.back(); }

    /// Saturating read: j past the horizon returns the tail value.
    i64 operator[](i64 j) const noexcept {
        if (j <= 0) return 0;
        const i64 h = horizon();
        return e_[static_cast<std::size_t>(j < h ? j : h)];
    }

    std::span<const i64> entries() const noexcept { return e_; }

    /// Slot in which the h-th unit is counted (0-based offset): the largest j
    /// with entries[j] < h under the saturating tail. kBeyondHorizon when the
    /// count never reaches h. Requires h >= 1.
    i64 slot_of(i64 h) const;

    /// Right shift by k slots: result[j] = entries[j - k] for j >= k, else 0.
    CumVec shift_right(i64 k) const;

    /// One-slot left shift after subtracting `sub`, clipped at zero:
    /// result[j] = max(entries[j + 1] - sub, 0), tail duplicated at the
    /// horizon. Index 0 is clamped to 0; it is nonzero only when sub is below
    /// the first entry, i.e. when a caller under-serves a guarantee.
    CumVec shift_left_clip(i64 sub) const;

    CumVec pointwise_min(const CumVec& other) const;
    CumVec pointwise_min(i64 bound) const;
    CumVec pointwise_add(const CumVec& other) const;
    CumVec clip_sub(i64 sub) const; ///< max(entries[j] - sub, 0), no shift

    bool operator==(const CumVec& other) const noexcept = default;

private:
    std::vector<i64> e_;
};

/// result[j] = min over i <= j of (x[i] + y[j-i]). Horizons must match.
CumVec minplus_conv(const CumVec& x, const CumVec& y);

/// Entrywise sum of a family of vectors with a common horizon.
CumVec sum_vecs(std::span<const CumVec> xs);

void require_same_horizon(const CumVec& x, const CumVec& y, const char* what);

} // namespace wcsched
