#pragma once

#include "wcsched/cumvec.hpp"

#include <vector>

namespace wcsched {

inline constexpr i64 kMaxMatrixHorizon = 512;

/// Strictly upper-triangular nonnegative matrix with nondecreasing rows and
/// nonincreasing columns, conditioned on a backlog b: entries above row 0 are
/// capped by (row0 - b)^+. Identifies a min-plus worst-case service whose
/// spectral values it equals entry for entry.
class SpectralMatrix {
public:
    /// Validates all four defining properties; throws invalid-argument.
    SpectralMatrix(i64 backlog, std::vector<std::vector<i64>> rows);

    i64 horizon() const noexcept { return h_; }
    i64 backlog() const noexcept { return b_; }

    i64 at(i64 i, i64 j) const noexcept {
        return v_[static_cast<std::size_t>(i) * static_cast<std::size_t>(h_ + 1) +
                  static_cast<std::size_t>(j)];
    }

    /// Row i as a span of length horizon()+1.
    const i64* row(i64 i) const noexcept {
        return v_.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(h_ + 1);
    }

    bool operator==(const SpectralMatrix& other) const noexcept = default;

private:
    friend SpectralMatrix update_spectral(const SpectralMatrix&, i64, i64);
    friend class CumulativeMatrix;
    SpectralMatrix() = default;
    void validate() const;

    i64 h_ = 0;
    i64 b_ = 0;
    std::vector<i64> v_; // row-major (h+1)^2
};

/// Strictly upper-triangular nonnegative matrix with nondecreasing rows; the
/// redundant but update-friendly identification of a min-plus service.
class CumulativeMatrix {
public:
    CumulativeMatrix(std::vector<std::vector<i64>> rows);

    i64 horizon() const noexcept { return h_; }
    i64 at(i64 i, i64 j) const noexcept {
        return v_[static_cast<std::size_t>(i) * static_cast<std::size_t>(h_ + 1) +
                  static_cast<std::size_t>(j)];
    }
    const i64* row(i64 i) const noexcept {
        return v_.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(h_ + 1);
    }

    /// View a spectral matrix as a plain cumulative matrix.
    static CumulativeMatrix from_spectral(const SpectralMatrix& s);

    bool operator==(const CumulativeMatrix& other) const noexcept = default;

private:
    friend CumulativeMatrix update_cumulative(const CumulativeMatrix&, i64, i64);
    CumulativeMatrix() = default;
    void validate() const;

    i64 h_ = 0;
    std::vector<i64> v_;
};

/// Min-plus evaluation: result[j] = min over i <= j of (q[i] + m[i][j]).
CumVec eval_minplus(const CumulativeMatrix& m, const CumVec& q);
CumVec eval_minplus(const SpectralMatrix& s, const CumVec& q);

/// Canonical spectral form of a cumulative matrix conditioned on backlog b;
/// identifies the same service.
SpectralMatrix normalize_to_spectral(const CumulativeMatrix& m, i64 backlog);

/// Full conditional spectrum given this slot's queue length q1 >= backlog.
/// Returned as a raw grid shaped like the matrix (it is conditioned on q1,
/// not on a backlog, so it is not itself a SpectralMatrix).
std::vector<std::vector<i64>> conditional_spectrum(const SpectralMatrix& s, i64 q1);

/// Row 0 of the conditional spectrum as a cumulative vector:
/// result[j] = min(s[0][j], q1 + s[1][j]).
CumVec conditional_row0(const SpectralMatrix& s, i64 q1);

/// Immediate service requirement this slot: min(s[0][1], q1).
i64 immediate_requirement(const SpectralMatrix& s, i64 q1);

/// Slot update after serving d of q1 queued tasks. Requires
/// immediate_requirement <= d <= q1; the boundary row/column is regenerated
/// by the saturating-tail convention. The result is conditioned on q1 - d.
SpectralMatrix update_spectral(const SpectralMatrix& s, i64 q1, i64 d);

/// Degraded update for callers that under-served the guarantee (d < p): the
/// overdue remainder folds into the next slot's immediate requirement.
SpectralMatrix update_spectral_degraded(const SpectralMatrix& s, i64 q1, i64 d);

/// Same update in cumulative form: rows above 0 shift up-left.
CumulativeMatrix update_cumulative(const CumulativeMatrix& m, i64 q1, i64 d);

} // namespace wcsched
