#include "wcsched/minplus.hpp"

#include "wcsched/kernels.hpp"

#include <algorithm>

namespace wcsched {

namespace {

std::vector<i64> flatten(i64& h_out, std::vector<std::vector<i64>>&& rows) {
    if (rows.size() < 2) raise(Errc::invalid_horizon, "matrix needs horizon >= 1");
    const i64 h = static_cast<i64>(rows.size()) - 1;
    if (h > kMaxMatrixHorizon)
        raise(Errc::invalid_horizon,
              "matrix horizon above hard limit " + std::to_string(kMaxMatrixHorizon));
    std::vector<i64> v;
    v.reserve(rows.size() * rows.size());
    for (const auto& r : rows) {
        if (static_cast<i64>(r.size()) != h + 1)
            raise(Errc::invalid_argument, "matrix rows must have horizon+1 entries");
        v.insert(v.end(), r.begin(), r.end());
    }
    h_out = h;
    return v;
}

// Shared min-plus product against the columns of a triangular matrix.
CumVec eval_rows(const i64* base, i64 h, const CumVec& q) {
    if (q.horizon() != h) raise(Errc::invalid_argument, "eval_minplus: horizon mismatch");
    const std::size_t w = static_cast<std::size_t>(h) + 1;
    std::vector<i64> out(base, base + w); // i = 0 term: q[0] + row0
    for (i64 i = 1; i <= h; ++i) {
        const i64* row = base + static_cast<std::size_t>(i) * w;
        kern::min_add(out.data() + i, row + i, q[i], w - static_cast<std::size_t>(i));
    }
    return CumVec(std::move(out));
}

} // namespace

SpectralMatrix::SpectralMatrix(i64 backlog, std::vector<std::vector<i64>> rows) {
    if (backlog < 0) raise(Errc::invalid_argument, "backlog must be >= 0");
    b_ = backlog;
    v_ = flatten(h_, std::move(rows));
    validate();
}

void SpectralMatrix::validate() const {
    for (i64 i = 0; i <= h_; ++i) {
        for (i64 j = 0; j <= h_; ++j) {
            const i64 s = at(i, j);
            if (s < 0) raise(Errc::invalid_argument, "spectral entries must be >= 0");
            if (i >= j && s != 0)
                raise(Errc::invalid_argument, "spectral matrix must vanish on and below "
                                              "the diagonal");
            if (j < h_ && s > at(i, j + 1))
                raise(Errc::invalid_argument, "spectral rows must be nondecreasing");
            if (i < h_ && s < at(i + 1, j))
                raise(Errc::invalid_argument, "spectral columns must be nonincreasing");
            if (i > 0 && s > std::max<i64>(at(0, j) - b_, 0))
                raise(Errc::invalid_argument,
                      "spectral entries above row 0 must stay within (row0 - b)^+");
        }
    }
}

CumulativeMatrix::CumulativeMatrix(std::vector<std::vector<i64>> rows) {
    v_ = flatten(h_, std::move(rows));
    validate();
}

void CumulativeMatrix::validate() const {
    for (i64 i = 0; i <= h_; ++i) {
        for (i64 j = 0; j <= h_; ++j) {
            const i64 m = at(i, j);
            if (m < 0) raise(Errc::invalid_argument, "cumulative entries must be >= 0");
            if (i >= j && m != 0)
                raise(Errc::invalid_argument, "cumulative matrix must vanish on and below "
                                              "the diagonal");
            if (j < h_ && m > at(i, j + 1))
                raise(Errc::invalid_argument, "cumulative rows must be nondecreasing");
        }
    }
}

CumulativeMatrix CumulativeMatrix::from_spectral(const SpectralMatrix& s) {
    CumulativeMatrix m;
    m.h_ = s.h_;
    m.v_ = s.v_;
    return m;
}

CumVec eval_minplus(const CumulativeMatrix& m, const CumVec& q) {
    return eval_rows(m.row(0), m.horizon(), q);
}

CumVec eval_minplus(const SpectralMatrix& s, const CumVec& q) {
    return eval_rows(s.row(0), s.horizon(), q);
}

SpectralMatrix normalize_to_spectral(const CumulativeMatrix& m, i64 backlog) {
    if (backlog < 0) raise(Errc::invalid_argument, "backlog must be >= 0");
    const i64 h = m.horizon();
    const std::size_t w = static_cast<std::size_t>(h) + 1;
    SpectralMatrix s;
    s.h_ = h;
    s.b_ = backlog;
    s.v_.assign(w * w, 0);

    // Row 0 carries over; row i > 0 is the running column minimum of rows
    // 1..i capped by (row0 - b)^+.
    std::copy(m.row(0), m.row(0) + w, s.v_.begin());
    std::vector<i64> cap(w);
    kern::sub_clip(cap.data(), m.row(0), backlog, w);
    std::vector<i64> run(m.row(1), m.row(1) + w);
    for (i64 i = 1; i <= h; ++i) {
        if (i > 1) kern::min_vec(run.data(), m.row(i), w);
        i64* dst = s.v_.data() + static_cast<std::size_t>(i) * w;
        std::copy(run.begin(), run.end(), dst);
        kern::min_vec(dst, cap.data(), w);
    }
    s.validate();
    return s;
}

std::vector<std::vector<i64>> conditional_spectrum(const SpectralMatrix& s, i64 q1) {
    if (q1 < s.backlog())
        raise(Errc::invalid_argument, "conditional spectrum wants q1 >= backlog");
    const i64 h = s.horizon();
    const std::size_t w = static_cast<std::size_t>(h) + 1;
    std::vector<std::vector<i64>> grid(w, std::vector<i64>(w, 0));
    // Row 0: min(s[0][j], q1 + s[1][j]); rows i > 0: min((s[0][j]-q1)^+, s[i][j]).
    std::copy(s.row(0), s.row(0) + w, grid[0].begin());
    kern::min_add(grid[0].data(), s.row(1), q1, w);
    std::vector<i64> cap(w);
    kern::sub_clip(cap.data(), s.row(0), q1, w);
    for (i64 i = 1; i <= h; ++i) {
        auto& row = grid[static_cast<std::size_t>(i)];
        std::copy(s.row(i), s.row(i) + w, row.begin());
        kern::min_vec(row.data(), cap.data(), w);
    }
    return grid;
}

CumVec conditional_row0(const SpectralMatrix& s, i64 q1) {
    if (q1 < s.backlog())
        raise(Errc::invalid_argument, "conditional spectrum wants q1 >= backlog");
    const std::size_t w = static_cast<std::size_t>(s.horizon()) + 1;
    std::vector<i64> out(s.row(0), s.row(0) + w);
    kern::min_add(out.data(), s.row(1), q1, w);
    return CumVec(std::move(out));
}

i64 immediate_requirement(const SpectralMatrix& s, i64 q1) {
    return std::min(s.at(0, 1), q1);
}

namespace {

void check_update_args(i64 p, i64 q1, i64 d) {
    if (d > q1) raise(Errc::causality_violation, "serving more than is queued");
    if (d < p) raise(Errc::guarantee_violation, "serving less than the immediate requirement");
}

} // namespace

namespace {

SpectralMatrix update_spectral_impl(const SpectralMatrix& s, i64 q1, i64 d);

} // namespace

SpectralMatrix update_spectral(const SpectralMatrix& s, i64 q1, i64 d) {
    if (q1 < s.backlog()) raise(Errc::invalid_argument, "update wants q1 >= backlog");
    check_update_args(immediate_requirement(s, q1), q1, d);
    return update_spectral_impl(s, q1, d);
}

SpectralMatrix update_spectral_degraded(const SpectralMatrix& s, i64 q1, i64 d) {
    if (q1 < s.backlog()) raise(Errc::invalid_argument, "update wants q1 >= backlog");
    if (d > q1) raise(Errc::causality_violation, "serving more than is queued");
    return update_spectral_impl(s, q1, d);
}

namespace {

SpectralMatrix update_spectral_impl(const SpectralMatrix& s, i64 q1, i64 d) {
    const i64 h = s.horizon();
    const std::size_t w = static_cast<std::size_t>(h) + 1;
    SpectralMatrix out;
    out.h_ = h;
    out.b_ = q1 - d;
    out.v_.assign(w * w, 0);

    auto shift_cols = [&](const i64* src, i64* dst) {
        // dst[j] = src[j+1] with the horizon column duplicated.
        std::copy(src + 1, src + w, dst);
        dst[w - 1] = src[w - 1];
    };

    // Row 0: (min(s[0][j+1], q1 + s[1][j+1]) - d)^+.
    std::vector<i64> r0(w), r1(w);
    shift_cols(s.row(0), r0.data());
    shift_cols(s.row(1), r1.data());
    kern::min_add(r0.data(), r1.data(), q1, w);
    kern::sub_clip(out.v_.data(), r0.data(), d, w);

    // Rows i > 0: min((s[0][j+1] - q1)^+, s[i+1][j+1]); the row past the
    // horizon is zero, which the zero-fill already provides. The regenerated
    // boundary column takes s[i][h], the entry with the same saturated gap.
    std::vector<i64> cap(w), src(w);
    shift_cols(s.row(0), src.data());
    kern::sub_clip(cap.data(), src.data(), q1, w);
    for (i64 i = 1; i < h; ++i) {
        i64* dst = out.v_.data() + static_cast<std::size_t>(i) * w;
        std::copy(s.row(i + 1) + 1, s.row(i + 1) + w, dst);
        dst[w - 1] = s.at(i, h);
        kern::min_vec(dst, cap.data(), w);
    }
    // Nonzero only when the caller under-served (degraded path): the overdue
    // remainder is folded into the next slot's immediate requirement.
    out.v_[0] = 0;
    out.validate();
    return out;
}

} // namespace

CumulativeMatrix update_cumulative(const CumulativeMatrix& m, i64 q1, i64 d) {
    if (q1 < 0) raise(Errc::invalid_argument, "update wants q1 >= 0");
    check_update_args(std::min(m.at(0, 1), q1), q1, d);
    const i64 h = m.horizon();
    const std::size_t w = static_cast<std::size_t>(h) + 1;
    CumulativeMatrix out;
    out.h_ = h;
    out.v_.assign(w * w, 0);

    auto shift_cols = [&](const i64* src, i64* dst) {
        std::copy(src + 1, src + w, dst);
        dst[w - 1] = src[w - 1];
    };

    std::vector<i64> r0(w), r1(w);
    shift_cols(m.row(0), r0.data());
    shift_cols(m.row(1), r1.data());
    kern::min_add(r0.data(), r1.data(), q1, w);
    kern::sub_clip(out.v_.data(), r0.data(), d, w);

    // Rows shift up-left; the regenerated boundary column takes the entry
    // with the same saturated gap, kept row-monotone.
    for (i64 i = 1; i < h; ++i) {
        i64* dst = out.v_.data() + static_cast<std::size_t>(i) * w;
        std::copy(m.row(i + 1) + 1, m.row(i + 1) + w, dst);
        dst[w - 1] = std::max(m.at(i + 1, h), m.at(i, h));
    }
    out.validate();
    return out;
}

} // namespace wcsched
