#pragma once

#include "wcsched/cumvec.hpp"

#include <functional>
#include <map>
#include <vector>

// Brute-force reference implementations over tiny enumerated instances. They
// are deliberately independent of the closed-form paths in minplus/dualcurve/
// feasible: spectra are found by exhaustive maximization over an enumerated
// lattice of queued-arrival vectors, and feasibility by trying every valid
// schedule. Only meant for tests and the CLI's --oracle cross-check mode.

namespace wcsched::oracle {

/// Raw (horizon+1)^2 grid, row-major; no invariants enforced.
using Grid = std::vector<std::vector<i64>>;

/// All cumulative vectors with the given horizon, entries in [0, cap], and
/// first entry >= b (the queued-arrival lattice conditioned on backlog b).
std::vector<CumVec> enumerate_queue_vectors(i64 b, i64 horizon, i64 cap);

/// A worst-case service stored as an explicit table over the enumerated
/// lattice. Large enumerations are refused with oracle-too-large.
class TabulatedService {
public:
    static constexpr std::size_t kMaxKeys = 2'000'000;

    /// Builds the table by evaluating `service` on every lattice point.
    /// Throws invalid-argument if any value violates psi(q) <= q or is not a
    /// valid cumulative vector.
    static TabulatedService tabulate(const std::function<CumVec(const CumVec&)>& service,
                                     i64 b, i64 horizon, i64 cap);

    i64 backlog() const noexcept { return b_; }
    i64 horizon() const noexcept { return h_; }
    i64 cap() const noexcept { return cap_; }

    /// Exact lookup; the key must be a lattice point of this table.
    const CumVec& eval(const CumVec& q) const;

    const std::map<std::vector<i64>, CumVec>& table() const noexcept { return table_; }

private:
    TabulatedService(i64 b, i64 h, i64 cap) : b_(b), h_(h), cap_(cap) {}

    i64 b_ = 0;
    i64 h_ = 0;
    i64 cap_ = 0;
    std::map<std::vector<i64>, CumVec> table_;

    friend TabulatedService brute_update(const TabulatedService&, i64, i64);
};

/// Exhaustive spectral values: grid[i][j] = max over the table of
/// (psi_j(q) - q_i)^+ for 0 <= i, j <= horizon.
Grid brute_spectrum(const TabulatedService& svc);

/// Same with the maximization restricted to keys whose first entry is q1.
/// Requires b <= q1 <= cap.
Grid brute_conditional_spectrum(const TabulatedService& svc, i64 q1);

/// Immediate requirement p = conditional spectral value over [t, t+1).
i64 brute_immediate(const TabulatedService& svc, i64 q1);

/// Slot update: serves d of the q1 queued tasks and re-expresses the service
/// one slot later (horizon shrinks by one, cap by d). Requires
/// brute_immediate(svc, q1) <= d <= q1.
TabulatedService brute_update(const TabulatedService& svc, i64 q1, i64 d);

/// Exhaustive feasible-schedule set for a tiny system: every valid schedule
/// whose induced next-slot spectra keep all interval reservations within
/// capacity. Scale caps: flows <= 3, c <= 4, horizon <= 4.
std::vector<std::vector<i64>> brute_feasible_set(const std::vector<TabulatedService>& flows,
                                                 const std::vector<i64>& q, i64 c);

} // namespace wcsched::oracle
