#include "wcsched/oracle.hpp"

#include <algorithm>

namespace wcsched::oracle {

namespace {

void count_check(i64 b, i64 horizon, i64 cap) {
    if (horizon < 1 || horizon > 8) raise(Errc::oracle_too_large, "oracle horizon must be 1..8");
    if (cap < b || cap < 0) raise(Errc::invalid_argument, "cap must be >= max(b, 0)");
    // Lattice size is C(cap - b + horizon, horizon); guard the blowup.
    double est = 1.0;
    for (i64 k = 1; k <= horizon; ++k) est *= static_cast<double>(cap - b + k) / k;
    if (est > static_cast<double>(TabulatedService::kMaxKeys))
        raise(Errc::oracle_too_large, "enumeration lattice too large");
}

} // namespace

std::vector<CumVec> enumerate_queue_vectors(i64 b, i64 horizon, i64 cap) {
    count_check(b, horizon, cap);
    std::vector<CumVec> out;
    std::vector<i64> cur(static_cast<std::size_t>(horizon) + 1, 0);
    // Depth-first over nondecreasing suffixes with cur[1] >= b.
    auto rec = [&](auto&& self, std::size_t idx) -> void {
        if (idx == cur.size()) {
            out.emplace_back(cur);
            return;
        }
        i64 lo = idx == 1 ? b : cur[idx - 1];
        for (i64 v = lo; v <= cap; ++v) {
            cur[idx] = v;
            self(self, idx + 1);
        }
    };
    rec(rec, 1);
    return out;
}

TabulatedService TabulatedService::tabulate(
    const std::function<CumVec(const CumVec&)>& service, i64 b, i64 horizon, i64 cap) {
    TabulatedService out(b, horizon, cap);
    for (const CumVec& q : enumerate_queue_vectors(b, horizon, cap)) {
        CumVec val = service(q);
        if (val.horizon() != horizon)
            raise(Errc::invalid_argument, "tabulated service changed the horizon");
        for (i64 j = 0; j <= horizon; ++j) {
            if (val[j] > q[j])
                raise(Errc::invalid_argument,
                      "tabulated value exceeds its queued arrivals at index " +
                          std::to_string(j));
        }
        std::vector<i64> key(q.entries().begin(), q.entries().end());
        out.table_.emplace(std::move(key), std::move(val));
    }
    return out;
}

const CumVec& TabulatedService::eval(const CumVec& q) const {
    std::vector<i64> key(q.entries().begin(), q.entries().end());
    auto it = table_.find(key);
    if (it == table_.end())
        raise(Errc::invalid_argument, "queue vector outside the tabulated lattice");
    return it->second;
}

Grid brute_spectrum(const TabulatedService& svc) {
    const i64 h = svc.horizon();
    Grid grid(static_cast<std::size_t>(h) + 1,
              std::vector<i64>(static_cast<std::size_t>(h) + 1, 0));
    for (const auto& [key, psi] : svc.table()) {
        for (i64 i = 0; i <= h; ++i) {
            const i64 qi = key[static_cast<std::size_t>(i)];
            for (i64 j = i + 1; j <= h; ++j) {
                i64 v = psi[j] - qi;
                auto& cell = grid[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                if (v > cell) cell = v;
            }
        }
    }
    return grid;
}

Grid brute_conditional_spectrum(const TabulatedService& svc, i64 q1) {
    if (q1 < svc.backlog() || q1 > svc.cap())
        raise(Errc::invalid_argument, "conditioning queue length outside [b, cap]");
    const i64 h = svc.horizon();
    Grid grid(static_cast<std::size_t>(h) + 1,
              std::vector<i64>(static_cast<std::size_t>(h) + 1, 0));
    for (const auto& [key, psi] : svc.table()) {
        if (key[1] != q1) continue;
        for (i64 i = 0; i <= h; ++i) {
            const i64 qi = key[static_cast<std::size_t>(i)];
            for (i64 j = i + 1; j <= h; ++j) {
                i64 v = psi[j] - qi;
                auto& cell = grid[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                if (v > cell) cell = v;
            }
        }
    }
    return grid;
}

i64 brute_immediate(const TabulatedService& svc, i64 q1) {
    if (q1 < svc.backlog() || q1 > svc.cap())
        raise(Errc::invalid_argument, "conditioning queue length outside [b, cap]");
    i64 p = 0;
    for (const auto& [key, psi] : svc.table()) {
        if (key[1] != q1) continue;
        p = std::max(p, psi[1]);
    }
    return p;
}

TabulatedService brute_update(const TabulatedService& svc, i64 q1, i64 d) {
    const i64 p = brute_immediate(svc, q1);
    if (d > q1) raise(Errc::causality_violation, "serving more than is queued");
    if (d < p) raise(Errc::guarantee_violation, "serving less than the immediate requirement");
    const i64 h = svc.horizon();
    if (h < 2) raise(Errc::oracle_too_large, "cannot update a horizon-1 table");
    const i64 nb = q1 - d;
    TabulatedService out(nb, h - 1, svc.cap() - d);
    // Bijection: the pre-update key has first entry q1 and later entries
    // shifted up by d relative to the post-update key.
    for (const auto& [key, psi] : svc.table()) {
        if (key[1] != q1) continue;
        std::vector<i64> nkey(static_cast<std::size_t>(h), 0);
        std::vector<i64> nval(static_cast<std::size_t>(h), 0);
        for (i64 j = 1; j <= h - 1; ++j) {
            nkey[static_cast<std::size_t>(j)] = key[static_cast<std::size_t>(j) + 1] - d;
            nval[static_cast<std::size_t>(j)] =
                std::max<i64>(psi[j + 1] - d, 0);
        }
        out.table_.emplace(std::move(nkey), CumVec(std::move(nval)));
    }
    return out;
}

std::vector<std::vector<i64>> brute_feasible_set(const std::vector<TabulatedService>& flows,
                                                 const std::vector<i64>& q, i64 c) {
    const std::size_t n = flows.size();
    if (n != q.size()) raise(Errc::invalid_argument, "flow/queue count mismatch");
    if (n > 3 || c > 4) raise(Errc::oracle_too_large, "feasible-set oracle wants n <= 3, c <= 4");
    i64 h = 0;
    for (const auto& f : flows) {
        if (f.horizon() > 4) raise(Errc::oracle_too_large, "feasible-set oracle wants H <= 4");
        h = std::max(h, f.horizon());
        if (f.horizon() != flows[0].horizon())
            raise(Errc::invalid_argument, "flows must share a horizon");
    }

    std::vector<std::vector<i64>> feasible;
    std::vector<i64> d(n, 0);
    auto check = [&]() -> bool {
        i64 total = 0;
        for (std::size_t w = 0; w < n; ++w) total += d[w];
        if (total > c) return false;
        // Every flow must be updatable (d within [p, q]); then the updated
        // spectra, found by pure enumeration, must fit within capacity on
        // every interval of the shrunken horizon.
        std::vector<Grid> next;
        next.reserve(n);
        for (std::size_t w = 0; w < n; ++w) {
            if (d[w] > q[w]) return false;
            if (d[w] < brute_immediate(flows[w], q[w])) return false;
            next.push_back(brute_spectrum(brute_update(flows[w], q[w], d[w])));
        }
        for (i64 i = 0; i <= h - 1; ++i) {
            for (i64 j = i + 1; j <= h - 1; ++j) {
                i64 sum = 0;
                for (std::size_t w = 0; w < n; ++w)
                    sum += next[w][static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                if (sum > (j - i) * c) return false;
            }
        }
        return true;
    };
    auto rec = [&](auto&& self, std::size_t w) -> void {
        if (w == n) {
            if (check()) feasible.push_back(d);
            return;
        }
        for (i64 v = 0; v <= std::min(q[w], c); ++v) {
            d[w] = v;
            self(self, w + 1);
        }
    };
    rec(rec, 0);
    return feasible;
}

} // namespace wcsched::oracle
