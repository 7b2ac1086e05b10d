#include "wcsched/feasible.hpp"

#include "wcsched/kernels.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <mutex>
#include <numeric>

namespace wcsched {

// ---------------------------------------------------------------------------
// SetFunction

struct SetFunction::Memo {
    std::vector<i64> vals;
    std::vector<std::uint8_t> known;
    std::function<i64(std::uint32_t)> eval;
    mutable std::mutex mu;
};

SetFunction SetFunction::dense(int n, std::vector<i64> values) {
    if (n < 0 || n > kMaxFlows) raise(Errc::invalid_argument, "flow count must be 0..16");
    if (values.size() != (1u << n))
        raise(Errc::invalid_argument, "dense set function needs 2^n values");
    SetFunction f;
    f.n_ = n;
    f.memo_ = std::make_shared<Memo>();
    f.memo_->vals = std::move(values);
    f.memo_->known.assign(f.memo_->vals.size(), 1);
    return f;
}

SetFunction SetFunction::lazy(int n, std::function<i64(std::uint32_t)> eval) {
    if (n < 0 || n > kMaxFlows) raise(Errc::invalid_argument, "flow count must be 0..16");
    SetFunction f;
    f.n_ = n;
    f.memo_ = std::make_shared<Memo>();
    f.memo_->vals.assign(1u << n, 0);
    f.memo_->known.assign(1u << n, 0);
    f.memo_->eval = std::move(eval);
    return f;
}

i64 SetFunction::operator()(std::uint32_t mask) const {
    if (mask > full_mask()) raise(Errc::invalid_argument, "subset mask out of range");
    Memo& m = *memo_;
    if (m.known[mask]) return m.vals[mask];
    std::scoped_lock lock(m.mu);
    if (!m.known[mask]) {
        m.vals[mask] = m.eval(mask);
        m.known[mask] = 1;
    }
    return m.vals[mask];
}

bool SetFunction::is_supermodular() const {
    const auto& f = *this;
    if (f(0) != 0) return false;
    const std::uint32_t full = full_mask();
    for (std::uint32_t a = 0; a <= full; ++a)
        for (std::uint32_t b = a + 1; b <= full; ++b)
            if (f(a) + f(b) > f(a | b) + f(a & b)) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Rational

Rational Rational::of(i64 num, i64 den) {
    if (den == 0) raise(Errc::invalid_argument, "rational with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    i64 g = std::gcd(num < 0 ? -num : num, den);
    if (g == 0) g = 1;
    return Rational{num / g, den / g};
}

namespace {

Rational rat_add(const Rational& a, const Rational& b) {
    return Rational::of(a.num * b.den + b.num * a.den, a.den * b.den);
}

Rational rat_div(const Rational& a, const Rational& b) {
    if (b.num == 0) raise(Errc::invalid_argument, "rational division by zero");
    return Rational::of(a.num * b.den, a.den * b.num);
}

} // namespace

// ---------------------------------------------------------------------------
// Schedulability

SchedResult is_schedulable(const std::vector<SpectrumFn>& spectra, i64 capacity, i64 horizon) {
    for (i64 i = 0; i < horizon; ++i) {
        for (i64 j = i + 1; j <= horizon; ++j) {
            i64 sum = 0;
            for (const auto& lam : spectra) sum += lam(i, j);
            if (sum > (j - i) * capacity) return SchedResult{false, i, j};
        }
    }
    return SchedResult{};
}

SchedResult is_schedulable_dual(const std::vector<DualFlowSpec>& flows, i64 capacity) {
    if (flows.empty()) return SchedResult{};
    const i64 h = flows[0].u.horizon();
    const std::size_t w = static_cast<std::size_t>(h) + 1;
    for (const auto& f : flows) {
        require_same_horizon(f.u, flows[0].u, "is_schedulable_dual");
        require_same_horizon(f.v, f.u, "is_schedulable_dual");
    }

    // Row 0: the dynamic curves must fit within the capacity line.
    std::vector<i64> usum(w, 0);
    for (const auto& f : flows) kern::add_vec(usum.data(), f.u.entries().data(), w);
    bool bad = kern::max_affine_gap(usum.data(), capacity, w) > 0;

    // Rows above 0: for each gap g the worst interval ends at the horizon,
    // where the dynamic curve has saturated.
    std::vector<i64> gsum(w, 0), tmp(w);
    for (const auto& f : flows) {
        const i64 clip = std::max<i64>(f.u[h] - f.b, 0);
        kern::min_scalar(tmp.data(), f.v.entries().data(), clip, w);
        kern::add_vec(gsum.data(), tmp.data(), w);
    }
    if (!bad && h >= 2)
        bad = kern::max_affine_gap(gsum.data(), capacity, w - 1) > 0;
    if (!bad) return SchedResult{};

    // Slow rescan to report the lexicographically first violating interval.
    auto lam = [&](const DualFlowSpec& f, i64 i, i64 j) -> i64 {
        if (i >= j) return 0;
        if (i == 0) return f.u[j];
        return std::min(std::max<i64>(f.u[j] - f.b, 0), f.v[j - i]);
    };
    for (i64 i = 0; i < h; ++i)
        for (i64 j = i + 1; j <= h; ++j) {
            i64 sum = 0;
            for (const auto& f : flows) sum += lam(f, i, j);
            if (sum > (j - i) * capacity) return SchedResult{false, i, j};
        }
    return SchedResult{}; // unreachable for consistent inputs
}

// ---------------------------------------------------------------------------
// Baseline and the fixed-total slice

namespace {

struct BaselineData {
    // Per flow, over j = 0..H-1: owed[j] = row0[j+1], tail[j] = (row0[j+1]-q)^+.
    std::vector<std::vector<i64>> owed_minus_tail;
    std::vector<i64> tail_total;
    i64 capacity = 0;
    i64 len = 0;
};

i64 eval_baseline(const BaselineData& d, std::uint32_t mask) {
    std::vector<i64> w(d.tail_total);
    for (std::uint32_t m = mask; m != 0; m &= m - 1) {
        int idx = std::countr_zero(m);
        kern::add_vec(w.data(), d.owed_minus_tail[static_cast<std::size_t>(idx)].data(),
                      static_cast<std::size_t>(d.len));
    }
    return kern::max_affine_gap(w.data(), d.capacity, static_cast<std::size_t>(d.len));
}

} // namespace

SetFunction baseline(const SystemView& view) {
    const int n = view.flow_count();
    if (n > kMaxFlows) raise(Errc::invalid_argument, "at most 16 flows");
    const i64 h = view.horizon;
    auto data = std::make_shared<BaselineData>();
    data->capacity = view.capacity;
    data->len = h;
    data->tail_total.assign(static_cast<std::size_t>(h), 0);
    data->owed_minus_tail.resize(static_cast<std::size_t>(n));
    for (int wi = 0; wi < n; ++wi) {
        const FlowView& f = view.flows[static_cast<std::size_t>(wi)];
        if (f.cond_row0.horizon() != h)
            raise(Errc::invalid_argument, "flow view horizon mismatch");
        auto& diff = data->owed_minus_tail[static_cast<std::size_t>(wi)];
        diff.resize(static_cast<std::size_t>(h));
        for (i64 j = 0; j < h; ++j) {
            const i64 owed = f.cond_row0[j + 1];
            const i64 tail = std::max<i64>(owed - f.queue, 0);
            diff[static_cast<std::size_t>(j)] = owed - tail;
            data->tail_total[static_cast<std::size_t>(j)] += tail;
        }
    }
    if (n > 0 && eval_baseline(*data, 0) > 0)
        raise(Errc::not_schedulable, "reserved tail service already exceeds capacity");

    auto eval = [data](std::uint32_t mask) { return eval_baseline(*data, mask); };
    if (n <= kDenseSetFnLimit) {
        std::vector<i64> vals(1u << n);
        for (std::uint32_t mask = 0; mask < vals.size(); ++mask) vals[mask] = eval(mask);
        return SetFunction::dense(n, std::move(vals));
    }
    return SetFunction::lazy(n, eval);
}

namespace {

i64 queue_sum(const SystemView& view, std::uint32_t mask) {
    i64 s = 0;
    for (std::uint32_t m = mask; m != 0; m &= m - 1)
        s += view.flows[static_cast<std::size_t>(std::countr_zero(m))].queue;
    return s;
}

} // namespace

std::pair<i64, i64> feasible_mu_range(const SetFunction& beta, const SystemView& view) {
    const i64 lo = beta(beta.full_mask());
    const i64 hi = std::min(view.capacity, queue_sum(view, beta.full_mask()));
    return {lo, hi};
}

SetFunction beta_mu(const SetFunction& beta, const SystemView& view, i64 mu) {
    auto [lo, hi] = feasible_mu_range(beta, view);
    if (mu < lo || mu > hi)
        raise(Errc::infeasible_total, "total " + std::to_string(mu) + " outside [" +
                                          std::to_string(lo) + ", " + std::to_string(hi) + "]");
    const int n = beta.flow_count();
    const std::uint32_t full = beta.full_mask();
    const i64 total_q = queue_sum(view, full);
    std::vector<i64> qs(static_cast<std::size_t>(n));
    for (int wi = 0; wi < n; ++wi) qs[static_cast<std::size_t>(wi)] =
        view.flows[static_cast<std::size_t>(wi)].queue;
    auto eval = [beta, qs, total_q, mu](std::uint32_t mask) {
        i64 inside = 0;
        for (std::uint32_t m = mask; m != 0; m &= m - 1)
            inside += qs[static_cast<std::size_t>(std::countr_zero(m))];
        return std::max(beta(mask), mu - (total_q - inside));
    };
    if (n <= kDenseSetFnLimit) {
        std::vector<i64> vals(1u << n);
        for (std::uint32_t mask = 0; mask < vals.size(); ++mask) vals[mask] = eval(mask);
        return SetFunction::dense(n, std::move(vals));
    }
    return SetFunction::lazy(n, eval);
}

// ---------------------------------------------------------------------------
// Vertices, centroid, membership

std::vector<i64> vertex(const SetFunction& f, const std::vector<int>& rank) {
    const int n = f.flow_count();
    if (static_cast<int>(rank.size()) != n)
        raise(Errc::invalid_argument, "rank vector must cover every flow");
    std::vector<std::uint32_t> prefix(static_cast<std::size_t>(n) + 1, 0);
    for (int wi = 0; wi < n; ++wi) {
        const int r = rank[static_cast<std::size_t>(wi)];
        if (r < 1 || r > n) raise(Errc::invalid_argument, "rank entries must be 1..n");
        prefix[static_cast<std::size_t>(r)] |= 1u << wi;
    }
    for (int r = 1; r <= n; ++r) {
        if (std::popcount(prefix[static_cast<std::size_t>(r)]) != 1)
            raise(Errc::invalid_argument, "rank must be a permutation of 1..n");
        prefix[static_cast<std::size_t>(r)] |= prefix[static_cast<std::size_t>(r) - 1];
    }
    std::vector<i64> v(static_cast<std::size_t>(n));
    for (int wi = 0; wi < n; ++wi) {
        const int r = rank[static_cast<std::size_t>(wi)];
        v[static_cast<std::size_t>(wi)] =
            f(prefix[static_cast<std::size_t>(r)]) - f(prefix[static_cast<std::size_t>(r) - 1]);
    }
    return v;
}

namespace {

bool member_common(const SetFunction& f, const std::vector<i64>& queue, i64 capacity,
                   const std::vector<i64>& d) {
    const int n = f.flow_count();
    if (static_cast<int>(d.size()) != n || static_cast<int>(queue.size()) != n) return false;
    i64 total = 0;
    for (int wi = 0; wi < n; ++wi) {
        if (d[static_cast<std::size_t>(wi)] < 0 ||
            d[static_cast<std::size_t>(wi)] > queue[static_cast<std::size_t>(wi)])
            return false;
        total += d[static_cast<std::size_t>(wi)];
    }
    if (total > capacity) return false;
    for (std::uint32_t mask = 1; mask <= f.full_mask(); ++mask) {
        i64 s = 0;
        for (std::uint32_t m = mask; m != 0; m &= m - 1)
            s += d[static_cast<std::size_t>(std::countr_zero(m))];
        if (s < f(mask)) return false;
    }
    return true;
}

} // namespace

bool contains(const SetFunction& beta, const std::vector<i64>& queue, i64 capacity,
              const std::vector<i64>& d) {
    return member_common(beta, queue, capacity, d);
}

bool contains_slice(const SetFunction& bmu, const std::vector<i64>& queue, i64 capacity,
                    i64 mu, const std::vector<i64>& d) {
    i64 total = 0;
    for (i64 x : d) total += x;
    if (total != mu) return false;
    return member_common(bmu, queue, capacity, d);
}

bool feasible_fast(const SystemView& view, const std::vector<i64>& d) {
    const int n = view.flow_count();
    if (static_cast<int>(d.size()) != n) return false;
    const i64 h = view.horizon;
    i64 total = 0;
    for (int wi = 0; wi < n; ++wi) {
        if (d[static_cast<std::size_t>(wi)] < 0 ||
            d[static_cast<std::size_t>(wi)] > view.flows[static_cast<std::size_t>(wi)].queue)
            return false;
        total += d[static_cast<std::size_t>(wi)];
    }
    if (total > view.capacity) return false;
    if (n == 0) return true;
    // Next-slot row-0 reservations: sum of (row0[j+1] - d)^+ must fit in j*c.
    std::vector<i64> w(static_cast<std::size_t>(h), 0), tmp(static_cast<std::size_t>(h));
    for (int wi = 0; wi < n; ++wi) {
        const auto row = view.flows[static_cast<std::size_t>(wi)].cond_row0.entries();
        kern::sub_clip(tmp.data(), row.data() + 1, d[static_cast<std::size_t>(wi)],
                       static_cast<std::size_t>(h));
        kern::add_vec(w.data(), tmp.data(), static_cast<std::size_t>(h));
    }
    return kern::max_affine_gap(w.data(), view.capacity, static_cast<std::size_t>(h)) <= 0;
}

namespace {

/// Membership in the bare permutohedron: fixed total plus every subset
/// inequality (queue and capacity bounds are implied for genuine slices).
bool in_permutohedron(const SetFunction& f, const std::vector<i64>& d) {
    i64 total = 0;
    for (i64 x : d) total += x;
    if (total != f(f.full_mask())) return false;
    for (std::uint32_t mask = 1; mask < f.full_mask(); ++mask) {
        i64 s = 0;
        for (std::uint32_t m = mask; m != 0; m &= m - 1)
            s += d[static_cast<std::size_t>(std::countr_zero(m))];
        if (s < f(mask)) return false;
    }
    return true;
}

/// Unit exchange d + e_gain - e_lose stays inside iff no subset holding the
/// loser but not the gainer is tight.
bool exchange_ok(const SetFunction& f, const std::vector<i64>& d, int gain, int lose) {
    const std::uint32_t full = f.full_mask();
    for (std::uint32_t mask = 1; mask <= full; ++mask) {
        if (!(mask & (1u << lose)) || (mask & (1u << gain))) continue;
        i64 s = 0;
        for (std::uint32_t m = mask; m != 0; m &= m - 1)
            s += d[static_cast<std::size_t>(std::countr_zero(m))];
        if (s - 1 < f(mask)) return false;
    }
    return true;
}

} // namespace

Centroid shapley_centroid(const SetFunction& f) {
    const int n = f.flow_count();
    if (n == 0) return Centroid{};
    std::vector<i64> fact(static_cast<std::size_t>(n) + 1, 1);
    for (int k = 1; k <= n; ++k)
        fact[static_cast<std::size_t>(k)] = fact[static_cast<std::size_t>(k) - 1] * k;
    const i64 den = fact[static_cast<std::size_t>(n)];

    // Exact centroid by the marginal-contribution sum; no n! enumeration.
    std::vector<__int128> acc(static_cast<std::size_t>(n), 0);
    const std::uint32_t full = f.full_mask();
    for (std::uint32_t mask = 0; mask < full; ++mask) {
        const int sz = std::popcount(mask);
        const i64 weight = fact[static_cast<std::size_t>(sz)] *
                           fact[static_cast<std::size_t>(n - 1 - sz)];
        const i64 base = f(mask);
        for (int wi = 0; wi < n; ++wi) {
            if (mask & (1u << wi)) continue;
            acc[static_cast<std::size_t>(wi)] +=
                static_cast<__int128>(weight) * (f(mask | (1u << wi)) - base);
        }
    }

    Centroid out;
    out.exact.reserve(static_cast<std::size_t>(n));
    std::vector<i64> nums(static_cast<std::size_t>(n));
    std::vector<i64> floors(static_cast<std::size_t>(n));
    std::vector<i64> rems(static_cast<std::size_t>(n));
    i64 floor_sum = 0;
    for (int wi = 0; wi < n; ++wi) {
        const i64 num = static_cast<i64>(acc[static_cast<std::size_t>(wi)]);
        nums[static_cast<std::size_t>(wi)] = num;
        out.exact.push_back(Rational::of(num, den));
        floors[static_cast<std::size_t>(wi)] = num / den;
        rems[static_cast<std::size_t>(wi)] = num % den;
        floor_sum += num / den;
    }
    const i64 mu = f(full);
    i64 leftover = mu - floor_sum;
    // Largest remainder first, ties to the lower flow index.
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return rems[static_cast<std::size_t>(a)] > rems[static_cast<std::size_t>(b)];
    });
    out.rounded = floors;
    for (int k = 0; k < n && leftover > 0; ++k, --leftover)
        ++out.rounded[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])];
    if (in_permutohedron(f, out.rounded)) return out;

    // Repair path: walk from a vertex toward the centroid by unit exchanges
    // that stay inside; each accepted move strictly shrinks the squared
    // distance, so the walk terminates.
    std::vector<int> rank(static_cast<std::size_t>(n));
    std::iota(rank.begin(), rank.end(), 1);
    std::vector<i64> d = vertex(f, rank);
    auto dist2 = [&](const std::vector<i64>& x) {
        __int128 s = 0;
        for (int wi = 0; wi < n; ++wi) {
            __int128 diff = static_cast<__int128>(x[static_cast<std::size_t>(wi)]) * den -
                            nums[static_cast<std::size_t>(wi)];
            s += diff * diff;
        }
        return s;
    };
    __int128 cur = dist2(d);
    for (bool improved = true; improved;) {
        improved = false;
        int best_gain = -1, best_lose = -1;
        __int128 best = cur;
        for (int g = 0; g < n; ++g) {
            for (int l = 0; l < n; ++l) {
                if (g == l || d[static_cast<std::size_t>(l)] == 0) continue;
                ++d[static_cast<std::size_t>(g)];
                --d[static_cast<std::size_t>(l)];
                const __int128 cand = dist2(d);
                --d[static_cast<std::size_t>(g)];
                ++d[static_cast<std::size_t>(l)];
                if (cand < best && exchange_ok(f, d, g, l)) {
                    best = cand;
                    best_gain = g;
                    best_lose = l;
                }
            }
        }
        if (best_gain >= 0) {
            ++d[static_cast<std::size_t>(best_gain)];
            --d[static_cast<std::size_t>(best_lose)];
            cur = best;
            improved = true;
        }
    }
    out.rounded = std::move(d);
    if (!in_permutohedron(f, out.rounded))
        raise(Errc::internal_policy_error, "centroid rounding left the permutohedron");
    return out;
}

// ---------------------------------------------------------------------------
// Per-class sampling and multiplexing gains

SetFunction per_class_beta(const SetFunction& bmu, const std::vector<std::uint32_t>& classes,
                           int flow_count) {
    const int k = static_cast<int>(classes.size());
    if (k > kMaxFlows) raise(Errc::invalid_argument, "at most 16 classes");
    std::uint32_t seen = 0;
    for (std::uint32_t cls : classes) {
        if (cls == 0 || (seen & cls) != 0)
            raise(Errc::invalid_argument, "classes must be nonempty and disjoint");
        seen |= cls;
    }
    const std::uint32_t full =
        flow_count == 32 ? ~0u : ((1u << flow_count) - 1u);
    if (seen != full) raise(Errc::invalid_argument, "classes must cover every flow");
    auto eval = [bmu, classes](std::uint32_t class_mask) {
        std::uint32_t flows = 0;
        for (std::uint32_t m = class_mask; m != 0; m &= m - 1)
            flows |= classes[static_cast<std::size_t>(std::countr_zero(m))];
        return bmu(flows);
    };
    if (k <= kDenseSetFnLimit) {
        std::vector<i64> vals(1u << k);
        for (std::uint32_t mask = 0; mask < vals.size(); ++mask) vals[mask] = eval(mask);
        return SetFunction::dense(k, std::move(vals));
    }
    return SetFunction::lazy(k, eval);
}

namespace {

Rational rho_of(const std::vector<SpectrumFn>& spectra, i64 horizon, std::uint32_t mask) {
    Rational best{0, 1};
    for (i64 i = 0; i < horizon; ++i)
        for (i64 j = i + 1; j <= horizon; ++j) {
            i64 sum = 0;
            for (std::uint32_t m = mask; m != 0; m &= m - 1)
                sum += spectra[static_cast<std::size_t>(std::countr_zero(m))](i, j);
            // Compare sum/(j-i) > best without leaving integers.
            if (static_cast<__int128>(sum) * best.den >
                static_cast<__int128>(best.num) * (j - i))
                best = Rational::of(sum, j - i);
        }
    return best;
}

} // namespace

GainReport multiplexing_gain(const std::vector<SpectrumFn>& spectra, i64 horizon,
                             std::optional<std::vector<std::uint32_t>> partition,
                             bool full_table) {
    const int n = static_cast<int>(spectra.size());
    if (n > kMaxFlows) raise(Errc::invalid_argument, "at most 16 flows");
    GainReport out;
    const std::uint32_t full = (n == 0) ? 0u : ((1u << n) - 1u);

    Rational singles{0, 1};
    std::vector<Rational> per_flow;
    for (int wi = 0; wi < n; ++wi) {
        Rational r = rho_of(spectra, horizon, 1u << wi);
        per_flow.push_back(r);
        singles = rat_add(singles, r);
        out.rho.emplace_back(1u << wi, r);
    }
    Rational whole = rho_of(spectra, horizon, full);
    if (n > 1) out.rho.emplace_back(full, whole);
    if (full_table && n <= kDenseSetFnLimit) {
        out.rho.clear();
        for (std::uint32_t mask = 1; mask <= full; ++mask)
            out.rho.emplace_back(mask, rho_of(spectra, horizon, mask));
    }
    out.eta = whole.num == 0 ? Rational{1, 1} : rat_div(singles, whole);

    if (partition) {
        Rational denom{0, 1};
        for (std::uint32_t cls : *partition)
            denom = rat_add(denom, rho_of(spectra, horizon, cls));
        out.eta_partition = denom.num == 0 ? Rational{1, 1} : rat_div(singles, denom);
    }
    return out;
}

} // namespace wcsched
