#include "wcsched/cumvec.hpp"

#include "wcsched/kernels.hpp"

#include <algorithm>

namespace wcsched {

namespace {

void validate_entries(const std::vector<i64>& e) {
    if (e.size() < 2) raise(Errc::invalid_horizon, "cumulative vector needs horizon >= 1");
    if (e[0] != 0)
        raise(Errc::invalid_argument, "cumulative vector must start at 0, entry 0 is " +
                                          std::to_string(e[0]));
    for (std::size_t j = 1; j < e.size(); ++j) {
        if (e[j] < e[j - 1])
            raise(Errc::invalid_argument,
                  "cumulative vector decreases at index " + std::to_string(j));
    }
}

} // namespace

CumVec::CumVec(std::vector<i64> entries) : e_(std::move(entries)) { validate_entries(e_); }

CumVec CumVec::zeros(i64 horizon) {
    if (horizon < 1) raise(Errc::invalid_horizon, "horizon must be >= 1");
    return CumVec(std::vector<i64>(static_cast<std::size_t>(horizon) + 1, 0));
}

CumVec CumVec::delta(i64 horizon) { return scaled_delta(1, horizon); }

CumVec CumVec::scaled_delta(i64 value, i64 horizon) { return step(value, 0, horizon); }

CumVec CumVec::step(i64 count, i64 at, i64 horizon) {
    if (horizon < 1) raise(Errc::invalid_horizon, "horizon must be >= 1");
    if (count < 0 || at < 0) raise(Errc::invalid_argument, "step wants count >= 0, at >= 0");
    std::vector<i64> e(static_cast<std::size_t>(horizon) + 1, 0);
    for (i64 j = at + 1; j <= horizon; ++j) e[static_cast<std::size_t>(j)] = count;
    return CumVec(std::move(e));
}

CumVec CumVec::constant_rate(i64 rate, i64 horizon) {
    if (horizon < 1) raise(Errc::invalid_horizon, "horizon must be >= 1");
    if (rate < 0) raise(Errc::invalid_argument, "rate must be >= 0");
    std::vector<i64> e(static_cast<std::size_t>(horizon) + 1, 0);
    for (i64 j = 1; j <= horizon; ++j) e[static_cast<std::size_t>(j)] = rate * j;
    return CumVec(std::move(e));
}

CumVec CumVec::piecewise(i64 offset, std::span<const std::pair<i64, i64>> segments,
                         i64 horizon) {
    if (horizon < 1) raise(Errc::invalid_horizon, "horizon must be >= 1");
    if (offset < 0) raise(Errc::invalid_argument, "piecewise offset must be >= 0");
    std::vector<i64> e(static_cast<std::size_t>(horizon) + 1, 0);
    i64 value = offset;
    i64 j = 1;
    i64 rate = 0;
    for (const auto& [len, r] : segments) {
        if (len < 0 || r < 0) raise(Errc::invalid_argument, "piecewise segments must be >= 0");
        rate = r;
        for (i64 k = 0; k < len && j <= horizon; ++k, ++j) {
            e[static_cast<std::size_t>(j)] = value;
            value += rate;
        }
    }
    for (; j <= horizon; ++j) {
        e[static_cast<std::size_t>(j)] = value;
        value += rate;
    }
    return CumVec(std::move(e));
}

i64 CumVec::slot_of(i64 h) const {
    if (h < 1) raise(Errc::invalid_argument, "slot_of wants a task ordinal >= 1");
    if (tail() < h) return kBeyondHorizon;
    // First j with entries[j] >= h; the unit is counted in the preceding slot.
    auto it = std::lower_bound(e_.begin(), e_.end(), h);
    return static_cast<i64>(it - e_.begin()) - 1;
}

CumVec CumVec::shift_right(i64 k) const {
    if (k < 0) raise(Errc::invalid_argument, "shift_right wants k >= 0");
    const std::size_t n = e_.size();
    std::vector<i64> out(n, 0);
    for (std::size_t j = static_cast<std::size_t>(std::min<i64>(k, horizon() + 1)); j < n; ++j)
        out[j] = e_[j - static_cast<std::size_t>(k)];
    return CumVec(std::move(out));
}

CumVec CumVec::shift_left_clip(i64 sub) const {
    const std::size_t n = e_.size();
    std::vector<i64> out(n);
    kern::sub_clip(out.data(), e_.data() + 1, sub, n - 1);
    out[n - 1] = out[n - 2]; // saturating tail
    out[0] = 0;              // clamp; nonzero only under a missed guarantee
    return CumVec(std::move(out));
}

CumVec CumVec::pointwise_min(const CumVec& other) const {
    require_same_horizon(*this, other, "pointwise_min");
    std::vector<i64> out = e_;
    kern::min_vec(out.data(), other.e_.data(), out.size());
    return CumVec(std::move(out));
}

CumVec CumVec::pointwise_min(i64 bound) const {
    if (bound < 0) raise(Errc::invalid_argument, "pointwise_min bound must be >= 0");
    std::vector<i64> out(e_.size());
    kern::min_scalar(out.data(), e_.data(), bound, out.size());
    return CumVec(std::move(out));
}

CumVec CumVec::pointwise_add(const CumVec& other) const {
    require_same_horizon(*this, other, "pointwise_add");
    std::vector<i64> out = e_;
    kern::add_vec(out.data(), other.e_.data(), out.size());
    return CumVec(std::move(out));
}

CumVec CumVec::clip_sub(i64 sub) const {
    std::vector<i64> out(e_.size());
    kern::sub_clip(out.data(), e_.data(), sub, out.size());
    return CumVec(std::move(out));
}

CumVec minplus_conv(const CumVec& x, const CumVec& y) {
    require_same_horizon(x, y, "minplus_conv");
    const auto xe = x.entries();
    const auto ye = y.entries();
    const std::size_t n = xe.size();
    std::vector<i64> out(ye.begin(), ye.end()); // i = 0 term: x[0] + y[j] = y[j]
    for (std::size_t i = 1; i < n; ++i) {
        // out[j] = min(out[j], y[j - i] + x[i]) for j in [i, n)
        kern::min_add(out.data() + i, ye.data(), xe[i], n - i);
    }
    return CumVec(std::move(out));
}

CumVec sum_vecs(std::span<const CumVec> xs) {
    if (xs.empty()) raise(Errc::invalid_argument, "sum_vecs of an empty family");
    std::vector<i64> out(xs[0].entries().begin(), xs[0].entries().end());
    for (std::size_t k = 1; k < xs.size(); ++k) {
        require_same_horizon(xs[0], xs[k], "sum_vecs");
        kern::add_vec(out.data(), xs[k].entries().data(), out.size());
    }
    return CumVec(std::move(out));
}

void require_same_horizon(const CumVec& x, const CumVec& y, const char* what) {
    if (x.horizon() != y.horizon())
        raise(Errc::invalid_argument, std::string(what) + ": horizon mismatch (" +
                                          std::to_string(x.horizon()) + " vs " +
                                          std::to_string(y.horizon()) + ")");
}

} // namespace wcsched
