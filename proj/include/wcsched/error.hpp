#pragma once

#include <stdexcept>
#include <string>

namespace wcsched {

enum class Errc {
    invalid_horizon,
    invalid_argument,
    guarantee_violation,
    causality_violation,
    oracle_too_large,
    not_schedulable,
    infeasible_total,
    no_max_slack_schedule,
    no_schedule,
    unsupported_service_kind,
    invalid_base,
    infeasible_design,
    internal_policy_error,
    parse_error,
};

const char* errc_name(Errc code) noexcept;

/// Library error carrying a stable machine-readable code plus a human message.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& msg)
        : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& msg) { throw Error(code, msg); }

} // namespace wcsched
