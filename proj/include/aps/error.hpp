#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace aps {

/// Error raised by every engine operation. `code()` is drawn from the closed
/// set below and is what the CLI prints and the HTTP layer returns.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

namespace errc {
inline constexpr std::string_view malformed_row = "malformed_row";
inline constexpr std::string_view unknown_metric = "unknown_metric";
inline constexpr std::string_view value_out_of_range = "value_out_of_range";
inline constexpr std::string_view duplicate_key = "duplicate_key";
inline constexpr std::string_view no_records_for_spec = "no_records_for_spec";
inline constexpr std::string_view empty_dataset = "empty_dataset";
inline constexpr std::string_view too_few_datasets = "too_few_datasets";
inline constexpr std::string_view too_few_algorithms = "too_few_algorithms";
inline constexpr std::string_view degenerate_variance = "degenerate_variance";
inline constexpr std::string_view invalid_m = "invalid_m";
inline constexpr std::string_view unknown_algorithm = "unknown_algorithm";
inline constexpr std::string_view unknown_dataset = "unknown_dataset";
inline constexpr std::string_view name_exists = "name_exists";
inline constexpr std::string_view not_found = "not_found";
inline constexpr std::string_view invalid_argument = "invalid_argument";
inline constexpr std::string_view registry_corrupt = "registry_corrupt";
inline constexpr std::string_view bind_failure = "bind_failure";
inline constexpr std::string_view io_error = "io_error";
} // namespace errc

[[noreturn]] inline void fail(std::string_view code, const std::string& message) {
    throw Error(std::string(code), message);
}

/// HTTP status used by the service for a given error code.
inline int http_status_for(std::string_view code) {
    if (code == errc::too_few_datasets || code == errc::too_few_algorithms ||
        code == errc::degenerate_variance || code == errc::no_records_for_spec ||
        code == errc::empty_dataset || code == errc::invalid_m)
        return 422;
    if (code == errc::unknown_algorithm || code == errc::unknown_dataset || code == errc::not_found)
        return 404;
    if (code == errc::name_exists || code == errc::duplicate_key)
        return 409;
    if (code == errc::registry_corrupt || code == errc::io_error || code == errc::bind_failure)
        return 500;
    return 400;
}

} // namespace aps
