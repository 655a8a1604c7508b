#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace funreg {

enum class ErrorKind {
    domain,
    size,
    shape,
    not_psd,
    grid,
    parse,
    parameter,
    numeric,
    degenerate,
    index,
    undefined_metric,
    divergence,
    io,
};

/// Short machine-readable name, e.g. "shape" or "parse".
std::string_view error_kind_name(ErrorKind kind) noexcept;

/**
 * Single exception type thrown by the library. The kind classifies the
 * failure so callers (and the CLI) can report it without string matching.
 */
class Error : public std::runtime_error
{
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind)
    {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message)
{
    throw Error(kind, message);
}

} // namespace funreg
