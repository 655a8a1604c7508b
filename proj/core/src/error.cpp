#include "funreg/error.hpp"

namespace funreg {

std::string_view error_kind_name(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::domain: return "domain";
    case ErrorKind::size: return "size";
    case ErrorKind::shape: return "shape";
    case ErrorKind::not_psd: return "not_psd";
    case ErrorKind::grid: return "grid";
    case ErrorKind::parse: return "parse";
    case ErrorKind::parameter: return "parameter";
    case ErrorKind::numeric: return "numeric";
    case ErrorKind::degenerate: return "degenerate";
    case ErrorKind::index: return "index";
    case ErrorKind::undefined_metric: return "undefined_metric";
    case ErrorKind::divergence: return "divergence";
    case ErrorKind::io: return "io";
    }
    return "unknown";
}

} // namespace funreg
