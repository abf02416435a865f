#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace skylink {

enum class ErrorKind {
    domain,
    no_visibility,
    insufficient_samples,
    empty_sift,
    inconsistent_statistics,
    reconciliation_failure,
    length_mismatch,
    short_key,
    key_reuse,
    insufficient_key,
    quadrature,
    division_by_zero,
    parse,
    validation,
    unit,
    io,
};

inline std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::domain: return "domain error";
    case ErrorKind::no_visibility: return "no visibility";
    case ErrorKind::insufficient_samples: return "insufficient samples";
    case ErrorKind::empty_sift: return "empty sift";
    case ErrorKind::inconsistent_statistics: return "inconsistent statistics";
    case ErrorKind::reconciliation_failure: return "reconciliation failure";
    case ErrorKind::length_mismatch: return "length mismatch";
    case ErrorKind::short_key: return "short key";
    case ErrorKind::key_reuse: return "key reuse";
    case ErrorKind::insufficient_key: return "insufficient key";
    case ErrorKind::quadrature: return "quadrature non-convergence";
    case ErrorKind::division_by_zero: return "division by zero";
    case ErrorKind::parse: return "parse error";
    case ErrorKind::validation: return "validation error";
    case ErrorKind::unit: return "unit error";
    case ErrorKind::io: return "i/o error";
    }
    return "error";
}

/// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline void require(bool condition, ErrorKind kind, const std::string& what) {
    if (!condition) throw Error(kind, what);
}

} // namespace skylink
