#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace kfpls {

/// Coarse error classification surfaced by the CLI as machine-readable
/// categories (and mapped to distinct exit codes).
enum class ErrorCategory {
    config,      // invalid parameters / flag combinations
    structural,  // shape or grid mismatches between datasets
    parse,       // malformed input files
    io,          // filesystem failures
    numeric,     // rank exhaustion, singular systems, non-convergence
};

inline const char* to_string(ErrorCategory c) {
    switch (c) {
        case ErrorCategory::config: return "config";
        case ErrorCategory::structural: return "structural";
        case ErrorCategory::parse: return "parse";
        case ErrorCategory::io: return "io";
        case ErrorCategory::numeric: return "numeric";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& message)
        : std::runtime_error(message), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(ErrorCategory::config, msg) {}
};

struct StructuralError : Error {
    explicit StructuralError(const std::string& msg) : Error(ErrorCategory::structural, msg) {}
};

struct ParseError : Error {
    explicit ParseError(const std::string& msg) : Error(ErrorCategory::parse, msg) {}
};

struct IoError : Error {
    explicit IoError(const std::string& msg) : Error(ErrorCategory::io, msg) {}
};

/// Numeric failures carry a `kind` tag so callers (and the CLI) can react to
/// specific conditions without string matching on messages.
class NumericError : public Error {
public:
    NumericError(std::string kind, const std::string& msg)
        : Error(ErrorCategory::numeric, msg), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

/// Deflated Gram can no longer produce a score direction; fewer components
/// are available than requested.
struct RankExhaustionError : NumericError {
    explicit RankExhaustionError(const std::string& msg)
        : NumericError("rank_exhaustion", msg) {}
};

/// The q x q system T' Kc U is numerically singular.
struct SingularSystemError : NumericError {
    explicit SingularSystemError(const std::string& msg)
        : NumericError("singular_system", msg) {}
};

/// Centered response is (numerically) zero; no signal to regress on.
struct DegenerateResponseError : NumericError {
    explicit DegenerateResponseError(const std::string& msg)
        : NumericError("degenerate_response", msg) {}
};

/// Score iteration failed to converge; carries the last iterate for
/// diagnostics.
class NonConvergenceError : public NumericError {
public:
    NonConvergenceError(const std::string& msg, Eigen::VectorXd last_t, Eigen::VectorXd last_u)
        : NumericError("non_convergence", msg),
          last_t_(std::move(last_t)),
          last_u_(std::move(last_u)) {}

    const Eigen::VectorXd& last_t() const noexcept { return last_t_; }
    const Eigen::VectorXd& last_u() const noexcept { return last_u_; }

private:
    Eigen::VectorXd last_t_;
    Eigen::VectorXd last_u_;
};

}  // namespace kfpls
