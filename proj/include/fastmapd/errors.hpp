#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fmd {

/// Malformed input text (map files, TSV, CSV, JSON). Carries the 1-based line
/// number when one is known (0 otherwise).
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Raised when a computation needs finite distances but the graph is not
/// strongly connected.
class ConnectivityError : public std::runtime_error {
public:
    ConnectivityError(const std::string& what, std::size_t vertex)
        : std::runtime_error(what), vertex_(vertex) {}
    std::size_t vertex() const noexcept { return vertex_; }

private:
    std::size_t vertex_;
};

/// Degenerate numeric input (non-finite data, zero normalizer, divergence).
class NumericError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace fmd
