#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ik4 {

/// Syntax error in a formula or tree expression, with a byte offset.
struct ParseError : std::runtime_error {
    ParseError(const std::string& what, std::size_t position)
        : std::runtime_error(what + " (at position " + std::to_string(position) + ")"),
          position(position) {}
    std::size_t position;
};

/// Malformed model or proof file, with a 1-based line number.
struct FileFormatError : std::runtime_error {
    FileFormatError(const std::string& what, std::size_t line)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line(line) {}
    std::size_t line;
};

/// A checked internal invariant failed. The engine treats these as bugs,
/// never as ordinary negative results.
struct InvariantError : std::logic_error {
    explicit InvariantError(const std::string& what) : std::logic_error(what) {}
};

/// A world oracle was asked for a witness whose precondition does not hold,
/// or failed to produce a witness it guarantees.
struct OracleContractError : InvariantError {
    explicit OracleContractError(const std::string& what) : InvariantError(what) {}
};

}  // namespace ik4
