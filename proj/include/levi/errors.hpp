#pragma once

#include <stdexcept>
#include <string>

namespace levi {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Lexer/parser failure; carries 1-based source position.
struct ParseError : Error {
    int line;
    int column;
    ParseError(const std::string& msg, int line_, int column_)
        : Error(msg + " (line " + std::to_string(line_) + ", column " +
                std::to_string(column_) + ")"),
          line(line_),
          column(column_) {}
};

struct NotOnSurface : Error { using Error::Error; };
struct DegeneratePoint : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };
struct TooManyRejections : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };

} // namespace levi
