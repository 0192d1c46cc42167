#pragma once

#include <stdexcept>
#include <string>

namespace detssl {

/// Invalid user-facing configuration: bad field value, missing file,
/// incompatible head/relaxation pairing.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Rule text that fails to tokenize or parse. Carries a 1-based source
/// position for error reporting.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, int line, int col)
        : std::runtime_error(msg + " (line " + std::to_string(line) +
                             ", col " + std::to_string(col) + ")"),
          line_(line),
          col_(col) {}

    int line() const { return line_; }
    int col() const { return col_; }

private:
    int line_;
    int col_;
};

/// An operation would exceed a hard resource cap (truth-table width,
/// DNF clause count).
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A rule set admits no valid label vector; its relaxation has no support.
class UnsatisfiableRulesError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace detssl
