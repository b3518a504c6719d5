#pragma once
// Error taxonomy shared across the toolkit. Everything user-facing derives
// from Error so the CLI can map failures onto exit codes in one place.

#include <cstddef>
#include <stdexcept>
#include <string>

namespace flexqa {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// KB text format violations (wrong arity, bad literal, bad id).
struct MalformedLineError : Error {
    size_t line;
    MalformedLineError(size_t line_no, const std::string& what_part)
        : Error("malformed line " + std::to_string(line_no) + ": " + what_part),
          line(line_no) {}
};

// Program text rejected by a parser.
struct ParseError : Error {
    size_t position;
    std::string expected;
    ParseError(size_t pos, const std::string& expected_msg)
        : Error("parse error at " + std::to_string(pos) + ": expected " + expected_msg),
          position(pos), expected(expected_msg) {}
};

// Raised by execute(); consumed by the error-filtering stage.
struct ExecutionError : Error {
    explicit ExecutionError(const std::string& reason)
        : Error("execution error: " + reason) {}
};

// sexpr -> sparql conversion hit an operator without a subset encoding.
struct UnsupportedConstructError : Error {
    explicit UnsupportedConstructError(const std::string& what_part)
        : Error("unsupported construct: " + what_part) {}
};

// Remote provider failed after retries were exhausted.
struct ProviderError : Error {
    int status;
    ProviderError(int http_status, const std::string& detail)
        : Error("provider error (status " + std::to_string(http_status) + "): " + detail),
          status(http_status) {}
};

struct EmptyCompletionError : Error {
    EmptyCompletionError() : Error("provider returned an empty completion") {}
};

struct EmptyTextError : Error {
    EmptyTextError() : Error("cannot embed empty text") {}
};

struct DimMismatchError : Error {
    DimMismatchError(size_t a, size_t b)
        : Error("embedding dim mismatch: " + std::to_string(a) + " vs " + std::to_string(b)) {}
};

// Question has no linkable topic entity; callers may fall back to IR.
struct NoTopicEntityError : Error {
    explicit NoTopicEntityError(const std::string& question)
        : Error("no topic entity linked in: " + question) {}
};

struct EmptyCorpusError : Error {
    EmptyCorpusError() : Error("no template produced any grounded program") {}
};

struct NoTrainableExamplesError : Error {
    NoTrainableExamplesError() : Error("every pair failed candidate enumeration") {}
};

}  // namespace flexqa
