#pragma once

#include <stdexcept>
#include <string>

namespace supmmd {

// exit-code categories: 1 usage, 2 data, 3 numerical
struct Error : std::runtime_error {
    int exit_code;
    Error(std::string msg, int code) : std::runtime_error(std::move(msg)), exit_code(code) {}
};

struct UsageError : Error {
    explicit UsageError(const std::string& m) : Error(m, 1) {}
};
struct DataError : Error {
    explicit DataError(const std::string& m) : Error(m, 2) {}
};
struct NumericError : Error {
    explicit NumericError(const std::string& m) : Error(m, 3) {}
};

struct IoError : DataError {
    explicit IoError(const std::string& m) : DataError("io: " + m) {}
};
struct SchemaError : DataError {
    long line;
    SchemaError(const std::string& m, long line_no = -1)
        : DataError(line_no >= 0 ? "schema (line " + std::to_string(line_no) + "): " + m
                                 : "schema: " + m),
          line(line_no) {}
};
struct DuplicateIdError : DataError {
    long line;
    DuplicateIdError(const std::string& id, long line_no)
        : DataError("duplicate id '" + id + "' (line " + std::to_string(line_no) + ")"), line(line_no) {}
};
struct EmptyTopicError : DataError {
    explicit EmptyTopicError(const std::string& m) : DataError("empty topic: " + m) {}
};
struct EmptyInputError : DataError {
    explicit EmptyInputError(const std::string& m) : DataError("empty input: " + m) {}
};
struct VocabMismatchError : DataError {
    explicit VocabMismatchError(const std::string& m) : DataError("vocab mismatch: " + m) {}
};
struct CoordinateError : DataError {
    explicit CoordinateError(const std::string& m) : DataError("bad coordinate: " + m) {}
};
struct MissingLexrankError : DataError {
    explicit MissingLexrankError(const std::string& m) : DataError("lexrank missing: " + m) {}
};
struct NoOracleError : DataError {
    explicit NoOracleError(const std::string& m) : DataError("no oracle: " + m) {}
};
struct FoldError : DataError {
    explicit FoldError(const std::string& m) : DataError("folds: " + m) {}
};
struct NoEligibleSentenceError : DataError {
    explicit NoEligibleSentenceError(const std::string& m) : DataError("no eligible sentence: " + m) {}
};
struct EmptyReferenceError : DataError {
    explicit EmptyReferenceError(const std::string& m) : DataError("empty references: " + m) {}
};
struct EmptySetError : DataError {
    explicit EmptySetError(const std::string& m) : DataError("empty set: " + m) {}
};
struct DimensionMismatchError : DataError {
    explicit DimensionMismatchError(const std::string& m) : DataError("dimension mismatch: " + m) {}
};
struct SpecError : DataError {
    explicit SpecError(const std::string& m) : DataError("kernel spec: " + m) {}
};
struct LabelError : DataError {
    explicit LabelError(const std::string& m) : DataError("labels: " + m) {}
};
struct NetworkError : DataError {
    explicit NetworkError(const std::string& m) : DataError("network: " + m) {}
};
struct ProtocolError : DataError {
    explicit ProtocolError(const std::string& m) : DataError("protocol: " + m) {}
};

struct LambdaError : UsageError {
    explicit LambdaError(const std::string& m) : UsageError("lambda: " + m) {}
};

struct ConvergenceError : NumericError {
    explicit ConvergenceError(const std::string& m) : NumericError("no convergence: " + m) {}
};
struct DivergenceError : NumericError {
    explicit DivergenceError(const std::string& m) : NumericError("diverged: " + m) {}
};

}  // namespace supmmd
