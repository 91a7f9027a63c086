#pragma once

#include <stdexcept>
#include <string>

namespace gilp {

/// Failure classes; the CLI maps each one to its own exit code.
enum class ErrorClass { config = 2, data = 3, training = 4, evaluation = 5 };

class Error : public std::runtime_error {
public:
    Error(ErrorClass cls, const std::string& what) : std::runtime_error(what), class_(cls) {}
    ErrorClass error_class() const noexcept { return class_; }

private:
    ErrorClass class_;
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error(ErrorClass::config, what) {}
};

struct DataError : Error {
    explicit DataError(const std::string& what) : Error(ErrorClass::data, what) {}
};

struct ParseError : DataError {
    ParseError(const std::string& what, int line, int column)
        : DataError(std::to_string(line) + ":" + std::to_string(column) + ": " + what), line(line), column(column) {}
    int line;
    int column;
};

struct TrainingError : Error {
    explicit TrainingError(const std::string& what) : Error(ErrorClass::training, what) {}
};

struct EvaluationError : Error {
    explicit EvaluationError(const std::string& what) : Error(ErrorClass::evaluation, what) {}
};

/// Internal invariant violation (for example a fixpoint that does not settle).
struct LogicError : Error {
    explicit LogicError(const std::string& what) : Error(ErrorClass::evaluation, what) {}
};

}  // namespace gilp
