#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace tagnn {

// Every failure surfaced to callers carries a one-word category; the CLI
// prints them as "error: <category>: <detail>".
class Error : public std::runtime_error {
public:
    Error(std::string category, const std::string& what)
        : std::runtime_error(what), category_(std::move(category)) {}

    const std::string& category() const noexcept { return category_; }

private:
    std::string category_;
};

// Precondition violations (bad window length, empty sequence, ...).
struct ContractError : Error {
    explicit ContractError(const std::string& w) : Error("contract", w) {}
};

// Shape mismatches between array operands.
struct StructuralError : Error {
    explicit StructuralError(const std::string& w) : Error("structural", w) {}
};

// Malformed or inconsistent input files.
struct IngestionError : Error {
    explicit IngestionError(const std::string& w) : Error("ingestion", w) {}
};

// Infeasible synthetic-data specifications.
struct SpecError : Error {
    explicit SpecError(const std::string& w) : Error("spec", w) {}
};

// Divergence or non-finite values during optimization.
struct TrainingError : Error {
    explicit TrainingError(const std::string& w) : Error("training", w) {}
};

// Filesystem and serialization failures.
struct IoError : Error {
    explicit IoError(const std::string& w) : Error("io", w) {}
};

// Bad keys or values in configuration files.
struct ConfigError : Error {
    explicit ConfigError(const std::string& w) : Error("config", w) {}
};

}  // namespace tagnn
