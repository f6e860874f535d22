#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace consult {

/// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : Error {
    ParseError(std::size_t line, std::string cause)
        : Error("parse error at line " + std::to_string(line) + ": " + cause),
          line_no(line),
          cause(std::move(cause)) {}
    std::size_t line_no;
    std::string cause;
};

struct DuplicateName : Error {
    explicit DuplicateName(const std::string& name)
        : Error("duplicate entry name: " + name), name(name) {}
    std::string name;
};

struct EmptyAfterNormalization : Error {
    explicit EmptyAfterNormalization(const std::string& id)
        : Error("record " + id + " has no patient or doctor turn after normalization"), id(id) {}
    std::string id;
};

struct MissingTemplate : Error {
    MissingTemplate(std::string kind, std::string aspect)
        : Error("no question template for " + kind + "." + aspect),
          kind(std::move(kind)),
          aspect(std::move(aspect)) {}
    std::string kind;
    std::string aspect;
};

struct JudgeUnavailable : Error {
    using Error::Error;
};

struct UnparseableScore : Error {
    using Error::Error;
};

struct UnparseableVerdict : Error {
    using Error::Error;
};

struct OutOfRange : Error {
    using Error::Error;
};

struct PreconditionViolation : Error {
    using Error::Error;
};

struct EmptyCorpus : Error {
    using Error::Error;
};

struct EmptyInput : Error {
    using Error::Error;
};

struct EmptyScores : Error {
    using Error::Error;
};

struct EmptyPairs : Error {
    using Error::Error;
};

struct InsufficientPool : Error {
    InsufficientPool(std::string department, std::size_t need, std::size_t have)
        : Error("benchmark pool too small for department " + department + ": need " +
                std::to_string(need) + ", have " + std::to_string(have)),
          department(std::move(department)),
          need(need),
          have(have) {}
    std::string department;
    std::size_t need;
    std::size_t have;
};

struct InsufficientPairs : Error {
    InsufficientPairs(std::string kind, std::size_t need, std::size_t have)
        : Error("not enough " + kind + " pairs to sample: need " + std::to_string(need) +
                ", have " + std::to_string(have)),
          kind(std::move(kind)),
          need(need),
          have(have) {}
    std::string kind;
    std::size_t need;
    std::size_t have;
};

struct SeedMismatch : Error {
    using Error::Error;
};

struct TooFewPairs : Error {
    using Error::Error;
};

struct StageMismatch : Error {
    using Error::Error;
};

struct ItemSetMismatch : Error {
    using Error::Error;
};

struct MissingResult : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace consult
