#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace quintel {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Numeric or enum input outside the documented domain (NaN probability, zero center mass, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A name that should resolve did not: unknown term, incident, source.
class LookupError : public Error {
public:
    using Error::Error;
};

/// The term exists but belongs to the other vocabulary row.
class CrossRowError : public LookupError {
public:
    using LookupError::LookupError;
};

/// A wire record or value violates a structural invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Feedback names a report that was never ingested.
class ReferenceError : public Error {
public:
    using Error::Error;
};

/// A descendant report whose parent is not threaded yet. The report is held, not dropped.
class QuarantineError : public Error {
public:
    using Error::Error;
};

/// Event log sequence gap or regression.
class CorruptLogError : public Error {
public:
    CorruptLogError(const std::string& what, std::uint64_t seq) : Error(what), seq_(seq) {}
    std::uint64_t seq() const { return seq_; }

private:
    std::uint64_t seq_;
};

/// All-zero belief vector: the odds rule annihilated every quintile.
class DegenerateEvidenceError : public Error {
public:
    using Error::Error;
};

}  // namespace quintel
