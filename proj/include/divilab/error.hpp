#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace divilab {

/// Input outside the mathematical domain of an operation (CLI exit code 2).
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument exceeds the range covered by a precomputed table.
class OutOfRangeError : public DomainError {
public:
    using DomainError::DomainError;
};

/// A structural constraint failed; `index` names the first offending item.
class ConstraintError : public DomainError {
public:
    ConstraintError(const std::string& what, std::uint64_t index)
        : DomainError(what), index_(index) {}
    [[nodiscard]] std::uint64_t index() const noexcept { return index_; }

private:
    std::uint64_t index_;
};

/// Memory, enumeration or overflow cap exceeded (CLI exit code 3).
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

[[nodiscard]] inline std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
    std::uint64_t r;
    if (__builtin_mul_overflow(a, b, &r)) throw ResourceError("64-bit overflow in product");
    return r;
}

[[nodiscard]] inline std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
    std::uint64_t r;
    if (__builtin_add_overflow(a, b, &r)) throw ResourceError("64-bit overflow in sum");
    return r;
}

}  // namespace divilab
