#pragma once

#include <compare>
#include <cstdint>
#include <string>

#include "error.hpp"

namespace divilab {

/// A natural number or the tagged value +infinity (used for P^-(1) and for
/// d_1(n, A) when n is not a multiple of any generator).
class ExtNat {
public:
    constexpr ExtNat(std::uint64_t v) noexcept : value_(v), infinite_(false) {}  // NOLINT
    [[nodiscard]] static constexpr ExtNat infinity() noexcept { return ExtNat(); }

    [[nodiscard]] constexpr bool is_infinite() const noexcept { return infinite_; }
    [[nodiscard]] std::uint64_t value() const {
        if (infinite_) throw DomainError("value() on infinite ExtNat");
        return value_;
    }

    friend constexpr bool operator==(const ExtNat& a, const ExtNat& b) noexcept {
        return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
    }
    friend constexpr std::strong_ordering operator<=>(const ExtNat& a, const ExtNat& b) noexcept {
        if (a.infinite_ || b.infinite_) return a.infinite_ <=> b.infinite_;
        return a.value_ <=> b.value_;
    }

    [[nodiscard]] std::string to_string() const { return infinite_ ? "inf" : std::to_string(value_); }

private:
    constexpr ExtNat() noexcept : value_(0), infinite_(true) {}
    std::uint64_t value_;
    bool infinite_;
};

}  // namespace divilab
