#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "error.hpp"

namespace divilab {

/// Largest sieve limit accepted unless the caller raises it (about 2 GB of table).
inline constexpr std::uint64_t kDefaultSieveCap = 500'000'000ULL;

/// Smallest-prime-factor table for 2..limit. Immutable after construction,
/// so concurrent readers need no synchronisation.
class SpfSieve {
public:
    SpfSieve() = default;

    explicit SpfSieve(std::uint64_t limit, std::uint64_t cap = kDefaultSieveCap) : limit_(limit) {
        if (limit < 2) throw DomainError("sieve limit must be >= 2");
        if (limit > cap) {
            throw ResourceError("sieve limit " + std::to_string(limit) + " exceeds cap " +
                                std::to_string(cap));
        }
        if (limit >= (1ULL << 32)) throw ResourceError("sieve limit must be below 2^32");
        spf_.assign(limit + 1, 0);
        const auto root = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(limit)));
        for (std::uint64_t i = 2; i <= limit; ++i) {
            if (spf_[i] != 0) continue;
            spf_[i] = static_cast<std::uint32_t>(i);
            if (i > root) continue;
            for (std::uint64_t j = i * i; j <= limit; j += i) {
                if (spf_[j] == 0) spf_[j] = static_cast<std::uint32_t>(i);
            }
        }
    }

    [[nodiscard]] std::uint64_t limit() const noexcept { return limit_; }
    [[nodiscard]] bool empty() const noexcept { return spf_.empty(); }

    /// Smallest prime factor of n, 2 <= n <= limit.
    [[nodiscard]] std::uint64_t spf(std::uint64_t n) const {
        if (n < 2 || n > limit_) {
            throw OutOfRangeError("spf(" + std::to_string(n) + ") outside [2, " + std::to_string(limit_) + "]");
        }
        return spf_[n];
    }
    [[nodiscard]] std::uint64_t spf_unchecked(std::uint64_t n) const noexcept { return spf_[n]; }

    [[nodiscard]] bool is_prime(std::uint64_t n) const { return n >= 2 && spf(n) == n; }

    /// Largest prime factor, with P+(1) = 1.
    [[nodiscard]] std::uint64_t largest_prime_factor(std::uint64_t n) const {
        if (n == 1) return 1;
        std::uint64_t p = 1;
        while (n > 1) {
            p = spf(n);
            n /= p;
        }
        return p;
    }

    /// Binary cache: "DVL1", u32 version, u64 limit, then spf[2..limit] as u32
    /// (u64 if limit >= 2^32), all little-endian.
    void save(const std::string& path) const {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw ResourceError("cannot open sieve cache for writing: " + path);
        out.write(kMagic, 4);
        put_le(out, kVersion, 4);
        put_le(out, limit_, 8);
        const int width = limit_ < (1ULL << 32) ? 4 : 8;
        std::vector<unsigned char> buf;
        buf.reserve(1 << 20);
        for (std::uint64_t n = 2; n <= limit_; ++n) {
            const std::uint64_t v = spf_[n];
            for (int b = 0; b < width; ++b) buf.push_back(static_cast<unsigned char>(v >> (8 * b)));
            if (buf.size() >= (1 << 20)) {
                out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
                buf.clear();
            }
        }
        out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
        if (!out) throw ResourceError("failed writing sieve cache: " + path);
    }

    [[nodiscard]] static SpfSieve load(const std::string& path, std::uint64_t cap = kDefaultSieveCap) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw ResourceError("cannot open sieve cache: " + path);
        char magic[4];
        in.read(magic, 4);
        if (!in || std::memcmp(magic, kMagic, 4) != 0) throw DomainError("bad sieve cache magic: " + path);
        const std::uint64_t version = get_le(in, 4);
        if (version != kVersion) throw DomainError("unsupported sieve cache version " + std::to_string(version));
        const std::uint64_t limit = get_le(in, 8);
        if (!in || limit < 2) throw DomainError("corrupt sieve cache header: " + path);
        if (limit > cap || limit >= (1ULL << 32)) throw ResourceError("cached sieve limit exceeds cap");
        SpfSieve s;
        s.limit_ = limit;
        s.spf_.assign(limit + 1, 0);
        const int width = limit < (1ULL << 32) ? 4 : 8;
        std::vector<unsigned char> buf(static_cast<std::size_t>(width) * (limit - 1));
        in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
        if (in.gcount() != static_cast<std::streamsize>(buf.size())) throw DomainError("truncated sieve cache: " + path);
        for (std::uint64_t n = 2, off = 0; n <= limit; ++n, off += width) {
            std::uint64_t v = 0;
            for (int b = 0; b < width; ++b) v |= static_cast<std::uint64_t>(buf[off + b]) << (8 * b);
            if (v < 2 || v > n || n % v != 0) throw DomainError("sieve cache entry fails invariant at " + std::to_string(n));
            s.spf_[n] = static_cast<std::uint32_t>(v);
        }
        return s;
    }

    friend bool operator==(const SpfSieve& a, const SpfSieve& b) { return a.limit_ == b.limit_ && a.spf_ == b.spf_; }

private:
    static constexpr char kMagic[4] = {'D', 'V', 'L', '1'};
    static constexpr std::uint64_t kVersion = 1;

    static void put_le(std::ostream& out, std::uint64_t v, int bytes) {
        for (int b = 0; b < bytes; ++b) out.put(static_cast<char>((v >> (8 * b)) & 0xFF));
    }
    static std::uint64_t get_le(std::istream& in, int bytes) {
        std::uint64_t v = 0;
        for (int b = 0; b < bytes; ++b) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in.get())) << (8 * b);
        return v;
    }

    std::uint64_t limit_ = 0;
    std::vector<std::uint32_t> spf_;
};

/// Loads `path` when it holds a sieve covering `limit`, otherwise builds one
/// and writes it back. An empty path skips the cache.
[[nodiscard]] inline SpfSieve cached_sieve(std::uint64_t limit, const std::string& path,
                                           std::uint64_t cap = kDefaultSieveCap) {
    if (!path.empty()) {
        std::ifstream probe(path, std::ios::binary);
        if (probe) {
            probe.close();
            SpfSieve s = SpfSieve::load(path, cap);
            if (s.limit() >= limit) return s;
        }
    }
    SpfSieve s(limit, cap);
    if (!path.empty()) s.save(path);
    return s;
}

}  // namespace divilab
