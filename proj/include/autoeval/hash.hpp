#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace autoeval {

// FNV-1a, 64-bit. Used for manifest/checkpoint/corpus fingerprints; these are
// integrity and determinism checks, not security boundaries.
class Fnv1a64 {
public:
    Fnv1a64& update(const void* data, std::size_t n) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            state_ ^= p[i];
            state_ *= 0x100000001B3ull;
        }
        return *this;
    }

    Fnv1a64& update(const std::string& s) { return update(s.data(), s.size()); }

    template <typename T>
    Fnv1a64& update_value(const T& v) {
        static_assert(std::is_trivially_copyable_v<T>);
        return update(&v, sizeof(v));
    }

    std::uint64_t digest() const { return state_; }

private:
    std::uint64_t state_ = 0xCBF29CE484222325ull;
};

inline std::uint64_t fnv1a64(const void* data, std::size_t n) {
    return Fnv1a64().update(data, n).digest();
}

inline std::uint64_t fnv1a64(const std::string& s) {
    return fnv1a64(s.data(), s.size());
}

std::string hash_to_hex(std::uint64_t h);

// Hash of a whole file's bytes. Throws Error(kFormat) if unreadable.
std::uint64_t hash_file(const std::string& path);

}  // namespace autoeval
