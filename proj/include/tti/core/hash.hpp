#pragma once

#include <cstdint>
#include <string_view>

namespace tti {

// 64-bit FNV-1a; used for feature hashing and config fingerprints.
class Fnv1a {
public:
    Fnv1a& add(std::string_view bytes) noexcept {
        for (unsigned char c : bytes) {
            state_ ^= c;
            state_ *= 0x100000001b3ULL;
        }
        return *this;
    }

    Fnv1a& add(std::uint64_t value) noexcept {
        for (int i = 0; i < 8; ++i) {
            state_ ^= static_cast<unsigned char>(value >> (8 * i));
            state_ *= 0x100000001b3ULL;
        }
        return *this;
    }

    std::uint64_t digest() const noexcept { return state_; }

private:
    std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

inline std::uint64_t fnv1a(std::string_view bytes) noexcept {
    return Fnv1a{}.add(bytes).digest();
}

} // namespace tti
