#ifndef SR6SFC_ADDR_HPP
#define SR6SFC_ADDR_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace sr6 {

// 128-bit IPv6 address stored in network byte order.
struct Ip6Addr {
    std::array<uint8_t, 16> b{};

    static std::optional<Ip6Addr> parse(std::string_view text);
    std::string str() const;

    // Bit i counted from the most significant bit (0..127).
    bool bit(unsigned i) const { return (b[i >> 3] >> (7 - (i & 7))) & 1; }

    auto operator<=>(const Ip6Addr&) const = default;
};

struct Ip6AddrHash {
    size_t operator()(const Ip6Addr& a) const {
        uint64_t hi, lo;
        __builtin_memcpy(&hi, a.b.data(), 8);
        __builtin_memcpy(&lo, a.b.data() + 8, 8);
        return std::hash<uint64_t>{}(hi * 0x9e3779b97f4a7c15ULL ^ lo);
    }
};

// Address prefix; bits beyond `len` are kept zero.
struct Prefix {
    Ip6Addr addr{};
    uint8_t len = 0;

    static std::optional<Prefix> parse(std::string_view text);  // "fdf1::2/128", "default"
    static Prefix of(const Ip6Addr& a, uint8_t len);            // zeroes host bits
    bool contains(const Ip6Addr& a) const;
    std::string str() const;

    auto operator<=>(const Prefix&) const = default;
};

// Length of the common prefix of a and b, capped at max_bits.
unsigned common_prefix_len(const Ip6Addr& a, const Ip6Addr& b, unsigned max_bits);

}  // namespace sr6

#endif
