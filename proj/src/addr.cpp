#include "addr.hpp"

#include <arpa/inet.h>

#include <bit>
#include <cstring>

namespace sr6 {

std::optional<Ip6Addr> Ip6Addr::parse(std::string_view text) {
    std::string z(text);
    Ip6Addr a;
    if (inet_pton(AF_INET6, z.c_str(), a.b.data()) != 1) return std::nullopt;
    return a;
}

std::string Ip6Addr::str() const {
    char buf[INET6_ADDRSTRLEN];
    inet_ntop(AF_INET6, b.data(), buf, sizeof buf);
    return buf;
}

std::optional<Prefix> Prefix::parse(std::string_view text) {
    if (text == "default") return Prefix{};  // ::/0
    auto slash = text.find('/');
    std::string_view addr_part = text.substr(0, slash);
    unsigned len = 128;
    if (slash != std::string_view::npos) {
        len = 0;
        for (char c : text.substr(slash + 1)) {
            if (c < '0' || c > '9') return std::nullopt;
            len = len * 10 + unsigned(c - '0');
            if (len > 128) return std::nullopt;
        }
    }
    auto a = Ip6Addr::parse(addr_part);
    if (!a) return std::nullopt;
    return of(*a, uint8_t(len));
}

Prefix Prefix::of(const Ip6Addr& a, uint8_t len) {
    Prefix p{a, len};
    for (unsigned i = len; i < 128; ++i)
        p.addr.b[i >> 3] &= uint8_t(~(1u << (7 - (i & 7))));
    return p;
}

bool Prefix::contains(const Ip6Addr& a) const {
    return common_prefix_len(addr, a, len) == len;
}

std::string Prefix::str() const {
    return addr.str() + "/" + std::to_string(len);
}

unsigned common_prefix_len(const Ip6Addr& a, const Ip6Addr& b, unsigned max_bits) {
    unsigned n = 0;
    for (unsigned i = 0; i < 16 && n < max_bits; ++i) {
        uint8_t x = a.b[i] ^ b.b[i];
        if (x == 0) {
            n += 8;
            continue;
        }
        n += unsigned(std::countl_zero(x));
        break;
    }
    return n < max_bits ? n : max_bits;
}

}  // namespace sr6
