#ifndef SR6SFC_PACKET_HPP
#define SR6SFC_PACKET_HPP

#include <cstdint>
#include <cstring>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "addr.hpp"
#include "result.hpp"

namespace sr6 {

inline constexpr size_t kIpv6HdrLen = 40;
inline constexpr uint8_t kProtoUdp = 17;
inline constexpr uint8_t kProtoIpv6 = 41;
inline constexpr uint8_t kProtoRouting = 43;
inline constexpr uint8_t kSrhRoutingType = 4;

// L2/L1 overheads are accounting constants only; frames on the wire of the
// simulator are bare IPv6.
inline constexpr size_t kEthernetOverhead = 18;
inline constexpr size_t kPhysicalOverhead = 20;

inline size_t srh_byte_len(size_t n_segments, size_t tlv_len = 0) {
    return 8 + 16 * n_segments + tlv_len;
}
inline size_t encap_overhead(size_t n_segments) { return kIpv6HdrLen + srh_byte_len(n_segments); }

enum class CodecErr {
    TruncatedHeader,
    BadVersion,
    BadRoutingType,
    LengthMismatch,
    EmptySidList,
    NotEncapsulated,
    AlreadyHasSrh,
    NoSrh,
    SegmentsExhausted,
};
const char* codec_err_str(CodecErr e);

// ---------------------------------------------------------------------------
// Value types (decoded headers).

struct Ipv6Header {
    uint8_t traffic_class = 0;
    uint32_t flow_label = 0;  // 20 bits
    uint16_t payload_length = 0;
    uint8_t next_header = 0;
    uint8_t hop_limit = 64;
    Ip6Addr src{};
    Ip6Addr dst{};

    bool operator==(const Ipv6Header&) const = default;
};

// Segment list is stored in reverse traversal order: segments[0] is the final
// destination, segments[segments_left] is the active SID.
struct SrhHeader {
    uint8_t next_header = 0;
    uint8_t segments_left = 0;
    uint8_t flags = 0;
    uint16_t tag = 0;
    std::vector<Ip6Addr> segments;
    std::vector<uint8_t> tlv;  // opaque, preserved verbatim; length multiple of 8

    uint8_t last_entry() const { return uint8_t(segments.size() - 1); }
    size_t byte_len() const { return srh_byte_len(segments.size(), tlv.size()); }
    uint8_t hdr_ext_len() const { return uint8_t((byte_len() - 8) / 8); }

    bool operator==(const SrhHeader&) const = default;
};

// ---------------------------------------------------------------------------
// Packet buffer with front headroom so encap/decap avoid reallocation.

class PacketBuf {
public:
    static constexpr size_t kDefaultHeadroom = 128;

    PacketBuf() = default;
    static PacketBuf from_bytes(std::span<const uint8_t> bytes, size_t headroom = kDefaultHeadroom);

    std::span<const uint8_t> bytes() const { return {store_.data() + off_, len_}; }
    uint8_t* data() { return store_.data() + off_; }
    const uint8_t* data() const { return store_.data() + off_; }
    size_t size() const { return len_; }
    bool empty() const { return len_ == 0; }

    // Grow the packet at the front (uses headroom; reallocates if exhausted).
    uint8_t* grow_front(size_t n);
    // Drop n bytes from the front; they stay in the buffer as new headroom.
    void pull_front(size_t n);
    // Open a gap of n bytes at `at` bytes into the packet (shifts the leading
    // part into the headroom).
    uint8_t* open_gap(size_t at, size_t n);
    // Remove n bytes starting at `at` (shifts the leading part forward).
    void close_gap(size_t at, size_t n);

    // Re-initialize from a template without releasing capacity.
    void assign(std::span<const uint8_t> bytes, size_t headroom = kDefaultHeadroom);

    bool operator==(const PacketBuf& o) const {
        return len_ == o.len_ && std::memcmp(data(), o.data(), len_) == 0;
    }

private:
    std::vector<uint8_t> store_;
    size_t off_ = 0;
    size_t len_ = 0;
};

// ---------------------------------------------------------------------------
// Zero-copy field access for validated frames.

class WireView {
public:
    WireView(uint8_t* p, size_t n) : p_(p), n_(n) {}
    explicit WireView(PacketBuf& b) : p_(b.data()), n_(b.size()) {}

    uint8_t version() const { return p_[0] >> 4; }
    uint16_t payload_length() const { return uint16_t(p_[4]) << 8 | p_[5]; }
    void set_payload_length(uint16_t v) {
        p_[4] = uint8_t(v >> 8);
        p_[5] = uint8_t(v);
    }
    uint8_t next_header() const { return p_[6]; }
    uint8_t hop_limit() const { return p_[7]; }
    Ip6Addr src() const { return read_addr(8); }
    Ip6Addr dst() const { return read_addr(24); }
    void set_dst(const Ip6Addr& a) { std::memcpy(p_ + 24, a.b.data(), 16); }

    bool has_srh() const { return next_header() == kProtoRouting && n_ >= kIpv6HdrLen + 8; }
    uint8_t srh_next_header() const { return p_[40]; }
    size_t srh_len() const { return (size_t(p_[41]) + 1) * 8; }
    uint8_t srh_routing_type() const { return p_[42]; }
    uint8_t srh_segments_left() const { return p_[43]; }
    void srh_set_segments_left(uint8_t v) { p_[43] = v; }
    uint8_t srh_last_entry() const { return p_[44]; }
    size_t srh_n_segments() const { return size_t(srh_last_entry()) + 1; }
    Ip6Addr srh_segment(size_t i) const { return read_addr(48 + 16 * i); }

    size_t size() const { return n_; }
    const uint8_t* data() const { return p_; }

private:
    Ip6Addr read_addr(size_t off) const {
        Ip6Addr a;
        std::memcpy(a.b.data(), p_ + off, 16);
        return a;
    }
    uint8_t* p_;
    size_t n_;
};

// Structural validation: sizes, version, SRH bounds. Cheap enough for the
// per-hop ingress check.
Status<CodecErr> validate_frame(std::span<const uint8_t> bytes);

// ---------------------------------------------------------------------------
// Decode / encode.

struct ParsedPacket {
    Ipv6Header ip;
    std::optional<SrhHeader> srh;
    std::vector<uint8_t> payload;
};

Result<ParsedPacket, CodecErr> parse_packet(std::span<const uint8_t> bytes);
void serialize(const Ipv6Header& h, std::vector<uint8_t>& out);
void serialize(const SrhHeader& h, std::vector<uint8_t>& out);
std::vector<uint8_t> serialize_packet(const ParsedPacket& p);

// ---------------------------------------------------------------------------
// In-place transforms.

// IPv6-in-IPv6 encapsulation. `segments` is in SRH order (segments[0] is the
// final destination); the outer destination becomes the active SID
// segments[N-1] and segments_left starts at N-1.
Status<CodecErr> encap(PacketBuf& pkt, std::span<const Ip6Addr> segments, const Ip6Addr& outer_src);

// Pops the outer IPv6 + SRH headers, leaving the inner packet. Returns the
// exact popped byte sequence.
Result<std::vector<uint8_t>, CodecErr> decap(PacketBuf& pkt);

// End-style segment pointer advance: SL -= 1, dst := segments[SL].
Status<CodecErr> advance_segment(PacketBuf& pkt);
Status<CodecErr> advance_segment(Ipv6Header& ip, SrhHeader& srh);

// Insert-mode SRH splice. `segments` is the full list in SRH order; callers
// preserving the original destination put it at segments[0].
Status<CodecErr> insert_srh(PacketBuf& pkt, std::span<const Ip6Addr> segments);
// Inverse of insert_srh: strips the SRH and restores dst := segments[0].
Status<CodecErr> remove_srh(PacketBuf& pkt);

// ---------------------------------------------------------------------------
// Test traffic.

uint16_t udp_checksum(const Ip6Addr& src, const Ip6Addr& dst, std::span<const uint8_t> udp);
PacketBuf make_udp_packet(const Ip6Addr& src, const Ip6Addr& dst, uint16_t sport, uint16_t dport,
                          std::span<const uint8_t> payload, uint8_t hop_limit = 64);

// ---------------------------------------------------------------------------
// Hex fixture format: one frame per line, lowercase hex, '#' comments.

std::string to_hex(std::span<const uint8_t> bytes);
std::optional<std::vector<uint8_t>> from_hex(std::string_view text);
Result<std::vector<std::vector<uint8_t>>, std::string> load_hex_frames(const std::string& path);

}  // namespace sr6

#endif
