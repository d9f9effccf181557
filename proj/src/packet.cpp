#include "packet.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

namespace sr6 {

const char* codec_err_str(CodecErr e) {
    switch (e) {
        case CodecErr::TruncatedHeader: return "TruncatedHeader";
        case CodecErr::BadVersion: return "BadVersion";
        case CodecErr::BadRoutingType: return "BadRoutingType";
        case CodecErr::LengthMismatch: return "LengthMismatch";
        case CodecErr::EmptySidList: return "EmptySidList";
        case CodecErr::NotEncapsulated: return "NotEncapsulated";
        case CodecErr::AlreadyHasSrh: return "AlreadyHasSrh";
        case CodecErr::NoSrh: return "NoSrh";
        case CodecErr::SegmentsExhausted: return "SegmentsExhausted";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// PacketBuf

PacketBuf PacketBuf::from_bytes(std::span<const uint8_t> bytes, size_t headroom) {
    PacketBuf p;
    p.assign(bytes, headroom);
    return p;
}

void PacketBuf::assign(std::span<const uint8_t> bytes, size_t headroom) {
    store_.resize(headroom + bytes.size());
    off_ = headroom;
    len_ = bytes.size();
    std::memcpy(store_.data() + off_, bytes.data(), bytes.size());
}

uint8_t* PacketBuf::grow_front(size_t n) {
    if (off_ < n) {
        size_t extra = kDefaultHeadroom + n - off_;
        store_.insert(store_.begin(), extra, 0);
        off_ += extra;
    }
    off_ -= n;
    len_ += n;
    return data();
}

void PacketBuf::pull_front(size_t n) {
    off_ += n;
    len_ -= n;
}

uint8_t* PacketBuf::open_gap(size_t at, size_t n) {
    grow_front(n);
    std::memmove(data(), data() + n, at);
    return data() + at;
}

void PacketBuf::close_gap(size_t at, size_t n) {
    std::memmove(data() + n, data(), at);
    pull_front(n);
}

// ---------------------------------------------------------------------------
// Validation / parse / serialize

Status<CodecErr> validate_frame(std::span<const uint8_t> bytes) {
    if (bytes.size() < kIpv6HdrLen) return CodecErr::TruncatedHeader;
    if (bytes[0] >> 4 != 6) return CodecErr::BadVersion;
    size_t plen = size_t(bytes[4]) << 8 | bytes[5];
    if (kIpv6HdrLen + plen != bytes.size()) return CodecErr::LengthMismatch;
    if (bytes[6] == kProtoRouting) {
        if (bytes.size() < kIpv6HdrLen + 8) return CodecErr::TruncatedHeader;
        size_t srh_len = (size_t(bytes[41]) + 1) * 8;
        if (kIpv6HdrLen + srh_len > bytes.size()) return CodecErr::LengthMismatch;
        if (bytes[42] != kSrhRoutingType) return CodecErr::BadRoutingType;
        size_t n_segs = size_t(bytes[44]) + 1;
        if (8 + 16 * n_segs > srh_len) return CodecErr::LengthMismatch;
        if (bytes[43] > bytes[44]) return CodecErr::LengthMismatch;  // SL > last_entry
    }
    return {};
}

Result<ParsedPacket, CodecErr> parse_packet(std::span<const uint8_t> bytes) {
    if (auto st = validate_frame(bytes); !st) return st.error();
    ParsedPacket p;
    p.ip.traffic_class = uint8_t((bytes[0] & 0x0f) << 4 | bytes[1] >> 4);
    p.ip.flow_label = (uint32_t(bytes[1] & 0x0f) << 16) | uint32_t(bytes[2]) << 8 | bytes[3];
    p.ip.payload_length = uint16_t(bytes[4]) << 8 | bytes[5];
    p.ip.next_header = bytes[6];
    p.ip.hop_limit = bytes[7];
    std::memcpy(p.ip.src.b.data(), bytes.data() + 8, 16);
    std::memcpy(p.ip.dst.b.data(), bytes.data() + 24, 16);

    size_t off = kIpv6HdrLen;
    if (p.ip.next_header == kProtoRouting) {
        SrhHeader s;
        s.next_header = bytes[40];
        size_t srh_len = (size_t(bytes[41]) + 1) * 8;
        s.segments_left = bytes[43];
        size_t n_segs = size_t(bytes[44]) + 1;
        s.flags = bytes[45];
        s.tag = uint16_t(bytes[46]) << 8 | bytes[47];
        s.segments.resize(n_segs);
        for (size_t i = 0; i < n_segs; ++i)
            std::memcpy(s.segments[i].b.data(), bytes.data() + 48 + 16 * i, 16);
        size_t tlv_len = srh_len - 8 - 16 * n_segs;
        s.tlv.assign(bytes.begin() + long(48 + 16 * n_segs), bytes.begin() + long(40 + srh_len));
        (void)tlv_len;
        p.srh = std::move(s);
        off += srh_len;
    }
    p.payload.assign(bytes.begin() + long(off), bytes.end());
    return p;
}

void serialize(const Ipv6Header& h, std::vector<uint8_t>& out) {
    out.push_back(uint8_t(6 << 4 | h.traffic_class >> 4));
    out.push_back(uint8_t((h.traffic_class & 0x0f) << 4 | (h.flow_label >> 16 & 0x0f)));
    out.push_back(uint8_t(h.flow_label >> 8));
    out.push_back(uint8_t(h.flow_label));
    out.push_back(uint8_t(h.payload_length >> 8));
    out.push_back(uint8_t(h.payload_length));
    out.push_back(h.next_header);
    out.push_back(h.hop_limit);
    out.insert(out.end(), h.src.b.begin(), h.src.b.end());
    out.insert(out.end(), h.dst.b.begin(), h.dst.b.end());
}

void serialize(const SrhHeader& h, std::vector<uint8_t>& out) {
    out.push_back(h.next_header);
    out.push_back(h.hdr_ext_len());
    out.push_back(kSrhRoutingType);
    out.push_back(h.segments_left);
    out.push_back(h.last_entry());
    out.push_back(h.flags);
    out.push_back(uint8_t(h.tag >> 8));
    out.push_back(uint8_t(h.tag));
    for (const auto& s : h.segments) out.insert(out.end(), s.b.begin(), s.b.end());
    out.insert(out.end(), h.tlv.begin(), h.tlv.end());
}

std::vector<uint8_t> serialize_packet(const ParsedPacket& p) {
    std::vector<uint8_t> out;
    out.reserve(kIpv6HdrLen + (p.srh ? p.srh->byte_len() : 0) + p.payload.size());
    serialize(p.ip, out);
    if (p.srh) serialize(*p.srh, out);
    out.insert(out.end(), p.payload.begin(), p.payload.end());
    return out;
}

// ---------------------------------------------------------------------------
// Transforms

Status<CodecErr> encap(PacketBuf& pkt, std::span<const Ip6Addr> segments, const Ip6Addr& outer_src) {
    if (segments.empty()) return CodecErr::EmptySidList;
    if (pkt.size() < kIpv6HdrLen) return CodecErr::TruncatedHeader;
    if (pkt.data()[0] >> 4 != 6) return CodecErr::BadVersion;

    size_t inner_len = pkt.size();
    size_t n = segments.size();
    size_t add = encap_overhead(n);
    uint8_t* p = pkt.grow_front(add);

    // outer IPv6
    std::memset(p, 0, add);
    p[0] = 6 << 4;
    uint16_t plen = uint16_t(srh_byte_len(n) + inner_len);
    p[4] = uint8_t(plen >> 8);
    p[5] = uint8_t(plen);
    p[6] = kProtoRouting;
    p[7] = 64;
    std::memcpy(p + 8, outer_src.b.data(), 16);
    std::memcpy(p + 24, segments[n - 1].b.data(), 16);
    // SRH
    p[40] = kProtoIpv6;
    p[41] = uint8_t(2 * n);
    p[42] = kSrhRoutingType;
    p[43] = uint8_t(n - 1);  // segments_left
    p[44] = uint8_t(n - 1);  // last_entry
    for (size_t i = 0; i < n; ++i) std::memcpy(p + 48 + 16 * i, segments[i].b.data(), 16);
    return {};
}

Result<std::vector<uint8_t>, CodecErr> decap(PacketBuf& pkt) {
    if (auto st = validate_frame(pkt.bytes()); !st) return st.error();
    WireView w(pkt);
    if (!w.has_srh() || w.srh_next_header() != kProtoIpv6) return CodecErr::NotEncapsulated;
    size_t pop = kIpv6HdrLen + w.srh_len();
    if (pop + kIpv6HdrLen > pkt.size()) return CodecErr::LengthMismatch;
    std::vector<uint8_t> saved(pkt.data(), pkt.data() + pop);
    pkt.pull_front(pop);
    return saved;
}

Status<CodecErr> advance_segment(PacketBuf& pkt) {
    if (pkt.size() < kIpv6HdrLen + 8) return CodecErr::TruncatedHeader;
    WireView w(pkt);
    if (!w.has_srh()) return CodecErr::NoSrh;
    if (w.srh_routing_type() != kSrhRoutingType) return CodecErr::BadRoutingType;
    uint8_t sl = w.srh_segments_left();
    if (sl == 0) return CodecErr::SegmentsExhausted;
    --sl;
    w.srh_set_segments_left(sl);
    w.set_dst(w.srh_segment(sl));
    return {};
}

Status<CodecErr> advance_segment(Ipv6Header& ip, SrhHeader& srh) {
    if (srh.segments_left == 0) return CodecErr::SegmentsExhausted;
    --srh.segments_left;
    ip.dst = srh.segments[srh.segments_left];
    return {};
}

Status<CodecErr> insert_srh(PacketBuf& pkt, std::span<const Ip6Addr> segments) {
    if (segments.empty()) return CodecErr::EmptySidList;
    if (auto st = validate_frame(pkt.bytes()); !st) return st.error();
    if (WireView(pkt).next_header() == kProtoRouting) return CodecErr::AlreadyHasSrh;

    size_t n = segments.size();
    size_t add = srh_byte_len(n);
    uint8_t old_next = pkt.data()[6];
    uint8_t* srh = pkt.open_gap(kIpv6HdrLen, add);
    std::memset(srh, 0, add);
    srh[0] = old_next;
    srh[1] = uint8_t(2 * n);
    srh[2] = kSrhRoutingType;
    srh[3] = uint8_t(n - 1);
    srh[4] = uint8_t(n - 1);
    for (size_t i = 0; i < n; ++i) std::memcpy(srh + 8 + 16 * i, segments[i].b.data(), 16);

    WireView w(pkt);
    w.set_payload_length(uint16_t(w.payload_length() + add));
    pkt.data()[6] = kProtoRouting;
    w.set_dst(segments[n - 1]);
    return {};
}

Status<CodecErr> remove_srh(PacketBuf& pkt) {
    if (auto st = validate_frame(pkt.bytes()); !st) return st.error();
    WireView w(pkt);
    if (!w.has_srh()) return CodecErr::NoSrh;
    size_t srh_len = w.srh_len();
    uint8_t next = w.srh_next_header();
    Ip6Addr final_dst = w.srh_segment(0);
    uint16_t plen = w.payload_length();
    pkt.close_gap(kIpv6HdrLen, srh_len);
    WireView v(pkt);
    v.set_payload_length(uint16_t(plen - srh_len));
    pkt.data()[6] = next;
    v.set_dst(final_dst);
    return {};
}

// ---------------------------------------------------------------------------
// Test traffic

uint16_t udp_checksum(const Ip6Addr& src, const Ip6Addr& dst, std::span<const uint8_t> udp) {
    uint64_t sum = 0;
    auto add16 = [&](uint16_t v) { sum += v; };
    auto add_bytes = [&](const uint8_t* p, size_t n) {
        for (size_t i = 0; i + 1 < n; i += 2) add16(uint16_t(p[i]) << 8 | p[i + 1]);
        if (n & 1) add16(uint16_t(p[n - 1]) << 8);
    };
    add_bytes(src.b.data(), 16);
    add_bytes(dst.b.data(), 16);
    add16(uint16_t(udp.size() >> 16));
    add16(uint16_t(udp.size()));
    add16(kProtoUdp);
    add_bytes(udp.data(), udp.size());
    while (sum >> 16) sum = (sum & 0xffff) + (sum >> 16);
    uint16_t c = uint16_t(~sum);
    return c == 0 ? 0xffff : c;
}

PacketBuf make_udp_packet(const Ip6Addr& src, const Ip6Addr& dst, uint16_t sport, uint16_t dport,
                          std::span<const uint8_t> payload, uint8_t hop_limit) {
    std::vector<uint8_t> udp(8 + payload.size());
    udp[0] = uint8_t(sport >> 8);
    udp[1] = uint8_t(sport);
    udp[2] = uint8_t(dport >> 8);
    udp[3] = uint8_t(dport);
    udp[4] = uint8_t(udp.size() >> 8);
    udp[5] = uint8_t(udp.size());
    std::memcpy(udp.data() + 8, payload.data(), payload.size());
    uint16_t ck = udp_checksum(src, dst, udp);
    udp[6] = uint8_t(ck >> 8);
    udp[7] = uint8_t(ck);

    Ipv6Header ip;
    ip.payload_length = uint16_t(udp.size());
    ip.next_header = kProtoUdp;
    ip.hop_limit = hop_limit;
    ip.src = src;
    ip.dst = dst;
    std::vector<uint8_t> frame;
    frame.reserve(kIpv6HdrLen + udp.size());
    serialize(ip, frame);
    frame.insert(frame.end(), udp.begin(), udp.end());
    return PacketBuf::from_bytes(frame);
}

// ---------------------------------------------------------------------------
// Hex fixtures

std::string to_hex(std::span<const uint8_t> bytes) {
    static const char* d = "0123456789abcdef";
    std::string s;
    s.reserve(bytes.size() * 2);
    for (uint8_t b : bytes) {
        s.push_back(d[b >> 4]);
        s.push_back(d[b & 0xf]);
    }
    return s;
}

std::optional<std::vector<uint8_t>> from_hex(std::string_view text) {
    auto nib = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    };
    if (text.size() % 2) return std::nullopt;
    std::vector<uint8_t> out;
    out.reserve(text.size() / 2);
    for (size_t i = 0; i < text.size(); i += 2) {
        int hi = nib(text[i]), lo = nib(text[i + 1]);
        if (hi < 0 || lo < 0) return std::nullopt;
        out.push_back(uint8_t(hi << 4 | lo));
    }
    return out;
}

Result<std::vector<std::vector<uint8_t>>, std::string> load_hex_frames(const std::string& path) {
    std::ifstream in(path);
    if (!in) return std::string("cannot open " + path);
    std::vector<std::vector<uint8_t>> frames;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        while (!line.empty() && std::isspace(uint8_t(line.back()))) line.pop_back();
        size_t start = 0;
        while (start < line.size() && std::isspace(uint8_t(line[start]))) ++start;
        if (start == line.size()) continue;
        auto bytes = from_hex(std::string_view(line).substr(start));
        if (!bytes) return std::string(path + ":" + std::to_string(lineno) + ": bad hex frame");
        frames.push_back(std::move(*bytes));
    }
    return frames;
}

}  // namespace sr6
