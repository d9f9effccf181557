#include "trie.hpp"

namespace sr6 {

PrefixTrie::PrefixTrie() : root_(std::make_unique<Node>()) {}

bool PrefixTrie::insert(const Prefix& p, int32_t value) {
    Node* cur = root_.get();
    for (;;) {
        if (cur->key.len == p.len) {
            if (cur->value >= 0) return false;
            cur->value = value;
            ++size_;
            return true;
        }
        bool bit = p.addr.bit(cur->key.len);
        auto& slot = cur->child[bit];
        if (!slot) {
            slot = std::make_unique<Node>();
            slot->key = p;
            slot->value = value;
            ++size_;
            return true;
        }
        unsigned limit = slot->key.len < p.len ? slot->key.len : p.len;
        unsigned common = common_prefix_len(slot->key.addr, p.addr, limit);
        if (common == slot->key.len) {
            cur = slot.get();
            continue;
        }
        // Split the edge at the divergence (or insertion) point.
        auto mid = std::make_unique<Node>();
        mid->key = Prefix::of(p.addr, uint8_t(common));
        bool old_bit = slot->key.addr.bit(common);
        mid->child[old_bit] = std::move(slot);
        if (common == p.len) {
            mid->value = value;
        } else {
            auto leaf = std::make_unique<Node>();
            leaf->key = p;
            leaf->value = value;
            mid->child[p.addr.bit(common)] = std::move(leaf);
        }
        cur->child[bit] = std::move(mid);
        ++size_;
        return true;
    }
}

std::optional<int32_t> PrefixTrie::erase(const Prefix& p) {
    Node* cur = root_.get();
    for (;;) {
        if (cur->key == p) {
            if (cur->value < 0) return std::nullopt;
            int32_t v = cur->value;
            cur->value = -1;
            --size_;
            return v;
        }
        if (cur->key.len >= p.len) return std::nullopt;
        auto& slot = cur->child[p.addr.bit(cur->key.len)];
        if (!slot || common_prefix_len(slot->key.addr, p.addr,
                                       slot->key.len < p.len ? slot->key.len : p.len) <
                         (slot->key.len < p.len ? slot->key.len : p.len))
            return std::nullopt;
        if (slot->key.len > p.len) return std::nullopt;
        cur = slot.get();
    }
}

std::optional<PrefixTrie::Hit> PrefixTrie::lookup(const Ip6Addr& a, uint32_t* bits_examined) const {
    const Node* cur = root_.get();
    std::optional<Hit> best;
    uint32_t consumed = 0;
    for (;;) {
        if (cur->value >= 0) best = Hit{cur->value, cur->key.len};
        if (cur->key.len >= 128) break;
        const Node* next = cur->child[a.bit(cur->key.len)].get();
        if (!next) break;
        unsigned common = common_prefix_len(next->key.addr, a, next->key.len);
        consumed = consumed > common ? consumed : common;
        if (common < next->key.len) break;
        cur = next;
    }
    if (bits_examined) *bits_examined = consumed;
    return best;
}

std::optional<int32_t> PrefixTrie::exact(const Prefix& p) const {
    const Node* cur = root_.get();
    for (;;) {
        if (cur->key == p) return cur->value >= 0 ? std::optional<int32_t>(cur->value) : std::nullopt;
        if (cur->key.len >= p.len) return std::nullopt;
        const Node* next = cur->child[p.addr.bit(cur->key.len)].get();
        if (!next || next->key.len > p.len ||
            common_prefix_len(next->key.addr, p.addr, next->key.len) < next->key.len)
            return std::nullopt;
        cur = next;
    }
}

void PrefixTrie::visit(const std::function<void(const Prefix&, int32_t)>& fn) const {
    visit_node(root_.get(), fn);
}

void PrefixTrie::visit_node(const Node* n, const std::function<void(const Prefix&, int32_t)>& fn) {
    if (n->value >= 0) fn(n->key, n->value);
    if (n->child[0]) visit_node(n->child[0].get(), fn);
    if (n->child[1]) visit_node(n->child[1].get(), fn);
}

}  // namespace sr6
