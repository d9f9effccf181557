#ifndef SR6SFC_TRIE_HPP
#define SR6SFC_TRIE_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>

#include "addr.hpp"

namespace sr6 {

// Path-compressed binary trie on address bits, mapping prefixes to dense ids.
// Lookup reports the number of key bits consumed so route-lookup cost can be
// charged per bit by the simulator.
class PrefixTrie {
public:
    PrefixTrie();

    // Returns false if the exact prefix is already present.
    bool insert(const Prefix& p, int32_t value);
    // Returns the removed value, if the exact prefix was present.
    std::optional<int32_t> erase(const Prefix& p);

    struct Hit {
        int32_t value;
        uint8_t prefix_len;
    };
    std::optional<Hit> lookup(const Ip6Addr& a, uint32_t* bits_examined = nullptr) const;
    std::optional<int32_t> exact(const Prefix& p) const;

    void visit(const std::function<void(const Prefix&, int32_t)>& fn) const;
    size_t size() const { return size_; }

private:
    struct Node {
        Prefix key;
        int32_t value = -1;
        std::unique_ptr<Node> child[2];
    };
    static void visit_node(const Node* n, const std::function<void(const Prefix&, int32_t)>& fn);
    std::unique_ptr<Node> root_;
    size_t size_ = 0;
};

}  // namespace sr6

#endif
