#ifndef DYNRING_IDS_HPP
#define DYNRING_IDS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

// Bit-string identifier arithmetic. Bit positions are 1-indexed throughout:
// bits[1] is the leftmost (most significant) position of the written string.

namespace dynring {

// A k-bit agent identifier, k > 1. Stored as the literal character string
// of '0'/'1' so that config files round-trip exactly.
struct AgentId {
    std::string bits;

    explicit AgentId(std::string b) : bits(std::move(b)) {
        if (bits.size() < 2)
            throw std::invalid_argument("AgentId: length must be > 1");
        for (char c : bits)
            if (c != '0' && c != '1')
                throw std::invalid_argument("AgentId: non-binary character");
    }

    int length() const { return static_cast<int>(bits.size()); }

    // 1-indexed bit access, returns 0 or 1.
    int bit(int pos) const {
        if (pos < 1 || pos > length())
            throw std::out_of_range("AgentId: bit position out of range");
        return bits[static_cast<size_t>(pos - 1)] - '0';
    }

    bool operator==(const AgentId& o) const { return bits == o.bits; }
};

// val(ID): numerical value of the bit string read as binary, MSB first.
inline std::uint64_t value_of(const AgentId& id) {
    std::uint64_t v = 0;
    for (char c : id.bits) v = (v << 1) | static_cast<std::uint64_t>(c - '0');
    return v;
}

// Rank of (u,v) in the lexicographic ordering of S = {(u,v) : 1 <= u < v <= k}.
// Result lies in [1, k(k-1)/2].
inline int pair_index(int u, int v, int k) {
    if (k < 2) throw std::invalid_argument("pair_index: k must be >= 2");
    if (u < 1 || v <= u || v > k)
        throw std::invalid_argument("pair_index: require 1 <= u < v <= k");
    // Pairs preceding those starting with u: (k-1) + (k-2) + ... + (k-u+1).
    int before = (u - 1) * k - (u - 1) * u / 2;
    return before + (v - u);
}

// Inverse of pair_index.
inline std::pair<int, int> pair_from_index(int i, int k) {
    if (k < 2) throw std::invalid_argument("pair_from_index: k must be >= 2");
    const int l = k * (k - 1) / 2;
    if (i < 1 || i > l)
        throw std::invalid_argument("pair_from_index: index out of range");
    int u = 1;
    int rest = i;
    while (rest > k - u) {
        rest -= k - u;
        ++u;
    }
    return {u, u + rest};
}

// Dup(S, t): each bit of s repeated t times in place.
inline std::string duplicate_bits(const std::string& s, int t) {
    if (s.empty()) throw std::invalid_argument("duplicate_bits: empty string");
    if (t < 1) throw std::invalid_argument("duplicate_bits: t must be >= 1");
    std::string out;
    out.reserve(s.size() * static_cast<size_t>(t));
    for (char c : s)
        out.append(static_cast<size_t>(t), c);
    return out;
}

// The modified identifier: "0" ++ id ++ pairblock where pairblock[i] is
// (id[u] + id[v]) mod 2 for (u,v) the i-th pair in lexicographic order.
// Total length k(k-1)/2 + k + 1.
struct ModifiedId {
    std::string bits;

    int length() const { return static_cast<int>(bits.size()); }

    int bit(int pos) const {
        if (pos < 1 || pos > length())
            throw std::out_of_range("ModifiedId: bit position out of range");
        return bits[static_cast<size_t>(pos - 1)] - '0';
    }
};

inline ModifiedId modified_id(const AgentId& id) {
    const int k = id.length();
    const int l = k * (k - 1) / 2;
    std::string out;
    out.reserve(static_cast<size_t>(l + k + 1));
    out.push_back('0');
    out += id.bits;
    for (int i = 1; i <= l; ++i) {
        auto [u, v] = pair_from_index(i, k);
        out.push_back(static_cast<char>('0' + ((id.bit(u) + id.bit(v)) % 2)));
    }
    return ModifiedId{std::move(out)};
}

} // namespace dynring

#endif // DYNRING_IDS_HPP
