#pragma once

#include <cstdint>
#include <vector>

#include "rics/common.hpp"

namespace rics {

// Fixed-width keyword bit vector. Collisions only weaken pruning, never
// correctness: a set bit may be spurious but a needed bit is never missing.
class KeywordBitVector {
public:
    KeywordBitVector() : width_(0) {}
    explicit KeywordBitVector(int width)
        : width_(width), words_((width + 63) / 64, 0) {}

    int width() const { return width_; }

    void set(int bit) { words_[bit >> 6] |= (1ULL << (bit & 63)); }
    bool test(int bit) const { return (words_[bit >> 6] >> (bit & 63)) & 1; }

    void or_with(const KeywordBitVector& other) {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
    }

    bool intersects(const KeywordBitVector& other) const {
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & other.words_[i]) return true;
        return false;
    }

    // true when every bit of other is also set here
    bool contains(const KeywordBitVector& other) const {
        for (std::size_t i = 0; i < words_.size(); ++i)
            if ((words_[i] & other.words_[i]) != other.words_[i]) return false;
        return true;
    }

    bool any() const {
        for (auto w : words_)
            if (w) return true;
        return false;
    }

    int popcount() const {
        int c = 0;
        for (auto w : words_) c += __builtin_popcountll(w);
        return c;
    }

    bool operator==(const KeywordBitVector& other) const {
        return width_ == other.width_ && words_ == other.words_;
    }

    const std::vector<std::uint64_t>& words() const { return words_; }
    std::vector<std::uint64_t>& words() { return words_; }

private:
    int width_;
    std::vector<std::uint64_t> words_;
};

}  // namespace rics
