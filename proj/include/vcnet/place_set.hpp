#pragma once

#include <bit>
#include <cassert>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace vcnet {

// Fixed-width set of indices backed by 64-bit words. Used for markings,
// presets/postsets and vertex sets alike.
class place_set
{
public:
    place_set() = default;
    explicit place_set(std::size_t width) : width_{width}, words_((width + 63) / 64, 0) {}

    [[nodiscard]] std::size_t width() const { return width_; }

    [[nodiscard]] bool test(std::size_t i) const
    {
        assert(i < width_);
        return (words_[i / 64] >> (i % 64)) & 1U;
    }
    void set(std::size_t i)
    {
        assert(i < width_);
        words_[i / 64] |= std::uint64_t{1} << (i % 64);
    }
    void reset(std::size_t i)
    {
        assert(i < width_);
        words_[i / 64] &= ~(std::uint64_t{1} << (i % 64));
    }
    void assign(std::size_t i, bool value) { value ? set(i) : reset(i); }

    [[nodiscard]] std::size_t count() const
    {
        std::size_t n = 0;
        for (auto w : words_)
            n += static_cast<std::size_t>(std::popcount(w));
        return n;
    }
    [[nodiscard]] bool none() const
    {
        for (auto w : words_)
            if (w != 0)
                return false;
        return true;
    }
    [[nodiscard]] bool any() const { return !none(); }

    [[nodiscard]] bool is_subset_of(const place_set& other) const
    {
        assert(width_ == other.width_);
        for (std::size_t k = 0; k < words_.size(); ++k)
            if ((words_[k] & ~other.words_[k]) != 0)
                return false;
        return true;
    }
    [[nodiscard]] bool intersects(const place_set& other) const
    {
        assert(width_ == other.width_);
        for (std::size_t k = 0; k < words_.size(); ++k)
            if ((words_[k] & other.words_[k]) != 0)
                return true;
        return false;
    }

    place_set& operator|=(const place_set& other)
    {
        assert(width_ == other.width_);
        for (std::size_t k = 0; k < words_.size(); ++k)
            words_[k] |= other.words_[k];
        return *this;
    }
    place_set& operator&=(const place_set& other)
    {
        assert(width_ == other.width_);
        for (std::size_t k = 0; k < words_.size(); ++k)
            words_[k] &= other.words_[k];
        return *this;
    }
    // set difference
    place_set& operator-=(const place_set& other)
    {
        assert(width_ == other.width_);
        for (std::size_t k = 0; k < words_.size(); ++k)
            words_[k] &= ~other.words_[k];
        return *this;
    }
    friend place_set operator|(place_set a, const place_set& b) { return a |= b; }
    friend place_set operator&(place_set a, const place_set& b) { return a &= b; }
    friend place_set operator-(place_set a, const place_set& b) { return a -= b; }

    friend bool operator==(const place_set& a, const place_set& b) = default;

    // Lexicographic order on the 0/1 vectors, index 0 most significant and
    // 0 < 1 at the first differing index.
    friend bool operator<(const place_set& a, const place_set& b)
    {
        assert(a.width_ == b.width_);
        for (std::size_t k = 0; k < a.words_.size(); ++k) {
            const auto diff = a.words_[k] ^ b.words_[k];
            if (diff != 0) {
                const auto bit = diff & (~diff + 1);
                return (b.words_[k] & bit) != 0;
            }
        }
        return false;
    }

    [[nodiscard]] std::vector<std::size_t> indices() const
    {
        std::vector<std::size_t> out;
        for (std::size_t k = 0; k < words_.size(); ++k) {
            auto w = words_[k];
            while (w != 0) {
                out.push_back(k * 64 + static_cast<std::size_t>(std::countr_zero(w)));
                w &= w - 1;
            }
        }
        return out;
    }

    template <typename F>
    void for_each(F&& f) const
    {
        for (std::size_t k = 0; k < words_.size(); ++k) {
            auto w = words_[k];
            while (w != 0) {
                f(k * 64 + static_cast<std::size_t>(std::countr_zero(w)));
                w &= w - 1;
            }
        }
    }

    [[nodiscard]] std::size_t hash() const
    {
        std::size_t h = 0xcbf29ce484222325ULL ^ width_;
        for (auto w : words_) {
            h ^= static_cast<std::size_t>(w);
            h *= 0x100000001b3ULL;
            h ^= h >> 29;
        }
        return h;
    }

private:
    std::size_t width_ = 0;
    std::vector<std::uint64_t> words_;
};

struct place_set_hash
{
    std::size_t operator()(const place_set& s) const { return s.hash(); }
};

using marking = place_set;

} // namespace vcnet
