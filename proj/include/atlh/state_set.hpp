#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace atlh {

using StateId = std::uint32_t;

/// Fixed-universe bitset over the states of one model.
class StateSet {
public:
    StateSet() = default;
    explicit StateSet(std::size_t universe) : size_(universe), words_((universe + 63) / 64, 0) {}

    static StateSet full(std::size_t universe) {
        StateSet s(universe);
        for (std::size_t i = 0; i < universe; ++i) s.insert(static_cast<StateId>(i));
        return s;
    }

    std::size_t universe() const noexcept { return size_; }

    bool contains(StateId q) const noexcept {
        return q < size_ && ((words_[q >> 6] >> (q & 63)) & 1u);
    }
    void insert(StateId q) noexcept { words_[q >> 6] |= std::uint64_t{1} << (q & 63); }
    void erase(StateId q) noexcept { words_[q >> 6] &= ~(std::uint64_t{1} << (q & 63)); }

    std::size_t count() const noexcept {
        std::size_t n = 0;
        for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
        return n;
    }
    bool empty() const noexcept {
        for (auto w : words_)
            if (w) return false;
        return true;
    }

    bool subset_of(const StateSet& o) const noexcept {
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & ~o.words_[i]) return false;
        return true;
    }
    bool intersects(const StateSet& o) const noexcept {
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & o.words_[i]) return true;
        return false;
    }

    StateSet& operator|=(const StateSet& o) noexcept {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
        return *this;
    }
    StateSet& operator&=(const StateSet& o) noexcept {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
        return *this;
    }
    StateSet& subtract(const StateSet& o) noexcept {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~o.words_[i];
        return *this;
    }
    StateSet complement() const {
        StateSet r(size_);
        for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] = ~words_[i];
        r.trim();
        return r;
    }

    friend StateSet operator|(StateSet a, const StateSet& b) { return a |= b; }
    friend StateSet operator&(StateSet a, const StateSet& b) { return a &= b; }
    friend bool operator==(const StateSet&, const StateSet&) = default;

    /// Members in ascending order.
    std::vector<StateId> members() const {
        std::vector<StateId> out;
        for_each([&](StateId q) { out.push_back(q); });
        return out;
    }

    template <typename Fn>
    void for_each(Fn&& fn) const {
        for (std::size_t i = 0; i < words_.size(); ++i) {
            std::uint64_t w = words_[i];
            while (w) {
                int b = std::countr_zero(w);
                fn(static_cast<StateId>(i * 64 + static_cast<std::size_t>(b)));
                w &= w - 1;
            }
        }
    }

    std::size_t hash() const noexcept {
        std::size_t h = size_;
        for (auto w : words_) h ^= std::hash<std::uint64_t>{}(w) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        return h;
    }

private:
    void trim() noexcept {
        if (size_ % 64 && !words_.empty()) words_.back() &= (std::uint64_t{1} << (size_ % 64)) - 1;
    }

    std::size_t size_ = 0;
    std::vector<std::uint64_t> words_;
};

} // namespace atlh

template <>
struct std::hash<atlh::StateSet> {
    std::size_t operator()(const atlh::StateSet& s) const noexcept { return s.hash(); }
};
