// Copyright 2026 The compass-coherence Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef COMPASS_F2_H
#define COMPASS_F2_H

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace compass {

/// Fixed-length vector over F2, packed into 64-bit words.
///
/// Bits past `size()` in the last word are always zero, so word-wise
/// comparisons and popcounts never need masking.
class BitVector {
   public:
    BitVector() = default;
    explicit BitVector(size_t num_bits) : num_bits_(num_bits), words_((num_bits + 63) / 64, 0) {
    }

    static BitVector from_str(std::string_view bits) {
        BitVector result(bits.size());
        for (size_t k = 0; k < bits.size(); k++) {
            if (bits[k] == '1') {
                result.set(k);
            } else if (bits[k] != '0') {
                throw std::invalid_argument("bit-string may only contain '0' and '1', got '" + std::string(bits) + "'");
            }
        }
        return result;
    }

    static BitVector from_indices(size_t num_bits, std::span<const size_t> indices) {
        BitVector result(num_bits);
        for (size_t k : indices) {
            result.set(k);
        }
        return result;
    }

    /// Low `num_bits` bits of `mask`, bit k of the mask becoming entry k.
    static BitVector from_mask(size_t num_bits, uint64_t mask) {
        if (num_bits > 64) {
            throw std::invalid_argument("from_mask supports at most 64 bits");
        }
        BitVector result(num_bits);
        if (num_bits > 0) {
            result.words_[0] = num_bits == 64 ? mask : mask & ((uint64_t{1} << num_bits) - 1);
        }
        return result;
    }

    size_t size() const {
        return num_bits_;
    }

    bool operator[](size_t k) const {
        return (words_[k >> 6] >> (k & 63)) & 1;
    }

    void set(size_t k, bool value = true) {
        uint64_t bit = uint64_t{1} << (k & 63);
        if (value) {
            words_[k >> 6] |= bit;
        } else {
            words_[k >> 6] &= ~bit;
        }
    }

    void flip(size_t k) {
        words_[k >> 6] ^= uint64_t{1} << (k & 63);
    }

    size_t popcount() const {
        size_t total = 0;
        for (uint64_t w : words_) {
            total += std::popcount(w);
        }
        return total;
    }

    bool any() const {
        for (uint64_t w : words_) {
            if (w) {
                return true;
            }
        }
        return false;
    }

    /// Size of the intersection of the two supports.
    size_t overlap(const BitVector &other) const {
        check_same_size(other);
        size_t total = 0;
        for (size_t k = 0; k < words_.size(); k++) {
            total += std::popcount(words_[k] & other.words_[k]);
        }
        return total;
    }

    BitVector &operator^=(const BitVector &other) {
        check_same_size(other);
        for (size_t k = 0; k < words_.size(); k++) {
            words_[k] ^= other.words_[k];
        }
        return *this;
    }

    BitVector &operator&=(const BitVector &other) {
        check_same_size(other);
        for (size_t k = 0; k < words_.size(); k++) {
            words_[k] &= other.words_[k];
        }
        return *this;
    }

    BitVector &operator|=(const BitVector &other) {
        check_same_size(other);
        for (size_t k = 0; k < words_.size(); k++) {
            words_[k] |= other.words_[k];
        }
        return *this;
    }

    friend BitVector operator^(BitVector a, const BitVector &b) {
        return a ^= b;
    }
    friend BitVector operator&(BitVector a, const BitVector &b) {
        return a &= b;
    }
    friend BitVector operator|(BitVector a, const BitVector &b) {
        return a |= b;
    }
    friend bool operator==(const BitVector &a, const BitVector &b) = default;

    /// Index of the lowest set bit, or `size()` when empty.
    size_t first_one() const {
        for (size_t k = 0; k < words_.size(); k++) {
            if (words_[k]) {
                return k * 64 + std::countr_zero(words_[k]);
            }
        }
        return num_bits_;
    }

    std::vector<size_t> ones() const {
        std::vector<size_t> result;
        for (size_t k = 0; k < words_.size(); k++) {
            uint64_t w = words_[k];
            while (w) {
                result.push_back(k * 64 + std::countr_zero(w));
                w &= w - 1;
            }
        }
        return result;
    }

    /// Bits as a 64-bit mask (entry k -> bit k). Requires size() <= 64.
    uint64_t to_mask() const {
        if (num_bits_ > 64) {
            throw std::invalid_argument("to_mask supports at most 64 bits");
        }
        return words_.empty() ? 0 : words_[0];
    }

    /// Entry 0 first, e.g. "0110".
    std::string str() const {
        std::string result(num_bits_, '0');
        for (size_t k = 0; k < num_bits_; k++) {
            if ((*this)[k]) {
                result[k] = '1';
            }
        }
        return result;
    }

    std::span<const uint64_t> words() const {
        return words_;
    }

   private:
    void check_same_size(const BitVector &other) const {
        if (num_bits_ != other.num_bits_) {
            throw std::invalid_argument(
                "bit-vector size mismatch: " + std::to_string(num_bits_) + " vs " + std::to_string(other.num_bits_));
        }
    }

    size_t num_bits_ = 0;
    std::vector<uint64_t> words_;
};

/// Incrementally built row-reduced basis of a subspace of F2^n.
///
/// Each stored row owns a pivot bit that no other stored row has set, so
/// membership is a single elimination sweep.
class F2RowBasis {
   public:
    explicit F2RowBasis(size_t num_bits) : num_bits_(num_bits) {
    }

    /// Adds `row` to the spanning set. Returns false if it was already in the span.
    bool insert(BitVector row) {
        row = reduce(std::move(row));
        size_t pivot = row.first_one();
        if (pivot == num_bits_) {
            return false;
        }
        for (auto &[p, r] : rows_) {
            if (r[pivot]) {
                r ^= row;
            }
        }
        rows_.push_back({pivot, std::move(row)});
        return true;
    }

    /// Remainder of `v` after eliminating every stored pivot.
    BitVector reduce(BitVector v) const {
        for (const auto &[p, r] : rows_) {
            if (v[p]) {
                v ^= r;
            }
        }
        return v;
    }

    bool contains(const BitVector &v) const {
        return !reduce(v).any();
    }

    size_t rank() const {
        return rows_.size();
    }

   private:
    struct PivotRow {
        size_t pivot;
        BitVector row;
    };
    size_t num_bits_;
    std::vector<PivotRow> rows_;
};

inline size_t f2_rank(std::span<const BitVector> rows, size_t num_bits) {
    F2RowBasis basis(num_bits);
    for (const auto &r : rows) {
        basis.insert(r);
    }
    return basis.rank();
}

}  // namespace compass

#endif  // COMPASS_F2_H
