#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace lhvt {

// MSB-first bit packing; shared by the naive wire format and the block coder.
class BitWriter {
public:
    void put(int bit) {
        if (shift_ == 0) {
            bytes_.push_back(0);
            shift_ = 8;
        }
        --shift_;
        if (bit) bytes_.back() |= static_cast<std::uint8_t>(1u << shift_);
        ++count_;
    }

    void put_byte(std::uint8_t b) {
        for (int i = 7; i >= 0; --i) put((b >> i) & 1);
    }

    std::size_t bit_count() const { return count_; }
    const std::vector<std::uint8_t>& bytes() const { return bytes_; }
    std::vector<std::uint8_t> take() { return std::move(bytes_); }

private:
    std::vector<std::uint8_t> bytes_;
    std::size_t count_ = 0;
    unsigned shift_ = 0;
};

class BitReader {
public:
    BitReader(const std::uint8_t* data, std::size_t bit_count)
        : data_(data), bit_count_(bit_count) {}

    // Reads the next bit; past the end it yields zeros and counts the overrun
    // (arithmetic decoding legitimately looks a few bits past the payload).
    int get() {
        if (pos_ >= bit_count_) {
            ++overrun_;
            ++pos_;
            return 0;
        }
        std::size_t byte = pos_ >> 3;
        unsigned shift = 7u - (pos_ & 7u);
        ++pos_;
        return (data_[byte] >> shift) & 1;
    }

    std::uint8_t get_byte() {
        std::uint8_t b = 0;
        for (int i = 0; i < 8; ++i) b = static_cast<std::uint8_t>((b << 1) | get());
        return b;
    }

    std::size_t position() const { return pos_; }
    std::size_t overrun() const { return overrun_; }

private:
    const std::uint8_t* data_;
    std::size_t bit_count_;
    std::size_t pos_ = 0;
    std::size_t overrun_ = 0;
};

}  // namespace lhvt
