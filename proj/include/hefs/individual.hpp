#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace hefs {

struct FitnessPair {
    double accuracy = 0.0;
    double complementarity = 0.0;

    friend bool operator==(const FitnessPair&, const FitnessPair&) = default;
};

/// Inclusion bitmask over the residual feature space.
class Mask {
public:
    Mask() = default;
    explicit Mask(std::size_t length) : bits_(length, 0) {}

    std::size_t size() const { return bits_.size(); }
    bool test(std::size_t i) const { return bits_[i] != 0; }
    void set(std::size_t i, bool on = true) { bits_[i] = on ? 1 : 0; }
    void flip(std::size_t i) { bits_[i] ^= 1; }

    std::size_t popcount() const;
    std::vector<std::size_t> ones() const;
    std::vector<std::size_t> zeros() const;

    friend bool operator==(const Mask&, const Mask&) = default;

    struct Hash {
        std::size_t operator()(const Mask& m) const;
    };

private:
    std::vector<std::uint8_t> bits_;
};

struct Individual {
    Mask mask;
    std::optional<FitnessPair> fitness;
};

}  // namespace hefs
