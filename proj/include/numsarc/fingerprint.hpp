#pragma once

#include <cstdint>
#include <cstring>
#include <iomanip>
#include <sstream>
#include <span>
#include <string>
#include <string_view>

namespace numsarc {

/// Streaming 64-bit FNV-1a, used for config/table/model fingerprints.
class Fingerprint {
 public:
  Fingerprint& add(std::string_view bytes) {
    for (unsigned char c : bytes) {
      state_ ^= c;
      state_ *= 0x100000001B3ULL;
    }
    // Length separator so ("ab","c") and ("a","bc") differ.
    add_raw(bytes.size());
    return *this;
  }

  Fingerprint& add(double value) {
    if (value == 0.0) value = 0.0;  // fold -0.0
    return add_raw(value);
  }

  Fingerprint& add(std::int64_t value) { return add_raw(value); }
  Fingerprint& add(std::uint64_t value) { return add_raw(value); }
  Fingerprint& add(int value) { return add_raw(static_cast<std::int64_t>(value)); }

  Fingerprint& add(std::span<const double> values) {
    add_raw(static_cast<std::uint64_t>(values.size()));
    for (double v : values) add(v);
    return *this;
  }

  std::uint64_t value() const { return state_; }

  std::string hex() const {
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << state_;
    return out.str();
  }

 private:
  template <typename T>
  Fingerprint& add_raw(T value) {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    for (unsigned char c : bytes) {
      state_ ^= c;
      state_ *= 0x100000001B3ULL;
    }
    return *this;
  }

  std::uint64_t state_ = 0xCBF29CE484222325ULL;
};

}  // namespace numsarc
