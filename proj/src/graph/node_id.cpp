#include "graphy/graph/node_id.hpp"

#include <sodium.h>

#include <array>
#include <mutex>

#include "graphy/error.hpp"

namespace graphy::graph {

namespace {

void ensure_sodium() {
  static std::once_flag once;
  std::call_once(once, [] {
    if (sodium_init() < 0) {
      throw std::runtime_error("libsodium initialization failed");
    }
  });
}

}  // namespace

NodeId NodeId::hash_of(std::string_view content) {
  ensure_sodium();
  std::array<unsigned char, 16> digest{};
  crypto_generichash(digest.data(), digest.size(),
                     reinterpret_cast<const unsigned char*>(content.data()),
                     content.size(), nullptr, 0);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(32);
  for (unsigned char byte : digest) {
    hex.push_back(kHex[byte >> 4]);
    hex.push_back(kHex[byte & 0x0f]);
  }
  return NodeId(std::move(hex));
}

bool NodeId::is_valid_hex(std::string_view hex) noexcept {
  if (hex.size() != 32) return false;
  for (char c : hex) {
    bool digit = c >= '0' && c <= '9';
    bool lower = c >= 'a' && c <= 'f';
    if (!digit && !lower) return false;
  }
  return true;
}

NodeId NodeId::from_hex(std::string_view hex) {
  if (!is_valid_hex(hex)) {
    fail(ErrorCode::InvalidParams, "malformed node id '" + std::string(hex) + "'");
  }
  return NodeId(std::string(hex));
}

}  // namespace graphy::graph
