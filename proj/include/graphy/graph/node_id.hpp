#pragma once

#include <compare>
#include <functional>
#include <string>
#include <string_view>

namespace graphy::graph {

/// 16-byte content hash rendered as 32 lowercase hex characters.
class NodeId {
 public:
  NodeId() = default;

  /// BLAKE2b-128 of `content`.
  static NodeId hash_of(std::string_view content);

  /// Parses an existing hex rendering; throws InvalidParams on malformed input.
  static NodeId from_hex(std::string_view hex);

  static bool is_valid_hex(std::string_view hex) noexcept;

  const std::string& hex() const noexcept { return hex_; }
  bool empty() const noexcept { return hex_.empty(); }

  friend auto operator<=>(const NodeId&, const NodeId&) = default;

 private:
  explicit NodeId(std::string hex) : hex_(std::move(hex)) {}
  std::string hex_;
};

}  // namespace graphy::graph

template <>
struct std::hash<graphy::graph::NodeId> {
  std::size_t operator()(const graphy::graph::NodeId& id) const noexcept {
    return std::hash<std::string>{}(id.hex());
  }
};
