#include "graphy/providers/embedder.hpp"

#include <cmath>
#include <cstdint>

#include "graphy/error.hpp"
#include "graphy/text.hpp"

namespace graphy::providers {

HashEmbedder::HashEmbedder(std::size_t dimension) : dimension_(dimension) {
  if (dimension_ == 0) fail(ErrorCode::InvalidParams, "embedding dimension must be positive");
}

std::string HashEmbedder::id() const { return "hash-" + std::to_string(dimension_); }

std::uint64_t HashEmbedder::fnv1a(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<double> HashEmbedder::embed(std::string_view input) const {
  if (input.empty()) fail(ErrorCode::ProviderFailure, "cannot embed empty text");
  std::vector<double> v(dimension_, 0.0);
  auto tokens = text::tokenize(input);
  if (tokens.empty()) {
    v[fnv1a(input) % dimension_] = 1.0;
    return v;
  }
  for (const auto& token : tokens) v[fnv1a(token) % dimension_] += 1.0;
  double norm = 0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  return v;
}

}  // namespace graphy::providers
