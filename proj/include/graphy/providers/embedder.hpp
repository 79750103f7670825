#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace graphy::providers {

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::string id() const = 0;
  virtual std::size_t dimension() const = 0;
  /// Unit-norm vector of dimension(). Throws ProviderFailure.
  virtual std::vector<double> embed(std::string_view text) const = 0;
};

/// Bag-of-tokens embedder: each token (see text::tokenize) is hashed with
/// FNV-1a 64 into one of `dimension` buckets; bucket counts are L2-normalized.
/// Text with no tokens hashes as a single pseudo-token of the raw bytes.
class HashEmbedder final : public Embedder {
 public:
  explicit HashEmbedder(std::size_t dimension = 64);

  std::string id() const override;
  std::size_t dimension() const override { return dimension_; }
  std::vector<double> embed(std::string_view text) const override;

  static std::uint64_t fnv1a(std::string_view bytes) noexcept;

 private:
  std::size_t dimension_;
};

}  // namespace graphy::providers
