#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "graphy/graph/node_id.hpp"
#include "graphy/ingest/document.hpp"

namespace graphy::navigation {

struct ReferenceRecord {
  std::string raw;
  std::string normalized_title;
  graph::NodeId source_fact;
};

/// Builds a record; throws EmptyTitle when nothing survives normalization.
ReferenceRecord make_reference(std::string raw, const graph::NodeId& source_fact);

/// Document body fetched at most once, on first access, even under concurrency.
class LazyDocument {
 public:
  using Fetch = std::function<ingest::RawDocument()>;
  explicit LazyDocument(Fetch fetch) : fetch_(std::move(fetch)) {}
  const ingest::RawDocument& get();
  bool fetched() const noexcept { return done_.load(); }

 private:
  Fetch fetch_;
  std::once_flag once_;
  std::atomic<bool> done_{false};
  ingest::RawDocument doc_;
};

struct RepositoryHit {
  std::string repo_doc_id;
  std::string title;
  std::map<std::string, std::string> metadata;
  std::shared_ptr<LazyDocument> document;
};

struct Candidate {
  std::string repo_doc_id;
  std::string title;
  std::map<std::string, std::string> metadata;
};

/// A searchable document collection (fixture directory, open preprint server, ...).
class Repository {
 public:
  virtual ~Repository() = default;
  /// Titles that might match; the caller ranks them. Throws RepositoryUnavailable.
  virtual std::vector<Candidate> candidates(const ReferenceRecord& ref) const = 0;
  /// Downloads a document. Throws RepositoryUnavailable or IoFailure.
  virtual ingest::RawDocument fetch(const std::string& repo_doc_id) const = 0;
};

inline constexpr double kDefaultFuzzyThreshold = 0.92;

/// Exact normalized-title match first, else the most similar candidate with
/// similarity >= threshold; ties go to the smaller repo_doc_id. nullopt = NoMatch.
std::optional<RepositoryHit> resolve_reference(const ReferenceRecord& ref, const Repository& repo,
                                               double threshold = kDefaultFuzzyThreshold);

/// Directory of documents plus manifest.json:
/// [{"repo_doc_id", "title", "file", ...extra metadata}].
class FixtureRepository final : public Repository {
 public:
  explicit FixtureRepository(const std::filesystem::path& manifest);

  std::vector<Candidate> candidates(const ReferenceRecord& ref) const override;
  ingest::RawDocument fetch(const std::string& repo_doc_id) const override;

  std::size_t fetch_count() const noexcept { return fetches_.load(); }
  std::size_t size() const noexcept { return entries_.size(); }

 private:
  struct Entry {
    Candidate candidate;
    std::filesystem::path file;
  };
  std::vector<Entry> entries_;
  mutable std::atomic<std::size_t> fetches_{0};
};

struct LiveRepositoryConfig {
  std::string endpoint = "http://export.arxiv.org";
  std::chrono::milliseconds min_interval{3000};
  std::filesystem::path cache_dir;
  std::size_t max_results = 5;
};

/// Atom-feed title search plus PDF download against an arXiv-style API,
/// at most one request per min_interval. Throws ConfigError when GRAPHY_OFFLINE=1.
class LiveRepository final : public Repository {
 public:
  explicit LiveRepository(LiveRepositoryConfig config);

  std::vector<Candidate> candidates(const ReferenceRecord& ref) const override;
  ingest::RawDocument fetch(const std::string& repo_doc_id) const override;

  /// Parses an Atom search response into candidates.
  static std::vector<Candidate> parse_atom(const std::string& xml);

 private:
  std::string get(const std::string& path) const;

  LiveRepositoryConfig config_;
  mutable std::mutex mutex_;
  mutable std::chrono::steady_clock::time_point last_request_{};
};

}  // namespace graphy::navigation
