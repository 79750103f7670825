#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "graphy/exploration/executor.hpp"

namespace graphy::exploration {

inline constexpr std::size_t kSampleIds = 10;
inline constexpr std::size_t kRealBins = 10;

struct HistogramBucket {
  BucketKey key;
  std::size_t count = 0;
  std::vector<NodeId> sample_ids;  // first kSampleIds members by id
  std::string fingerprint;         // of the population the bucket was computed on
};

struct Histogram {
  std::string attribute;
  std::vector<HistogramBucket> buckets;  // key ascending, "∅" last
  std::size_t population_size = 0;
  std::string fingerprint;
  QueryIR ir;  // the aggregate query that produced the counts
};

/// Hash over the population's ids and their `attribute` values.
std::string population_fingerprint(const std::vector<graph::Node>& nodes, const std::string& attribute);

/// One bucket per distinct value; real attributes use kRealBins equal-width
/// bins over the observed range. `population` must be a plain match+filters IR.
/// Throws UnknownAttribute, InvalidIR.
Histogram attribute_histogram(const graph::GraphStore& store, const QueryIR& population, const std::string& attribute);

/// The population members falling in `bucket`. Throws StaleBucket when the
/// population no longer hashes to the bucket's fingerprint.
std::vector<NodeId> filter_by_bucket(const graph::GraphStore& store, const QueryIR& population,
                                     const std::string& attribute, const HistogramBucket& bucket);

/// `population` narrowed to any of `keys`.
QueryIR bucket_query(const QueryIR& population, const std::string& attribute, std::vector<BucketKey> keys);

nlohmann::json to_json(const HistogramBucket& bucket);
nlohmann::json to_json(const Histogram& histogram);
HistogramBucket bucket_from_json(const nlohmann::json& j);  // throws InvalidParams

}  // namespace graphy::exploration
