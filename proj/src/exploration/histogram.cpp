#include "graphy/exploration/histogram.hpp"

#include <algorithm>
#include <cstdio>

#include "graphy/error.hpp"

namespace graphy::exploration {

using nlohmann::json;

namespace {

void require_population(const QueryIR& ir) {
  if (ir.aggregate || ir.sort || ir.limit) {
    fail(ErrorCode::InvalidIR, "a population query has no aggregate, sort or limit");
  }
}

void append_value(std::string& out, const PropertyValue& v) {
  auto text = [&](const std::string& t) {
    out += std::to_string(t.size());
    out += ':';
    out += t;
  };
  if (auto* t = std::get_if<std::string>(&v)) {
    out += 's';
    text(*t);
  } else if (auto* i = std::get_if<std::int64_t>(&v)) {
    out += 'i';
    out += std::to_string(*i);
  } else if (auto* d = std::get_if<double>(&v)) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "r%.17g", *d);
    out += buf;
  } else if (auto* b = std::get_if<bool>(&v)) {
    out += *b ? "b1" : "b0";
  } else {
    const auto& list = std::get<graph::TextList>(v);
    out += 'l';
    out += std::to_string(list.size());
    for (const auto& t : list) {
      out += ',';
      text(t);
    }
  }
}

// Population members carrying only `attribute`.
std::vector<graph::Node> projected(const graph::GraphStore& store, const QueryIR& ir, const std::string& attribute) {
  ir.validate(store.schema());
  std::vector<graph::Node> out;
  for_each_match(store, ir, [&](const graph::Node& node) {
    graph::Node light;
    light.id = node.id;
    light.label = node.label;
    light.kind = node.kind;
    if (auto it = node.properties.find(attribute); it != node.properties.end()) light.properties.emplace(*it);
    out.push_back(std::move(light));
  });
  return out;
}

}  // namespace

std::string population_fingerprint(const std::vector<graph::Node>& nodes, const std::string& attribute) {
  std::vector<const graph::Node*> sorted;
  sorted.reserve(nodes.size());
  for (const auto& n : nodes) sorted.push_back(&n);
  if (!std::is_sorted(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->id < b->id; })) {
    std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->id < b->id; });
  }
  std::string content = attribute;
  content.reserve(attribute.size() + nodes.size() * 48);
  for (const auto* n : sorted) {
    content += '\x1f';
    content += n->id.hex();
    content += '=';
    auto it = n->properties.find(attribute);
    if (it == n->properties.end()) {
      content += "null";
    } else {
      append_value(content, it->second);
    }
  }
  return NodeId::hash_of(content).hex();
}

QueryIR bucket_query(const QueryIR& population, const std::string& attribute, std::vector<BucketKey> keys) {
  QueryIR ir = population;
  ir.filters.push_back(Predicate::in_bucket(attribute, std::move(keys)));
  return ir;
}

Histogram attribute_histogram(const graph::GraphStore& store, const QueryIR& population_ir, const std::string& attribute) {
  require_population(population_ir);
  const auto schema = store.schema();
  population_ir.validate(schema);
  const auto* spec = schema.at(population_ir.match.label).find(attribute);
  if (!spec) fail(ErrorCode::UnknownAttribute, "label " + population_ir.match.label + " has no attribute " + attribute);
  const auto nodes = projected(store, population_ir, attribute);

  Histogram h;
  h.attribute = attribute;
  h.population_size = nodes.size();
  h.fingerprint = population_fingerprint(nodes, attribute);
  h.ir = population_ir;
  h.ir.aggregate = Aggregate{attribute, std::nullopt};
  if (spec->type == graph::ValueType::real) {
    std::optional<double> lo, hi;
    for (const auto& n : nodes) {
      auto it = n.properties.find(attribute);
      if (it == n.properties.end()) continue;
      const double x = std::holds_alternative<double>(it->second)
                           ? std::get<double>(it->second)
                           : static_cast<double>(std::get<std::int64_t>(it->second));
      lo = lo ? std::min(*lo, x) : x;
      hi = hi ? std::max(*hi, x) : x;
    }
    if (lo) h.ir.aggregate->bins = Bins{*lo, *hi, *lo == *hi ? std::size_t{1} : kRealBins};
  }
  for (const auto& g : group_nodes(nodes, *h.ir.aggregate)) {
    HistogramBucket b;
    if (!g.key) {
      b.key = BucketKey::missing_value();
    } else if (h.ir.aggregate->bins) {
      b.key = BucketKey::of_bin(*h.ir.aggregate->bins, static_cast<std::size_t>(std::get<std::int64_t>(*g.key)));
    } else {
      b.key = BucketKey::of(*g.key);
    }
    b.count = g.count;
    b.sample_ids.assign(g.members.begin(), g.members.begin() + std::min(g.members.size(), kSampleIds));
    b.fingerprint = h.fingerprint;
    h.buckets.push_back(std::move(b));
  }
  return h;
}

std::vector<NodeId> filter_by_bucket(const graph::GraphStore& store, const QueryIR& population_ir,
                                     const std::string& attribute, const HistogramBucket& bucket) {
  require_population(population_ir);
  const auto nodes = projected(store, population_ir, attribute);
  if (population_fingerprint(nodes, attribute) != bucket.fingerprint) {
    fail(ErrorCode::StaleBucket, "the population changed since the histogram was computed");
  }
  std::vector<NodeId> out;
  const auto in_bucket = Predicate::in_bucket(attribute, {bucket.key});
  for (const auto& n : nodes) {
    if (in_bucket.matches(n)) out.push_back(n.id);
  }
  return out;
}

json to_json(const HistogramBucket& bucket) {
  json samples = json::array();
  for (const auto& id : bucket.sample_ids) samples.push_back(id.hex());
  return json{{"key", to_json(bucket.key)},
              {"label", bucket.key.label()},
              {"count", bucket.count},
              {"sample_ids", samples},
              {"fingerprint", bucket.fingerprint}};
}

json to_json(const Histogram& histogram) {
  json buckets = json::array();
  for (const auto& b : histogram.buckets) buckets.push_back(to_json(b));
  return json{{"attribute", histogram.attribute},
              {"buckets", buckets},
              {"population_size", histogram.population_size},
              {"fingerprint", histogram.fingerprint}};
}

HistogramBucket bucket_from_json(const json& j) {
  if (!j.is_object() || !j.contains("key") || !j.contains("fingerprint") || !j["fingerprint"].is_string()) {
    fail(ErrorCode::InvalidParams, "a bucket needs its key and fingerprint");
  }
  HistogramBucket b;
  try {
    b.key = bucket_key_from_json(j["key"]);
  } catch (const Error& e) {
    fail(ErrorCode::InvalidParams, e.what());
  }
  b.fingerprint = j["fingerprint"].get<std::string>();
  b.count = j.value("count", std::size_t{0});
  if (j.contains("sample_ids") && j["sample_ids"].is_array()) {
    for (const auto& s : j["sample_ids"]) {
      if (s.is_string() && NodeId::is_valid_hex(s.get<std::string>())) b.sample_ids.push_back(NodeId::from_hex(s.get<std::string>()));
    }
  }
  return b;
}

}  // namespace graphy::exploration
