#include "graphy/navigation/repository.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <thread>

#include <boost/regex.hpp>
#include <httplib.h>
#include <json.hpp>

#include "graphy/error.hpp"
#include "graphy/navigation/title.hpp"
#include "graphy/providers/http_provider.hpp"
#include "graphy/text.hpp"

namespace graphy::navigation {

using nlohmann::json;

ReferenceRecord make_reference(std::string raw, const graph::NodeId& source_fact) {
  ReferenceRecord r;
  r.normalized_title = normalize_title(raw);
  if (r.normalized_title.empty()) fail(ErrorCode::EmptyTitle, "reference has no title text");
  r.raw = std::move(raw);
  r.source_fact = source_fact;
  return r;
}

const ingest::RawDocument& LazyDocument::get() {
  std::call_once(once_, [this] {
    doc_ = fetch_();
    done_ = true;
  });
  return doc_;
}

std::optional<RepositoryHit> resolve_reference(const ReferenceRecord& ref, const Repository& repo, double threshold) {
  const auto candidates = repo.candidates(ref);
  const Candidate* best = nullptr;
  double best_score = -1;
  bool best_exact = false;
  for (const auto& c : candidates) {
    const std::string norm = normalize_title(c.title);
    if (norm.empty()) continue;
    const bool exact = norm == ref.normalized_title;
    const double score = exact ? 1.0 : title_similarity(ref.normalized_title, norm);
    if (!exact && score < threshold) continue;
    const bool better = !best || (exact && !best_exact) ||
                        (exact == best_exact && (score > best_score ||
                                                 (score == best_score && c.repo_doc_id < best->repo_doc_id)));
    if (better) {
      best = &c;
      best_score = score;
      best_exact = exact;
    }
  }
  if (!best) return std::nullopt;
  RepositoryHit hit{best->repo_doc_id, best->title, best->metadata, nullptr};
  const std::string id = best->repo_doc_id;
  hit.document = std::make_shared<LazyDocument>([&repo, id] { return repo.fetch(id); });
  return hit;
}

FixtureRepository::FixtureRepository(const std::filesystem::path& manifest) {
  std::ifstream in(manifest);
  if (!in) fail(ErrorCode::ConfigError, "cannot read repository manifest " + manifest.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_array()) fail(ErrorCode::ConfigError, "repository manifest must be a JSON array");
  for (const auto& e : j) {
    if (!e.is_object() || !e.contains("repo_doc_id") || !e.contains("title") || !e.contains("file")) {
      fail(ErrorCode::ConfigError, "manifest entries need repo_doc_id, title and file");
    }
    Entry entry;
    entry.candidate.repo_doc_id = e["repo_doc_id"].get<std::string>();
    entry.candidate.title = e["title"].get<std::string>();
    entry.file = manifest.parent_path() / e["file"].get<std::string>();
    for (const auto& [k, v] : e.items()) {
      if (k == "repo_doc_id" || k == "file") continue;
      entry.candidate.metadata[k] = v.is_string() ? v.get<std::string>() : v.dump();
    }
    entries_.push_back(std::move(entry));
  }
}

std::vector<Candidate> FixtureRepository::candidates(const ReferenceRecord&) const {
  std::vector<Candidate> out;
  for (const auto& e : entries_) out.push_back(e.candidate);
  return out;
}

ingest::RawDocument FixtureRepository::fetch(const std::string& repo_doc_id) const {
  for (const auto& e : entries_) {
    if (e.candidate.repo_doc_id == repo_doc_id) {
      ++fetches_;
      return ingest::load_document(e.file, repo_doc_id);
    }
  }
  fail(ErrorCode::RepositoryUnavailable, "unknown repository document " + repo_doc_id);
}

LiveRepository::LiveRepository(LiveRepositoryConfig config) : config_(std::move(config)) {
  if (providers::offline_mode()) fail(ErrorCode::ConfigError, "GRAPHY_OFFLINE=1 disables the live repository");
  while (!config_.endpoint.empty() && config_.endpoint.back() == '/') config_.endpoint.pop_back();
}

namespace {

std::string percent_encode(std::string_view s) {
  static const char* kHex = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 15];
    }
  }
  return out;
}

std::string xml_unescape(std::string s) {
  const std::pair<const char*, const char*> entities[] = {
      {"&lt;", "<"}, {"&gt;", ">"}, {"&quot;", "\""}, {"&apos;", "'"}, {"&amp;", "&"}};
  for (const auto& [from, to] : entities) {
    std::string::size_type pos = 0;
    const std::string f(from);
    while ((pos = s.find(f, pos)) != std::string::npos) {
      s.replace(pos, f.size(), to);
      pos += std::char_traits<char>::length(to);
    }
  }
  return s;
}

std::string collapse(std::string_view s) {
  std::string out;
  bool space = false;
  for (char c : s) {
    if (c == ' ' || c == '\n' || c == '\t' || c == '\r') {
      space = !out.empty();
      continue;
    }
    if (space) out += ' ';
    space = false;
    out += c;
  }
  return out;
}

}  // namespace

std::vector<Candidate> LiveRepository::parse_atom(const std::string& xml) {
  static const boost::regex kEntry(R"(<entry>(.*?)</entry>)");
  static const boost::regex kId(R"(<id>\s*(?:https?://[^<]*/abs/)?([^<\s]+?)\s*</id>)");
  static const boost::regex kTitle(R"(<title[^>]*>(.*?)</title>)");
  static const boost::regex kPublished(R"(<published>\s*(\d{4})-)");
  std::vector<Candidate> out;
  for (boost::sregex_iterator it(xml.begin(), xml.end(), kEntry), end; it != end; ++it) {
    const std::string entry = (*it)[1].str();
    boost::smatch id, title, published;
    if (!boost::regex_search(entry, id, kId) || !boost::regex_search(entry, title, kTitle)) continue;
    Candidate c;
    c.repo_doc_id = id[1].str();
    c.title = collapse(xml_unescape(title[1].str()));
    c.metadata["title"] = c.title;
    if (boost::regex_search(entry, published, kPublished)) c.metadata["year"] = published[1].str();
    out.push_back(std::move(c));
  }
  return out;
}

std::string LiveRepository::get(const std::string& path) const {
  std::lock_guard lock(mutex_);
  const auto now = std::chrono::steady_clock::now();
  if (last_request_.time_since_epoch().count() != 0 && now - last_request_ < config_.min_interval) {
    std::this_thread::sleep_for(config_.min_interval - (now - last_request_));
  }
  httplib::Client client(config_.endpoint);
  client.set_follow_location(true);
  client.set_connection_timeout(20);
  client.set_read_timeout(60);
  auto res = client.Get(path);
  last_request_ = std::chrono::steady_clock::now();
  if (!res) fail(ErrorCode::RepositoryUnavailable, "repository transport error: " + httplib::to_string(res.error()));
  if (res->status != 200) fail(ErrorCode::RepositoryUnavailable, "repository returned HTTP " + std::to_string(res->status));
  return res->body;
}

std::vector<Candidate> LiveRepository::candidates(const ReferenceRecord& ref) const {
  std::string query = "ti:%22" + percent_encode(ref.normalized_title) + "%22";
  return parse_atom(get("/api/query?search_query=" + query + "&max_results=" + std::to_string(config_.max_results)));
}

ingest::RawDocument LiveRepository::fetch(const std::string& repo_doc_id) const {
  std::string safe = repo_doc_id;
  std::replace(safe.begin(), safe.end(), '/', '_');
  std::filesystem::path cached;
  if (!config_.cache_dir.empty()) {
    cached = config_.cache_dir / (safe + ".pdf");
    if (std::filesystem::exists(cached)) return ingest::load_document(cached, repo_doc_id);
  }
  ingest::RawDocument doc;
  doc.doc_id = repo_doc_id;
  doc.kind = ingest::DocumentKind::pdf;
  doc.bytes = get("/pdf/" + repo_doc_id);
  doc.source_uri = config_.endpoint + "/pdf/" + repo_doc_id;
  if (!cached.empty()) {
    std::filesystem::create_directories(config_.cache_dir);
    std::ofstream(cached, std::ios::binary) << doc.bytes;
  }
  return doc;
}

}  // namespace graphy::navigation
