#include "graphy/ingest/document.hpp"

#include <fstream>
#include <iterator>

#include <json.hpp>

#include "graphy/error.hpp"
#include "graphy/text.hpp"

namespace graphy::ingest {

std::string_view to_string(DocumentKind kind) noexcept {
  switch (kind) {
    case DocumentKind::pdf: return "pdf";
    case DocumentKind::plaintext: return "plaintext";
    case DocumentKind::structured_json: return "structured-json";
  }
  return "plaintext";
}

std::optional<DocumentKind> parse_document_kind(std::string_view name) noexcept {
  if (name == "pdf") return DocumentKind::pdf;
  if (name == "plaintext" || name == "text") return DocumentKind::plaintext;
  if (name == "structured-json" || name == "json") return DocumentKind::structured_json;
  return std::nullopt;
}

DocumentKind kind_for_path(const std::filesystem::path& path) {
  const std::string ext = text::to_lower(path.extension().string());
  if (ext == ".pdf") return DocumentKind::pdf;
  if (ext == ".json") return DocumentKind::structured_json;
  return DocumentKind::plaintext;
}

namespace {

ExtractedText extract_structured(const std::string& bytes) {
  nlohmann::json doc = nlohmann::json::parse(bytes, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    fail(ErrorCode::CorruptDocument, "structured document is not a JSON object");
  }
  ExtractedText out;
  std::string title = doc.contains("title") && doc["title"].is_string() ? doc["title"].get<std::string>() : "";
  std::string body = doc.contains("body") && doc["body"].is_string() ? doc["body"].get<std::string>() : "";
  if (title.empty() && body.empty()) {
    fail(ErrorCode::CorruptDocument, "structured document has neither title nor body");
  }
  if (!title.empty() && !body.empty()) {
    out.text = title + "\n\n" + body;
  } else {
    out.text = title.empty() ? body : title;
  }
  for (const auto& [key, value] : doc.items()) {
    if (key == "body") continue;
    if (value.is_string()) {
      out.metadata[key] = value.get<std::string>();
    } else if (value.is_number() || value.is_boolean()) {
      out.metadata[key] = value.dump();
    }
  }
  return out;
}

}  // namespace

ExtractedText extract_text(const RawDocument& doc, const PdfTextExtractor* pdf) {
  switch (doc.kind) {
    case DocumentKind::plaintext:
      return ExtractedText{doc.bytes, {}};
    case DocumentKind::structured_json:
      return extract_structured(doc.bytes);
    case DocumentKind::pdf: {
      static const MinimalPdfExtractor kDefault;
      return (pdf ? *pdf : static_cast<const PdfTextExtractor&>(kDefault)).extract(doc.bytes);
    }
  }
  fail(ErrorCode::UnsupportedKind, "unsupported document kind");
}

RawDocument load_document(const std::filesystem::path& path, std::string doc_id) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoFailure, "cannot read document " + path.string());
  RawDocument doc;
  doc.bytes.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  doc.kind = kind_for_path(path);
  doc.doc_id = doc_id.empty() ? path.stem().string() : std::move(doc_id);
  doc.source_uri = path.string();
  return doc;
}

}  // namespace graphy::ingest
