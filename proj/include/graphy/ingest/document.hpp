#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace graphy::ingest {

enum class DocumentKind { pdf, plaintext, structured_json };

std::string_view to_string(DocumentKind kind) noexcept;
std::optional<DocumentKind> parse_document_kind(std::string_view name) noexcept;

/// Guesses the kind from a file extension (.pdf, .json, anything else plaintext).
DocumentKind kind_for_path(const std::filesystem::path& path);

struct RawDocument {
  std::string doc_id;
  DocumentKind kind = DocumentKind::plaintext;
  std::string bytes;
  std::string source_uri;
};

struct ExtractedText {
  std::string text;  // UTF-8, page breaks as '\f'
  std::map<std::string, std::string> metadata;
};

/// Text-layer extraction backend for PDF bytes.
class PdfTextExtractor {
 public:
  virtual ~PdfTextExtractor() = default;
  virtual ExtractedText extract(std::string_view bytes) const = 0;
};

/// Reads the text layer of uncompressed or Flate-compressed content streams:
/// Tj/TJ/'/" operators, page order from the page tree. No OCR, no font
/// remapping (ToUnicode maps are ignored).
class MinimalPdfExtractor final : public PdfTextExtractor {
 public:
  ExtractedText extract(std::string_view bytes) const override;
};

/// Dispatches on the document kind. Throws UnsupportedKind or CorruptDocument.
ExtractedText extract_text(const RawDocument& doc, const PdfTextExtractor* pdf = nullptr);

/// Reads a file into a RawDocument; throws IoFailure.
RawDocument load_document(const std::filesystem::path& path, std::string doc_id = {});

}  // namespace graphy::ingest
