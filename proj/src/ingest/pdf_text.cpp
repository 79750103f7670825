#include <zlib.h>

#include <map>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "graphy/error.hpp"
#include "graphy/ingest/document.hpp"
#include "graphy/text.hpp"

namespace graphy::ingest {

namespace {

struct PdfObject {
  std::string dict;
  std::optional<std::string> stream;
};

bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\0'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_delim(char c) {
  return c == '(' || c == ')' || c == '<' || c == '>' || c == '[' || c == ']' || c == '{' ||
         c == '}' || c == '/' || c == '%';
}

std::string inflate_stream(std::string_view data) {
  z_stream zs{};
  if (inflateInit(&zs) != Z_OK) fail(ErrorCode::CorruptDocument, "zlib init failed");
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  zs.avail_in = static_cast<uInt>(data.size());
  std::string out;
  char buffer[16384];
  int rc = Z_OK;
  while (rc != Z_STREAM_END) {
    zs.next_out = reinterpret_cast<Bytef*>(buffer);
    zs.avail_out = sizeof(buffer);
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&zs);
      // Truncated streams still yield whatever decoded cleanly.
      if (!out.empty()) return out;
      fail(ErrorCode::CorruptDocument, "cannot inflate PDF stream");
    }
    out.append(buffer, sizeof(buffer) - zs.avail_out);
    if (rc == Z_OK && zs.avail_in == 0 && zs.avail_out != 0) break;
  }
  inflateEnd(&zs);
  return out;
}

std::optional<long> direct_int_after(const std::string& dict, const std::string& key) {
  auto pos = dict.find(key);
  if (pos == std::string::npos) return std::nullopt;
  pos += key.size();
  while (pos < dict.size() && is_ws(dict[pos])) ++pos;
  std::size_t end = pos;
  while (end < dict.size() && is_digit(dict[end])) ++end;
  if (end == pos) return std::nullopt;
  // "12 0 R" is an indirect reference, not a direct value.
  std::size_t after = end;
  while (after < dict.size() && is_ws(dict[after])) ++after;
  std::size_t gen_end = after;
  while (gen_end < dict.size() && is_digit(dict[gen_end])) ++gen_end;
  if (gen_end > after) {
    std::size_t r = gen_end;
    while (r < dict.size() && is_ws(dict[r])) ++r;
    if (r < dict.size() && dict[r] == 'R') return std::nullopt;
  }
  return std::stol(dict.substr(pos, end - pos));
}

std::map<int, PdfObject> parse_objects(std::string_view bytes) {
  std::map<int, PdfObject> objects;
  std::size_t pos = 0;
  while (true) {
    std::size_t hit = bytes.find("obj", pos);
    if (hit == std::string_view::npos) break;
    pos = hit + 3;
    if (hit >= 1 && !is_ws(bytes[hit - 1])) continue;
    if (pos < bytes.size() && !is_ws(bytes[pos]) && !is_delim(bytes[pos])) continue;
    // Walk back over "<num> <gen> ".
    std::size_t i = hit;
    while (i > 0 && is_ws(bytes[i - 1])) --i;
    std::size_t gen_end = i;
    while (i > 0 && is_digit(bytes[i - 1])) --i;
    if (i == gen_end) continue;
    while (i > 0 && is_ws(bytes[i - 1])) --i;
    std::size_t num_end = i;
    while (i > 0 && is_digit(bytes[i - 1])) --i;
    if (i == num_end) continue;
    int number = std::stoi(std::string(bytes.substr(i, num_end - i)));

    std::size_t end = bytes.find("endobj", pos);
    if (end == std::string_view::npos) end = bytes.size();
    std::string_view body = bytes.substr(pos, end - pos);
    PdfObject obj;
    std::size_t stream_kw = body.find("stream");
    if (stream_kw != std::string_view::npos &&
        (stream_kw < 3 || body.substr(stream_kw - 3, 3) != "end")) {
      obj.dict = std::string(body.substr(0, stream_kw));
      std::size_t data_start = stream_kw + 6;
      if (data_start < body.size() && body[data_start] == '\r') ++data_start;
      if (data_start < body.size() && body[data_start] == '\n') ++data_start;
      std::size_t data_end = body.find("endstream", data_start);
      if (data_end == std::string_view::npos) data_end = body.size();
      if (auto len = direct_int_after(obj.dict, "/Length");
          len && *len >= 0 && data_start + static_cast<std::size_t>(*len) <= data_end) {
        data_end = data_start + static_cast<std::size_t>(*len);
      } else {
        while (data_end > data_start && (body[data_end - 1] == '\n' || body[data_end - 1] == '\r')) {
          --data_end;
        }
      }
      std::string data(body.substr(data_start, data_end - data_start));
      if (obj.dict.find("/FlateDecode") != std::string::npos) data = inflate_stream(data);
      obj.stream = std::move(data);
    } else {
      obj.dict = std::string(body);
    }
    objects[number] = std::move(obj);
    pos = end;
  }
  return objects;
}

bool has_type(const std::string& dict, const std::string& type) {
  static const std::regex kType(R"(/Type\s*/([A-Za-z]+))");
  for (auto it = std::sregex_iterator(dict.begin(), dict.end(), kType); it != std::sregex_iterator();
       ++it) {
    if ((*it)[1] == type) return true;
  }
  return false;
}

std::vector<int> refs_in(const std::string& s) {
  static const std::regex kRef(R"((\d+)\s+\d+\s+R)");
  std::vector<int> out;
  for (auto it = std::sregex_iterator(s.begin(), s.end(), kRef); it != std::sregex_iterator(); ++it) {
    out.push_back(std::stoi((*it)[1]));
  }
  return out;
}

std::vector<int> refs_for_key(const std::string& dict, const std::string& key) {
  auto pos = dict.find(key);
  if (pos == std::string::npos) return {};
  pos += key.size();
  while (pos < dict.size() && is_ws(dict[pos])) ++pos;
  if (pos < dict.size() && dict[pos] == '[') {
    auto close = dict.find(']', pos);
    return refs_in(dict.substr(pos, close == std::string::npos ? std::string::npos : close - pos));
  }
  static const std::regex kRef(R"(^(\d+)\s+\d+\s+R)");
  std::smatch m;
  std::string rest = dict.substr(pos, 32);
  if (std::regex_search(rest, m, kRef)) return {std::stoi(m[1])};
  return {};
}

void collect_pages(const std::map<int, PdfObject>& objects, int ref, std::vector<int>& pages,
                   std::set<int>& visited) {
  if (!visited.insert(ref).second) return;
  auto it = objects.find(ref);
  if (it == objects.end()) return;
  if (has_type(it->second.dict, "Page")) {
    pages.push_back(ref);
    return;
  }
  for (int kid : refs_for_key(it->second.dict, "/Kids")) collect_pages(objects, kid, pages, visited);
}

std::string latin1_to_utf8(std::string_view s) {
  std::string out;
  for (unsigned char c : s) {
    if (c < 0x80) {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back(static_cast<char>(0xC0 | (c >> 6)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    }
  }
  return out;
}

// Content-stream interpreter limited to the text-showing operators.
class ContentText {
 public:
  std::string run(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size()) {
      char c = s[i];
      if (is_ws(c)) {
        ++i;
      } else if (c == '%') {
        while (i < s.size() && s[i] != '\n' && s[i] != '\r') ++i;
      } else if (c == '(') {
        push(Operand{read_literal(s, i)});
      } else if (c == '<' && i + 1 < s.size() && s[i + 1] == '<') {
        skip_dict(s, i);
      } else if (c == '<') {
        push(Operand{read_hex(s, i)});
      } else if (c == '[') {
        ++i;
        in_array_ = true;
        array_.clear();
      } else if (c == ']') {
        ++i;
        in_array_ = false;
        stack_.push_back(Operand{array_});
      } else if (c == '/') {
        ++i;
        while (i < s.size() && !is_ws(s[i]) && !is_delim(s[i])) ++i;
        push(Operand{std::string{}}, true);
      } else if (is_digit(c) || c == '-' || c == '+' || c == '.') {
        std::size_t b = i++;
        while (i < s.size() && (is_digit(s[i]) || s[i] == '.')) ++i;
        double v = 0;
        try {
          v = std::stod(std::string(s.substr(b, i - b)));
        } catch (...) {
        }
        push(Operand{v});
      } else {
        std::size_t b = i;
        while (i < s.size() && !is_ws(s[i]) && !is_delim(s[i])) ++i;
        if (i == b) ++i;
        op(s.substr(b, i - b));
      }
    }
    return finish();
  }

 private:
  using Array = std::vector<std::variant<std::string, double>>;
  struct Operand {
    std::variant<std::string, double, Array> value;
  };

  void push(Operand o, bool is_name = false) {
    if (in_array_) {
      if (auto* str = std::get_if<std::string>(&o.value); str && !is_name) array_.push_back(*str);
      if (auto* num = std::get_if<double>(&o.value)) array_.push_back(*num);
      return;
    }
    stack_.push_back(std::move(o));
  }

  static std::string read_literal(std::string_view s, std::size_t& i) {
    std::string out;
    int depth = 0;
    ++i;
    while (i < s.size()) {
      char c = s[i++];
      if (c == '\\' && i < s.size()) {
        char e = s[i++];
        switch (e) {
          case 'n': out += '\n'; break;
          case 'r': out += '\r'; break;
          case 't': out += '\t'; break;
          case 'b': out += '\b'; break;
          case 'f': out += '\f'; break;
          case '\r':
            if (i < s.size() && s[i] == '\n') ++i;
            break;
          case '\n': break;
          default:
            if (e >= '0' && e <= '7') {
              int v = e - '0';
              for (int k = 0; k < 2 && i < s.size() && s[i] >= '0' && s[i] <= '7'; ++k) {
                v = v * 8 + (s[i++] - '0');
              }
              out += static_cast<char>(v);
            } else {
              out += e;
            }
        }
      } else if (c == '(') {
        ++depth;
        out += c;
      } else if (c == ')') {
        if (depth == 0) break;
        --depth;
        out += c;
      } else {
        out += c;
      }
    }
    return out;
  }

  static std::string read_hex(std::string_view s, std::size_t& i) {
    ++i;
    std::string digits;
    while (i < s.size() && s[i] != '>') {
      if (!is_ws(s[i])) digits += s[i];
      ++i;
    }
    ++i;
    if (digits.size() % 2) digits += '0';
    std::string out;
    for (std::size_t k = 0; k + 1 < digits.size(); k += 2) {
      out += static_cast<char>(std::stoi(digits.substr(k, 2), nullptr, 16));
    }
    return out;
  }

  static void skip_dict(std::string_view s, std::size_t& i) {
    int depth = 0;
    while (i < s.size()) {
      if (s.compare(i, 2, "<<") == 0) {
        ++depth;
        i += 2;
      } else if (s.compare(i, 2, ">>") == 0) {
        i += 2;
        if (--depth == 0) return;
      } else {
        ++i;
      }
    }
  }

  const std::string* last_string() const {
    if (stack_.empty()) return nullptr;
    return std::get_if<std::string>(&stack_.back().value);
  }

  double number_at(std::size_t from_end) const {
    if (stack_.size() <= from_end) return 0;
    const auto* v = std::get_if<double>(&stack_[stack_.size() - 1 - from_end].value);
    return v ? *v : 0;
  }

  void newline() {
    if (!line_.empty()) {
      lines_.push_back(text::trim(line_));
      line_.clear();
    }
  }

  void show(const std::string& s) { line_ += latin1_to_utf8(s); }

  void op(std::string_view name) {
    if (name == "Tj") {
      if (const auto* s = last_string()) show(*s);
    } else if (name == "'" || name == "\"") {
      newline();
      if (const auto* s = last_string()) show(*s);
    } else if (name == "TJ") {
      if (!stack_.empty()) {
        if (const auto* arr = std::get_if<Array>(&stack_.back().value)) {
          for (const auto& item : *arr) {
            if (const auto* str = std::get_if<std::string>(&item)) {
              show(*str);
            } else if (std::get<double>(item) < -200 && !line_.empty() && line_.back() != ' ') {
              line_ += ' ';
            }
          }
        }
      }
    } else if (name == "T*" || name == "ET") {
      newline();
    } else if (name == "Td" || name == "TD") {
      if (number_at(0) != 0) newline();
    } else if (name == "Tm") {
      double y = number_at(0);
      if (last_y_ && *last_y_ != y) newline();
      last_y_ = y;
    }
    stack_.clear();
  }

  std::string finish() {
    newline();
    std::string out;
    for (const auto& line : lines_) {
      if (line.empty()) continue;
      if (!out.empty()) out += '\n';
      out += line;
    }
    return out;
  }

  std::vector<Operand> stack_;
  Array array_;
  bool in_array_ = false;
  std::string line_;
  std::vector<std::string> lines_;
  std::optional<double> last_y_;
};

}  // namespace

ExtractedText MinimalPdfExtractor::extract(std::string_view bytes) const {
  std::size_t header = bytes.find("%PDF-");
  if (bytes.empty() || header == std::string_view::npos || header > 1024) {
    fail(ErrorCode::CorruptDocument, "not a PDF document");
  }
  auto objects = parse_objects(bytes);

  std::vector<int> pages;
  std::set<int> visited;
  for (const auto& [num, obj] : objects) {
    if (!has_type(obj.dict, "Catalog")) continue;
    for (int root : refs_for_key(obj.dict, "/Pages")) collect_pages(objects, root, pages, visited);
    break;
  }
  if (pages.empty()) {
    for (const auto& [num, obj] : objects) {
      if (has_type(obj.dict, "Page")) pages.push_back(num);
    }
  }
  if (pages.empty()) fail(ErrorCode::CorruptDocument, "PDF has no pages");

  ExtractedText result;
  for (std::size_t p = 0; p < pages.size(); ++p) {
    if (p) result.text += '\f';
    const PdfObject& page = objects.at(pages[p]);
    std::string content;
    for (int ref : refs_for_key(page.dict, "/Contents")) {
      auto it = objects.find(ref);
      if (it == objects.end()) continue;
      if (it->second.stream) {
        content += *it->second.stream;
        content += '\n';
      } else {
        // Contents may point at an array object of streams.
        for (int inner : refs_in(it->second.dict)) {
          auto in = objects.find(inner);
          if (in != objects.end() && in->second.stream) {
            content += *in->second.stream;
            content += '\n';
          }
        }
      }
    }
    result.text += ContentText{}.run(content);
  }
  result.metadata["page_count"] = std::to_string(pages.size());
  return result;
}

}  // namespace graphy::ingest
