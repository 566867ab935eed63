#include "metaviz/io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace metaviz {

static_assert(std::endian::native == std::endian::little,
              "binary distance format assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'M', 'V', 'D', 'M'};

std::string format_double(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value,
                                    std::chars_format::general, 17);
  return std::string(buffer, result.ptr);
}

bool parse_double(std::string_view field, double& out) {
  const char* begin = field.data();
  const char* end = begin + field.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (*(end - 1) == ' ' || *(end - 1) == '\t')) --end;
  if (begin == end) return false;
  const auto result = std::from_chars(begin, end, out);
  return result.ec == std::errc() && result.ptr == end;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  size_t start = 0;
  while (true) {
    const size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    fail(ErrorCode::FileNotFound, "cannot open '" + path + "'");
  }
  return in;
}

std::ofstream open_output(const std::string& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) {
    fail(ErrorCode::WriteError, "cannot write '" + path + "'");
  }
  return out;
}

Matrix read_numeric_csv(const std::string& path, bool allow_header,
                        std::vector<std::string>* header) {
  std::ifstream in = open_input(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  Index columns = -1;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = strip_cr(line);
    if (view.empty()) continue;
    const auto fields = split_fields(view);
    std::vector<double> values(fields.size());
    bool numeric = true;
    for (size_t f = 0; f < fields.size(); ++f) {
      if (!parse_double(fields[f], values[f])) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (allow_header && first_content) {
        if (header != nullptr) {
          header->clear();
          for (const auto& field : fields) header->emplace_back(field);
        }
        first_content = false;
        continue;
      }
      fail(ErrorCode::ParseError,
           path + ":" + std::to_string(line_no) + ": non-numeric field");
    }
    first_content = false;
    if (columns < 0) {
      columns = static_cast<Index>(values.size());
    } else if (static_cast<Index>(values.size()) != columns) {
      fail(ErrorCode::InconsistentColumnCount,
           path + ":" + std::to_string(line_no) + ": expected " +
               std::to_string(columns) + " fields, got " +
               std::to_string(values.size()));
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) {
    fail(ErrorCode::ParseError, path + ": no data rows");
  }
  Matrix out(static_cast<Index>(rows.size()), columns);
  for (Index i = 0; i < out.rows(); ++i) {
    for (Index j = 0; j < columns; ++j) {
      out(i, j) = rows[static_cast<size_t>(i)][static_cast<size_t>(j)];
    }
  }
  return out;
}

}  // namespace

Manifest load_manifest(const std::string& path) {
  std::ifstream in = open_input(path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, path + ": " + e.what());
  }
  if (!doc.contains("candidates") || !doc["candidates"].is_array() ||
      doc["candidates"].empty()) {
    fail(ErrorCode::EmptySet, path + ": manifest lists no candidates");
  }
  const auto base = std::filesystem::path(path).parent_path();
  Manifest manifest;
  for (const auto& item : doc["candidates"]) {
    ManifestEntry entry;
    if (!item.contains("name") || !item.contains("path")) {
      fail(ErrorCode::ParseError,
           path + ": each candidate needs 'name' and 'path'");
    }
    entry.name = item["name"].get<std::string>();
    std::filesystem::path candidate = item["path"].get<std::string>();
    if (candidate.is_relative()) candidate = base / candidate;
    entry.path = candidate.string();
    entry.format = item.value("format", std::string("csv"));
    if (entry.format != "csv") {
      fail(ErrorCode::ParseError,
           path + ": unsupported candidate format '" + entry.format + "'");
    }
    if (!std::filesystem::exists(entry.path)) {
      fail(ErrorCode::FileNotFound,
           path + ": candidate file '" + entry.path + "' does not exist");
    }
    manifest.candidates.push_back(std::move(entry));
  }
  if (doc.contains("n")) {
    manifest.expected_n = doc["n"].get<Index>();
  }
  return manifest;
}

CandidateSet load_candidate_set(const Manifest& manifest) {
  std::vector<Embedding> embeddings;
  embeddings.reserve(manifest.candidates.size());
  for (const auto& entry : manifest.candidates) {
    embeddings.push_back(load_embedding(entry.path, entry.name));
    if (manifest.expected_n && embeddings.back().n() != *manifest.expected_n) {
      fail(ErrorCode::MismatchedSampleCount,
           entry.path + ": has " + std::to_string(embeddings.back().n()) +
               " samples, manifest expects " +
               std::to_string(*manifest.expected_n));
    }
  }
  return CandidateSet(std::move(embeddings));
}

Embedding load_embedding(const std::string& path, const std::string& name) {
  return Embedding(name, read_numeric_csv(path, true, nullptr));
}

void save_embedding(const Embedding& e, const std::string& path) {
  save_matrix_csv(e.coords(), path);
}

void save_scores(const EigenscoreMatrix& scores,
                 const std::vector<std::string>& candidate_names,
                 const std::string& path) {
  if (static_cast<Index>(candidate_names.size()) != scores.k()) {
    fail(ErrorCode::LengthMismatch, "need one name per candidate column");
  }
  std::ofstream out = open_output(path);
  for (size_t k = 0; k < candidate_names.size(); ++k) {
    if (k > 0) out << ',';
    out << candidate_names[k];
  }
  out << '\n';
  for (Index i = 0; i < scores.n(); ++i) {
    for (Index k = 0; k < scores.k(); ++k) {
      if (k > 0) out << ',';
      out << format_double(scores.scores()(i, k));
    }
    out << '\n';
  }
  if (!out) fail(ErrorCode::WriteError, "short write to '" + path + "'");
}

LoadedScores load_scores(const std::string& path) {
  LoadedScores loaded;
  loaded.scores = read_numeric_csv(path, true, &loaded.names);
  if (loaded.names.empty()) {
    fail(ErrorCode::ParseError, path + ": scores file is missing its header");
  }
  if (static_cast<Index>(loaded.names.size()) != loaded.scores.cols()) {
    fail(ErrorCode::InconsistentColumnCount,
         path + ": header and data column counts differ");
  }
  return loaded;
}

void save_distance(const MetaDistance& m, const std::string& path,
                   bool binary) {
  if (!binary) {
    save_matrix_csv(m.rows(), path);
    return;
  }
  std::ofstream out = open_output(path, true);
  out.write(kMagic, sizeof(kMagic));
  const std::uint64_t n = static_cast<std::uint64_t>(m.n());
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  const char flag = m.symmetrized() ? 1 : 0;
  out.write(&flag, 1);
  for (Index i = 0; i < m.n(); ++i) {
    for (Index j = 0; j < m.n(); ++j) {
      const double value = m.rows()(i, j);
      out.write(reinterpret_cast<const char*>(&value), sizeof(value));
    }
  }
  if (!out) fail(ErrorCode::WriteError, "short write to '" + path + "'");
}

MetaDistance load_distance(const std::string& path) {
  std::ifstream in = open_input(path);
  char magic[4] = {};
  in.read(magic, sizeof(magic));
  if (in.gcount() == sizeof(magic) &&
      std::memcmp(magic, kMagic, sizeof(magic)) == 0) {
    std::uint64_t n = 0;
    in.read(reinterpret_cast<char*>(&n), sizeof(n));
    char flag = 0;
    in.read(&flag, 1);
    if (!in || n == 0) {
      fail(ErrorCode::ParseError, path + ": truncated header");
    }
    Matrix rows(static_cast<Index>(n), static_cast<Index>(n));
    for (Index i = 0; i < rows.rows(); ++i) {
      for (Index j = 0; j < rows.cols(); ++j) {
        double value = 0.0;
        in.read(reinterpret_cast<char*>(&value), sizeof(value));
        if (!in) {
          fail(ErrorCode::ParseError,
               path + ": truncated payload at row " + std::to_string(i));
        }
        rows(i, j) = value;
      }
    }
    return MetaDistance(std::move(rows), flag != 0);
  }
  // Not the binary layout; fall back to CSV.
  in.close();
  Matrix rows = load_matrix_csv(path);
  if (rows.rows() != rows.cols()) {
    fail(ErrorCode::ParseError, path + ": distance CSV must be square");
  }
  const bool symmetric =
      (rows - rows.transpose()).cwiseAbs().maxCoeff() <= 1e-12;
  return MetaDistance(std::move(rows), symmetric);
}

std::vector<int> load_int_column(const std::string& path) {
  std::ifstream in = open_input(path);
  std::vector<int> values;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = strip_cr(line);
    if (view.empty()) continue;
    int value = 0;
    const auto result =
        std::from_chars(view.data(), view.data() + view.size(), value);
    if (result.ec != std::errc() ||
        result.ptr != view.data() + view.size()) {
      fail(ErrorCode::ParseError,
           path + ":" + std::to_string(line_no) + ": expected an integer");
    }
    values.push_back(value);
  }
  if (values.empty()) {
    fail(ErrorCode::ParseError, path + ": no values");
  }
  return values;
}

void save_int_column(const std::vector<int>& values, const std::string& path) {
  std::ofstream out = open_output(path);
  for (int value : values) out << value << '\n';
  if (!out) fail(ErrorCode::WriteError, "short write to '" + path + "'");
}

Matrix load_matrix_csv(const std::string& path) {
  return read_numeric_csv(path, false, nullptr);
}

void save_matrix_csv(const Matrix& m, const std::string& path) {
  std::ofstream out = open_output(path);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
  if (!out) fail(ErrorCode::WriteError, "short write to '" + path + "'");
}

}  // namespace metaviz
