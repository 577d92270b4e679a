// Copyright The limor Authors.
// SPDX-License-Identifier: Apache-2.0

#include "limor/io.hpp"

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>
#include <vector>

#include "json.hpp"
#include "limor/error.hpp"

namespace limor
{

namespace fs = std::filesystem;
using nlohmann::json;

namespace
{

std::string lower(std::string s)
{
  for (char &c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// Whitespace tokenizer that remembers 1-based columns.
struct Token
{
  std::string text;
  int column;
};

std::vector<Token> tokenize(const std::string &line)
{
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size())
  {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i >= line.size()) break;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    out.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
  }
  return out;
}

double parse_double(const std::string &file, int line, const Token &tok)
{
  double v = 0.0;
  const char *b = tok.text.data();
  const char *e = b + tok.text.size();
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e)
  {
    throw ParseError(file, line, tok.column, "expected a number, got '" + tok.text + "'");
  }
  return v;
}

long parse_index(const std::string &file, int line, const Token &tok)
{
  long v = 0;
  const char *b = tok.text.data();
  const char *e = b + tok.text.size();
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e)
  {
    throw ParseError(file, line, tok.column, "expected an integer, got '" + tok.text + "'");
  }
  return v;
}

void require_file(const std::string &path)
{
  std::error_code ec;
  if (!fs::is_regular_file(path, ec))
  {
    throw Error(ErrorCode::MissingFile, "no such file: " + path);
  }
}

json parse_json_file(const std::string &path)
{
  const std::string text = read_text_file(path);
  try
  {
    return json::parse(text);
  }
  catch (const json::parse_error &e)
  {
    int line = 1, col = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < stop; ++i)
    {
      if (text[i] == '\n')
      {
        ++line;
        col = 1;
      }
      else
      {
        ++col;
      }
    }
    throw ParseError(path, line, col, e.what());
  }
}

Mat matrix_from_json(const json &j, const std::string &file, const std::string &key)
{
  auto fail = [&](const std::string &msg) -> Mat {
    throw ParseError(file, 0, 0, "\"" + key + "\": " + msg);
  };
  if (j.is_object())
  {
    if (!j.contains("rows") || !j.contains("cols") || !j.contains("data"))
      return fail("object form needs rows, cols and data");
    const auto r = j.at("rows").get<long>(), c = j.at("cols").get<long>();
    const json &d = j.at("data");
    if (r < 0 || c < 0 || !d.is_array() || static_cast<long>(d.size()) != r * c)
      return fail("data length does not match rows*cols");
    Mat M(r, c);
    for (long i = 0; i < r; ++i)
      for (long k = 0; k < c; ++k)
      {
        const json &v = d[i * c + k];
        if (!v.is_number()) return fail("non-numeric entry");
        M(i, k) = v.get<double>();
      }
    return M;
  }
  if (!j.is_array()) return fail("expected a nested array");
  const Eigen::Index r = static_cast<Eigen::Index>(j.size());
  if (r == 0) return Mat(0, 0);
  if (!j[0].is_array()) return fail("expected an array of rows");
  const Eigen::Index c = static_cast<Eigen::Index>(j[0].size());
  Mat M(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
  {
    const json &row = j[i];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != c)
    {
      std::ostringstream os;
      os << "row " << i << " has a different length than row 0";
      return fail(os.str());
    }
    for (Eigen::Index k = 0; k < c; ++k)
    {
      if (!row[k].is_number()) return fail("non-numeric entry");
      M(i, k) = row[k].get<double>();
    }
  }
  return M;
}

json matrix_to_json(const Mat &M)
{
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i)
  {
    json row = json::array();
    for (Eigen::Index k = 0; k < M.cols(); ++k) row.push_back(M(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<std::string> split(const std::string &s, char sep)
{
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

}  // namespace

std::string read_text_file(const std::string &path)
{
  require_file(path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void atomic_write(const std::string &path, const std::string &content)
{
  const fs::path target(path);
  std::error_code ec;
  if (target.has_parent_path()) fs::create_directories(target.parent_path(), ec);
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + tmp.string());
  }
  fs::rename(tmp, target, ec);
  if (ec)
  {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::IoError, "cannot rename into " + path);
  }
}

Mat read_matrix_market(const std::string &path)
{
  require_file(path);
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);

  std::string line;
  int lineno = 0;
  if (!std::getline(in, line)) throw ParseError(path, 1, 1, "empty file");
  ++lineno;
  const std::vector<Token> head = tokenize(line);
  if (head.size() != 5 || lower(head[0].text) != "%%matrixmarket" || lower(head[1].text) != "matrix")
  {
    throw ParseError(path, 1, 1, "expected '%%MatrixMarket matrix <format> <field> <symmetry>'");
  }
  const std::string format = lower(head[2].text), field = lower(head[3].text),
                    symmetry = lower(head[4].text);
  if (format != "coordinate" && format != "array")
    throw ParseError(path, 1, head[2].column, "unsupported format '" + head[2].text + "'");
  if (field != "real" && field != "integer" && field != "double")
    throw ParseError(path, 1, head[3].column, "unsupported field '" + head[3].text + "'");
  if (symmetry != "general" && symmetry != "symmetric" && symmetry != "skew-symmetric")
    throw ParseError(path, 1, head[4].column, "unsupported symmetry '" + head[4].text + "'");

  // Next non-comment line holds the sizes.
  std::vector<Token> sizes;
  while (std::getline(in, line))
  {
    ++lineno;
    if (line.empty() || line[0] == '%') continue;
    sizes = tokenize(line);
    if (sizes.empty()) continue;
    break;
  }
  const std::size_t want = format == "coordinate" ? 3 : 2;
  if (sizes.size() != want)
  {
    throw ParseError(path, lineno, 1, "size line needs " + std::to_string(want) + " integers");
  }
  const long rows = parse_index(path, lineno, sizes[0]);
  const long cols = parse_index(path, lineno, sizes[1]);
  if (rows < 0 || cols < 0) throw ParseError(path, lineno, 1, "negative size");
  if (symmetry != "general" && rows != cols)
    throw ParseError(path, lineno, 1, "symmetric storage needs a square matrix");
  long entries = rows * cols;
  if (format == "coordinate")
    entries = parse_index(path, lineno, sizes[2]);
  else if (symmetry == "symmetric")
    entries = rows * (rows + 1) / 2;
  else if (symmetry == "skew-symmetric")
    entries = rows * (rows - 1) / 2;
  if (entries < 0) throw ParseError(path, lineno, sizes.back().column, "negative entry count");

  Mat M = Mat::Zero(rows, cols);
  long seen = 0;
  // Array storage is column-major; for symmetric storage only the lower triangle is listed.
  long ai = 0, aj = 0;
  while (seen < entries && std::getline(in, line))
  {
    ++lineno;
    if (line.empty() || line[0] == '%') continue;
    const std::vector<Token> tok = tokenize(line);
    if (tok.empty()) continue;
    if (format == "coordinate")
    {
      if (tok.size() != 3) throw ParseError(path, lineno, 1, "coordinate entry needs 'i j value'");
      const long i = parse_index(path, lineno, tok[0]) - 1;
      const long j = parse_index(path, lineno, tok[1]) - 1;
      if (i < 0 || i >= rows) throw ParseError(path, lineno, tok[0].column, "row index out of range");
      if (j < 0 || j >= cols) throw ParseError(path, lineno, tok[1].column, "column index out of range");
      const double v = parse_double(path, lineno, tok[2]);
      M(i, j) += v;
      if (i != j && symmetry == "symmetric") M(j, i) += v;
      if (i != j && symmetry == "skew-symmetric") M(j, i) -= v;
    }
    else
    {
      if (tok.size() != 1) throw ParseError(path, lineno, 1, "array entry needs one value");
      const double v = parse_double(path, lineno, tok[0]);
      if (symmetry == "general")
      {
        M(ai, aj) = v;
        if (++ai == rows)
        {
          ai = 0;
          ++aj;
        }
      }
      else
      {
        if (symmetry == "skew-symmetric" && ai == aj) ai = aj + 1;
        M(ai, aj) = v;
        if (ai != aj) M(aj, ai) = symmetry == "symmetric" ? v : -v;
        if (++ai == rows)
        {
          ++aj;
          ai = symmetry == "symmetric" ? aj : aj + 1;
        }
      }
    }
    ++seen;
  }
  if (seen < entries)
  {
    std::ostringstream os;
    os << "file ended after " << seen << " of " << entries << " entries";
    throw ParseError(path, lineno + 1, 1, os.str());
  }
  if (!M.allFinite()) throw Error(ErrorCode::NonFinite, path + " contains non-finite values");
  return M;
}

void write_matrix_market(const std::string &path, const Mat &M)
{
  std::ostringstream os;
  os << "%%MatrixMarket matrix array real general\n";
  os << M.rows() << " " << M.cols() << "\n";
  char buf[64];
  for (Eigen::Index j = 0; j < M.cols(); ++j)
  {
    for (Eigen::Index i = 0; i < M.rows(); ++i)
    {
      std::snprintf(buf, sizeof buf, "%.17g\n", M(i, j));
      os << buf;
    }
  }
  atomic_write(path, os.str());
}

StateSpaceModel load_model(const std::string &source, bool require_stable)
{
  const std::vector<std::string> parts = split(source, ',');
  if (parts.size() == 3)
  {
    return StateSpaceModel(read_matrix_market(parts[0]), read_matrix_market(parts[1]),
                           read_matrix_market(parts[2]), require_stable);
  }
  if (parts.size() != 1)
  {
    throw Error(ErrorCode::InvalidArgument,
                "model source must be a JSON file or a comma-separated A,B,C triple");
  }
  const json j = parse_json_file(source);
  if (!j.is_object() || !j.contains("A") || !j.contains("B") || !j.contains("C"))
  {
    throw ParseError(source, 1, 1, "model JSON needs keys A, B and C");
  }
  const fs::path base = fs::path(source).parent_path();
  auto get = [&](const char *key) -> Mat {
    const json &v = j.at(key);
    if (v.is_string())
    {
      fs::path p = v.get<std::string>();
      if (p.is_relative()) p = base / p;
      return read_matrix_market(p.string());
    }
    return matrix_from_json(v, source, key);
  };
  return StateSpaceModel(get("A"), get("B"), get("C"), require_stable);
}

RomBundle load_rom(const std::string &path)
{
  const json j = parse_json_file(path);
  if (!j.is_object() || !j.contains("A") || !j.contains("B") || !j.contains("C"))
  {
    throw ParseError(path, 1, 1, "ROM JSON needs keys A, B and C");
  }
  RomBundle out{StateSpaceModel(matrix_from_json(j.at("A"), path, "A"),
                                matrix_from_json(j.at("B"), path, "B"),
                                matrix_from_json(j.at("C"), path, "C"), false),
                std::nullopt};
  if (j.contains("V") && j.contains("W"))
  {
    out.pair = ProjectionPair{matrix_from_json(j.at("V"), path, "V"),
                              matrix_from_json(j.at("W"), path, "W")};
  }
  return out;
}

void save_rom(const std::string &path, const StateSpaceModel &rom, const ProjectionPair *pair)
{
  json j;
  j["A"] = matrix_to_json(rom.A());
  j["B"] = matrix_to_json(rom.B());
  j["C"] = matrix_to_json(rom.C());
  if (pair)
  {
    j["V"] = matrix_to_json(pair->V);
    j["W"] = matrix_to_json(pair->W);
  }
  atomic_write(path, j.dump(1) + "\n");
}

}  // namespace limor
