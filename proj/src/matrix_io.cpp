#include "urcminer/matrix_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "urcminer/common.hpp"

namespace urcminer {
namespace {

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void write_matrix_csv(std::ostream& out, const MatrixFile& file) {
  out << "# urcminer";
  for (const auto& [k, v] : file.meta) out << ' ' << k << '=' << v;
  out << '\n';
  const LabeledMatrix& m = file.matrix;
  const bool labeled = !file.labels.empty();
  out << "comment_id";
  for (const auto& c : m.columns) out << ',' << c;
  if (labeled) out << ",label";
  out << '\n';
  for (std::size_t r = 0; r < m.values.rows(); ++r) {
    out << m.ids[r];
    for (double v : m.values.row(r)) out << ',' << format_double(v);
    if (labeled) out << ',' << file.labels[r];
    out << '\n';
  }
}

MatrixFile read_matrix_csv(std::istream& in) {
  MatrixFile file;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  bool labeled = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream words(line.substr(1));
      std::string w;
      while (words >> w) {
        if (auto eq = w.find('='); eq != std::string::npos) {
          file.meta[w.substr(0, eq)] = w.substr(eq + 1);
        }
      }
      continue;
    }
    auto fields = split_commas(line);
    if (!have_header) {
      if (fields.empty() || fields[0] != "comment_id") {
        throw ParseError("matrix CSV header must start with comment_id", lineno);
      }
      labeled = fields.back() == "label";
      file.matrix.columns.assign(fields.begin() + 1, fields.end() - (labeled ? 1 : 0));
      file.matrix.values = Matrix(0, file.matrix.columns.size());
      have_header = true;
      continue;
    }
    const std::size_t expected = file.matrix.columns.size() + 1 + (labeled ? 1 : 0);
    if (fields.size() != expected) {
      throw ParseError("expected " + std::to_string(expected) + " fields, got " +
                           std::to_string(fields.size()),
                       lineno);
    }
    long long id = 0;
    {
      auto [p, ec] = std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), id);
      if (ec != std::errc() || p != fields[0].data() + fields[0].size()) {
        throw ParseError("bad comment_id '" + fields[0] + "'", lineno);
      }
    }
    std::vector<double> row(file.matrix.columns.size());
    for (std::size_t c = 0; c < row.size(); ++c) {
      const std::string& f = fields[c + 1];
      auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), row[c]);
      if (ec != std::errc() || p != f.data() + f.size()) {
        throw ParseError("bad value '" + f + "' in column " + file.matrix.columns[c], lineno);
      }
    }
    file.matrix.ids.push_back(id);
    file.matrix.values.append_row(row);
    if (labeled) file.labels.push_back(fields.back());
  }
  if (!have_header) throw ParseError("matrix CSV has no header", lineno);
  return file;
}

MatrixFile read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return read_matrix_csv(in);
  } catch (const ParseError& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

}  // namespace urcminer
