#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "urcminer/matrix.hpp"

namespace urcminer {

// CSV layout shared by feature and TF-IDF files:
//   # urcminer key=value key=value ...
//   comment_id,<column>,...[,label]
//   <id>,<value>,...[,<class name>]
// Values use the shortest representation that round-trips exactly.
struct MatrixFile {
  std::map<std::string, std::string> meta;
  LabeledMatrix matrix;
  std::vector<std::string> labels;  // empty when the file has no label column
};

void write_matrix_csv(std::ostream& out, const MatrixFile& file);
MatrixFile read_matrix_csv(std::istream& in);
MatrixFile read_matrix_csv(const std::filesystem::path& path);

std::string format_double(double v);

}  // namespace urcminer
