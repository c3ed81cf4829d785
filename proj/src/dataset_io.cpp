#include "confopt/dataset_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "confopt/error.hpp"
#include "confopt/format.hpp"
#include "confopt/matrix.hpp"

namespace confopt {

namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <class T>
bool parse_number(std::string_view s, T& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && !s.empty();
}


}  // namespace

LabeledSample read_dataset_csv(const std::filesystem::path& path, std::optional<int> classes) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw IoError("'" + path.string() + "' is empty");
  const auto header = split_commas(trim(line));
  if (header.size() < 2 || trim(header.back()) != "label") {
    throw IoError("'" + path.string() + "': header must be f1,...,fd,label");
  }
  const int d = static_cast<int>(header.size()) - 1;

  std::vector<double> features;
  std::vector<int> labels;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split_commas(trim(line));
    const std::string where = "'" + path.string() + "' line " + std::to_string(lineno);
    if (cells.size() != header.size()) {
      throw IoError(where + ": expected " + std::to_string(header.size()) + " fields, got " +
                    std::to_string(cells.size()));
    }
    for (int j = 0; j < d; ++j) {
      double v = 0.0;
      if (!parse_number(cells[static_cast<std::size_t>(j)], v) || !std::isfinite(v)) {
        throw IoError(where + ": feature " + std::to_string(j + 1) + " is not a finite number");
      }
      features.push_back(v);
    }
    int y = 0;
    if (!parse_number(cells.back(), y) || y < 1) throw IoError(where + ": label must be an integer >= 1");
    labels.push_back(y - 1);
  }
  if (labels.empty()) throw IoError("'" + path.string() + "' has no data rows");
  int n = 0;
  for (int y : labels) n = std::max(n, y + 1);
  if (classes) {
    if (*classes < n) {
      throw Error("--classes " + std::to_string(*classes) + " is smaller than the largest label " + std::to_string(n));
    }
    n = *classes;
  }
  if (n > kMaxClasses) throw Error("too many classes");
  if (n < 2) n = 2;  // a file with a single observed class is still a binary problem
  return LabeledSample(n, d, std::move(features), std::move(labels));
}

void write_dataset_csv(const std::filesystem::path& path, const LabeledSample& sample) {
  std::ostringstream out;
  for (int j = 0; j < sample.d(); ++j) out << 'f' << (j + 1) << ',';
  out << "label\n";
  for (std::size_t k = 0; k < sample.size(); ++k) {
    for (double v : sample.x(k)) out << format_double(v) << ',';
    out << (sample.y(k) + 1) << '\n';
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write '" + path.string() + "'");
  f << out.str();
  if (!f) throw IoError("failed while writing '" + path.string() + "'");
}

}  // namespace confopt
