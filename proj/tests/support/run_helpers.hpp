#pragma once

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "famine.hpp"

namespace helpers {

namespace fs = std::filesystem;

inline std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline std::vector<std::vector<std::string>> read_csv_text(const std::string& text) {
  std::istringstream in(text);
  famine::csv::Reader reader(in);
  std::vector<std::vector<std::string>> rows;
  famine::csv::Record rec;
  while (reader.next(rec)) rows.push_back(rec);
  return rows;
}

inline std::vector<std::vector<std::string>> read_csv(const fs::path& p) { return read_csv_text(slurp(p)); }

/// Fresh scratch directory under the system temp dir.
inline fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("famine_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

/// Runs a shell command and returns its exit status (-1 if it did not exit normally).
inline int run_command(const std::string& cmd) {
  const int raw = std::system((cmd + " >/dev/null 2>&1").c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

inline std::string cli() { return FAMINE_CLI; }

inline nlohmann::json load_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

inline nlohmann::json report_schema() { return load_json(fs::path(FAMINE_SOURCE_DIR) / "schema" / "report.schema.json"); }

/// Parses an SVG with a conforming XML parser; throws on malformed input.
inline boost::property_tree::ptree parse_svg(const fs::path& p) {
  boost::property_tree::ptree tree;
  std::istringstream in(slurp(p));
  boost::property_tree::read_xml(in, tree);
  return tree;
}

/// True if the tree holds a <line> whose class attribute is "identity".
inline bool has_identity_line(const boost::property_tree::ptree& node) {
  for (const auto& [tag, child] : node) {
    if (tag == "line" && child.get<std::string>("<xmlattr>.class", "") == "identity") return true;
    if (has_identity_line(child)) return true;
  }
  return false;
}

/// Every regular file under `dir`, relative paths, sorted.
inline std::vector<std::string> list_files(const fs::path& dir) {
  std::vector<std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) out.push_back(fs::relative(e.path(), dir).generic_string());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace helpers
