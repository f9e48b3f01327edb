#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace untag::testing {

inline std::string readFile(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Every MiniC program of the corpus, sorted by path.
inline std::vector<std::string> corpusPrograms() {
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(UNTAG_CORPUS_DIR))
    if (e.path().extension() == ".mc") out.push_back(e.path().string());
  std::sort(out.begin(), out.end());
  return out;
}

inline std::string stem(const std::string& path) { return std::filesystem::path(path).stem().string(); }

}  // namespace untag::testing
