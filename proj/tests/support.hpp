#pragma once

#include <atomic>
#include <filesystem>
#include <string>
#include <unistd.h>

#include "flexloc/repo_index.hpp"
#include "flexloc/text.hpp"

namespace testsupport {

inline std::filesystem::path fixtures() { return FLEXLOC_FIXTURES; }
inline std::filesystem::path bugs_dir() { return fixtures() / "bugs"; }
inline std::filesystem::path repo_dir() { return fixtures() / "repo"; }

inline const flexloc::RepoIndex& time_index() {
  static const flexloc::RepoIndex index = flexloc::build_index(repo_dir()).index;
  return index;
}

// Removed with its contents on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("flexloc-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

  std::filesystem::path write(const std::string& rel, const std::string& content) const {
    auto p = path_ / rel;
    flexloc::text::write_file(p, content);
    return p;
  }

 private:
  std::filesystem::path path_;
};

}  // namespace testsupport
