#ifndef OCP_TESTS_HELPERS_H_
#define OCP_TESTS_HELPERS_H_

#include <atomic>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <unistd.h>

#include "doctest.h"
#include "ocp/error.h"

namespace testing {

namespace fs = std::filesystem;

// Removed with everything inside on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("ocp-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline fs::path fixture(const std::string& name) { return fs::path(OCP_FIXTURES) / name; }

// Code of the ocp::Error thrown by f; fails the test when nothing is thrown.
inline ocp::ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ocp::Error& e) {
    return e.code();
  }
  FAIL("expected an ocp::Error");
  return ocp::ErrorCode::kInvalidArgument;
}

}  // namespace testing

#endif  // OCP_TESTS_HELPERS_H_
