#ifndef OCP_HASH_H_
#define OCP_HASH_H_

#include <filesystem>
#include <string>
#include <string_view>

namespace ocp {

// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace ocp

#endif  // OCP_HASH_H_
