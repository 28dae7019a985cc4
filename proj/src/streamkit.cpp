#include "plcpcomp/streamkit.hpp"

#include <atomic>
#include <cstdlib>
#include <random>
#include <string>

#include <unistd.h>

namespace plcpcomp::stream {

std::filesystem::path default_tmp_dir() {
  if (const char* env = std::getenv("PLCPCOMP_TMP"); env != nullptr && *env != '\0') {
    return env;
  }
  return std::filesystem::temp_directory_path();
}

MemoryBudget MemoryBudget::unbounded() {
  MemoryBudget b;
  b.bytes_in_core = kUnlimited;
  return b;
}

MemoryBudget MemoryBudget::of_bytes(std::uint64_t bytes) {
  MemoryBudget b;
  b.bytes_in_core = bytes;
  b.block_size = std::clamp<std::uint64_t>(bytes / 16, kMinBlockSize, b.block_size);
  return b;
}

void MemoryBudget::validate() const {
  if (block_size < kMinBlockSize) {
    throw ConfigError("block size must be at least 4096 bytes");
  }
  if (!unlimited() && bytes_in_core / 4 < block_size) {
    throw ConfigError("memory budget must hold at least four blocks (" +
                      std::to_string(4 * block_size) + " bytes)");
  }
}

std::filesystem::path MemoryBudget::spill_dir() const {
  return tmp_dir.empty() ? default_tmp_dir() : tmp_dir;
}

namespace {

std::string unique_token() {
  static std::atomic<std::uint64_t> counter{0};
  static const std::uint64_t salt = std::random_device{}();
  return std::to_string(::getpid()) + "-" + std::to_string(salt % 1000000) + "-" +
         std::to_string(counter.fetch_add(1));
}

}  // namespace

SpillFile::SpillFile(const std::filesystem::path& dir) {
  path_ = dir / ("plcpcomp-" + unique_token() + ".spill");
  fp_ = std::fopen(path_.c_str(), "w+b");
  if (fp_ == nullptr) {
    throw IoError("cannot create spill file in " + dir.string());
  }
}

SpillFile::~SpillFile() {
  if (fp_ != nullptr) {
    std::fclose(fp_);
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }
}

void SpillFile::write(const void* data, std::size_t bytes) {
  if (bytes != 0 && std::fwrite(data, 1, bytes, fp_) != bytes) {
    throw IoError("write to spill file " + path_.string() + " failed");
  }
}

std::size_t SpillFile::read(void* data, std::size_t bytes) {
  return bytes == 0 ? 0 : std::fread(data, 1, bytes, fp_);
}

void SpillFile::rewind() {
  if (std::fflush(fp_) != 0 || std::fseek(fp_, 0, SEEK_SET) != 0) {
    throw IoError("cannot rewind spill file " + path_.string());
  }
}

}  // namespace plcpcomp::stream
