#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <system_error>
#include <unistd.h>

#include "laneforge/errors.hpp"
#include "laneforge/io.hpp"

namespace laneforge::io {
namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <class T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  const U bits = std::bit_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

template <class T>
T get_le(std::span<const std::uint8_t> in, std::size_t at) {
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) bits |= static_cast<U>(in[at + i]) << (8 * i);
  return std::bit_cast<T>(bits);
}

}  // namespace

std::vector<std::uint8_t> encode_cloud(const PointCloud& cloud) {
  std::vector<std::uint8_t> out;
  out.reserve(kCloudHeaderBytes + kCloudRecordBytes * cloud.size());
  out.insert(out.end(), std::begin(kCloudMagic), std::end(kCloudMagic));
  put_le<std::uint32_t>(out, kCloudVersion);
  put_le<std::uint64_t>(out, cloud.size());
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(kCloudRecordBytes));
  for (const auto& p : cloud.points) {
    put_le(out, p.x);
    put_le(out, p.y);
    put_le(out, p.z);
    put_le(out, p.intensity);
  }
  return out;
}

PointCloud decode_cloud(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kCloudMagic, 4) != 0) {
    fail(ErrorCode::BadMagic, "cloud file does not start with \"LSVL\"");
  }
  if (bytes.size() < kCloudHeaderBytes) fail(ErrorCode::TruncatedFile, "cloud header is truncated");
  const auto version = get_le<std::uint32_t>(bytes, 4);
  if (version != kCloudVersion) {
    fail(ErrorCode::VersionUnsupported, "cloud format version " + std::to_string(version));
  }
  const auto count = get_le<std::uint64_t>(bytes, 8);
  const auto stride = get_le<std::uint32_t>(bytes, 16);
  if (stride != kCloudRecordBytes) {
    fail(ErrorCode::VersionUnsupported, "record size " + std::to_string(stride));
  }
  const std::size_t payload = bytes.size() - kCloudHeaderBytes;
  if (count > payload / kCloudRecordBytes || payload != count * kCloudRecordBytes) {
    fail(ErrorCode::TruncatedFile, "header declares " + std::to_string(count) + " points but " +
                                       std::to_string(payload) + " payload bytes follow");
  }
  PointCloud cloud;
  cloud.points.resize(count);
  std::size_t at = kCloudHeaderBytes;
  for (auto& p : cloud.points) {
    p.x = get_le<float>(bytes, at);
    p.y = get_le<float>(bytes, at + 4);
    p.z = get_le<float>(bytes, at + 8);
    p.intensity = get_le<float>(bytes, at + 12);
    at += kCloudRecordBytes;
  }
  return cloud;
}

void write_cloud(const PointCloud& cloud, const std::filesystem::path& path) {
  const auto bytes = encode_cloud(cloud);
  write_file_atomic(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

PointCloud read_cloud(const std::filesystem::path& path) {
  const std::string data = read_file(path);
  PointCloud cloud = decode_cloud(std::span<const std::uint8_t>(
      reinterpret_cast<const std::uint8_t*>(data.data()), data.size()));
  cloud.frame_id = path.stem().string();
  return cloud;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view data) {
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::IoFailure, "cannot open " + tmp.string() + " for writing");
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    out.flush();
    if (!out) {
      std::error_code ignore;
      std::filesystem::remove(tmp, ignore);
      fail(ErrorCode::IoFailure, "write to " + tmp.string() + " failed");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignore;
    std::filesystem::remove(tmp, ignore);
    fail(ErrorCode::IoFailure, "cannot rename onto " + path.string() + ": " + ec.message());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoFailure, "cannot open " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) fail(ErrorCode::IoFailure, "read of " + path.string() + " failed");
  return data;
}

}  // namespace laneforge::io
