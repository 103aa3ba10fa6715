#include <openssl/evp.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <memory>

#include "rsvr/io.hpp"

namespace rsvr {

namespace {

constexpr float kFloMagic = 202021.25f;
constexpr std::size_t kFloHeaderBytes = 12;
// Generous cap on either dimension; rejects garbage headers before allocation.
constexpr std::int32_t kFloMaxDimension = 1 << 16;

static_assert(sizeof(float) == 4 && std::numeric_limits<float>::is_iec559);

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

}  // namespace

std::vector<unsigned char> encode_flo(const FlowField& flow) {
  std::vector<unsigned char> out;
  out.reserve(kFloHeaderBytes + flow.data().size() * 8);
  put_u32(out, std::bit_cast<std::uint32_t>(kFloMagic));
  put_u32(out, static_cast<std::uint32_t>(flow.width()));
  put_u32(out, static_cast<std::uint32_t>(flow.height()));
  for (const FlowVector& f : flow.data()) {
    put_u32(out, std::bit_cast<std::uint32_t>(f.u));
    put_u32(out, std::bit_cast<std::uint32_t>(f.v));
  }
  return out;
}

FlowField decode_flo(const std::vector<unsigned char>& bytes, const std::string& source) {
  if (bytes.size() < kFloHeaderBytes) throw FormatError(source + ": truncated .flo header");
  const float magic = std::bit_cast<float>(get_u32(bytes.data()));
  if (magic != kFloMagic) throw FormatError(source + ": bad .flo magic");
  const auto width = static_cast<std::int32_t>(get_u32(bytes.data() + 4));
  const auto height = static_cast<std::int32_t>(get_u32(bytes.data() + 8));
  if (width < 1 || height < 1 || width > kFloMaxDimension || height > kFloMaxDimension) {
    throw FormatError(source + ": invalid .flo dimensions " + std::to_string(width) + "x" + std::to_string(height));
  }
  const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  const std::size_t expected = kFloHeaderBytes + count * 8;
  if (bytes.size() < expected) throw FormatError(source + ": truncated .flo payload");
  if (bytes.size() > expected) throw FormatError(source + ": trailing bytes after .flo payload");
  std::vector<FlowVector> data(count);
  const unsigned char* p = bytes.data() + kFloHeaderBytes;
  for (std::size_t i = 0; i < count; ++i, p += 8) {
    data[i] = {std::bit_cast<float>(get_u32(p)), std::bit_cast<float>(get_u32(p + 4))};
    if (!is_finite(data[i])) throw FormatError(source + ": non-finite flow vector at index " + std::to_string(i));
  }
  return FlowField(width, height, std::move(data));
}

FlowField read_flo(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string() + ": cannot open for reading");
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_flo(bytes, path.string());
}

void write_flo(const FlowField& flow, const std::filesystem::path& path) {
  if (flow.empty()) throw SizeError(path.string() + ": cannot write an empty flow field");
  const std::vector<unsigned char> bytes = encode_flo(flow);
  write_text_file(path, std::string(bytes.begin(), bytes.end()));
}

std::string sha256_file(const std::filesystem::path& path) {
  const std::string data = read_text_file(path);
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &length) != 1) {
    throw IoError(path.string() + ": SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(length * 2);
  for (unsigned int i = 0; i < length; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xF]);
  }
  return hex;
}

}  // namespace rsvr
