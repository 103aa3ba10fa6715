#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>

#include "rsvr/io.hpp"

namespace rsvr {

namespace {

enum class ImageFormat { png, pgm, ppm };

ImageFormat format_from_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".png") return ImageFormat::png;
  if (ext == ".pgm") return ImageFormat::pgm;
  if (ext == ".ppm") return ImageFormat::ppm;
  throw FormatError(path.string() + ": unsupported image extension '" + ext + "' (expected .png, .pgm or .ppm)");
}

std::uint8_t quantize(float v) {
  const double scaled = std::clamp(static_cast<double>(v), 0.0, 1.0) * 255.0;
  return static_cast<std::uint8_t>(std::nearbyint(scaled));
}

ImageBuffer from_bytes(int width, int height, int channels, const std::uint8_t* bytes) {
  std::vector<float> data(static_cast<std::size_t>(width) * height * channels);
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = static_cast<float>(bytes[i]) / 255.0f;
  return ImageBuffer(width, height, channels, std::move(data));
}

std::vector<std::uint8_t> to_bytes(const ImageBuffer& img) {
  std::vector<std::uint8_t> bytes(img.data().size());
  std::transform(img.data().begin(), img.data().end(), bytes.begin(), quantize);
  return bytes;
}

ImageBuffer read_png(const std::filesystem::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.string().c_str())) {
    const std::string reason = image.message;
    png_image_free(&image);
    throw FormatError(path.string() + ": cannot read PNG: " + reason);
  }
  if (image.format & (PNG_FORMAT_FLAG_LINEAR | PNG_FORMAT_FLAG_ALPHA | PNG_FORMAT_FLAG_COLORMAP)) {
    png_image_free(&image);
    throw FormatError(path.string() + ": unsupported PNG layout (only 8-bit gray or RGB without alpha)");
  }
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  const int channels = color ? 3 : 1;
  std::vector<std::uint8_t> bytes(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, bytes.data(), 0, nullptr)) {
    const std::string reason = image.message;
    png_image_free(&image);
    throw FormatError(path.string() + ": corrupt PNG: " + reason);
  }
  return from_bytes(static_cast<int>(image.width), static_cast<int>(image.height), channels, bytes.data());
}

void write_png(const ImageBuffer& img, const std::filesystem::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width());
  image.height = static_cast<png_uint_32>(img.height());
  image.format = img.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  const std::vector<std::uint8_t> bytes = to_bytes(img);
  if (!png_image_write_to_file(&image, path.string().c_str(), 0, bytes.data(), 0, nullptr)) {
    const std::string reason = image.message;
    png_image_free(&image);
    throw IoError(path.string() + ": cannot write PNG: " + reason);
  }
}

// Reads the next whitespace-separated header token, skipping comments.
std::string pnm_token(const std::string& data, std::size_t& pos, const std::filesystem::path& path) {
  while (pos < data.size()) {
    if (data[pos] == '#') {
      while (pos < data.size() && data[pos] != '\n') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(data[pos]))) {
      ++pos;
    } else {
      break;
    }
  }
  const std::size_t start = pos;
  while (pos < data.size() && !std::isspace(static_cast<unsigned char>(data[pos])) && data[pos] != '#') ++pos;
  if (start == pos) throw FormatError(path.string() + ": truncated PNM header");
  return data.substr(start, pos - start);
}

int pnm_int(const std::string& token, const std::filesystem::path& path) {
  if (token.empty() || token.size() > 9 || !std::all_of(token.begin(), token.end(), ::isdigit)) {
    throw FormatError(path.string() + ": bad PNM header field '" + token + "'");
  }
  return std::stoi(token);
}

ImageBuffer read_pnm(const std::filesystem::path& path) {
  const std::string data = read_text_file(path);
  std::size_t pos = 0;
  const std::string magic = pnm_token(data, pos, path);
  int channels = 0;
  if (magic == "P5") {
    channels = 1;
  } else if (magic == "P6") {
    channels = 3;
  } else {
    throw FormatError(path.string() + ": unsupported PNM magic '" + magic + "' (expected P5 or P6)");
  }
  const int width = pnm_int(pnm_token(data, pos, path), path);
  const int height = pnm_int(pnm_token(data, pos, path), path);
  const int maxval = pnm_int(pnm_token(data, pos, path), path);
  if (maxval != 255) throw FormatError(path.string() + ": unsupported PNM maxval " + std::to_string(maxval));
  if (width < 1 || height < 1) throw FormatError(path.string() + ": empty PNM image");
  if (pos >= data.size() || !std::isspace(static_cast<unsigned char>(data[pos]))) {
    throw FormatError(path.string() + ": truncated PNM header");
  }
  ++pos;  // single whitespace before the raster
  const std::size_t expected = static_cast<std::size_t>(width) * height * channels;
  if (data.size() - pos < expected) throw FormatError(path.string() + ": truncated PNM raster");
  return from_bytes(width, height, channels, reinterpret_cast<const std::uint8_t*>(data.data() + pos));
}

void write_pnm(const ImageBuffer& img, const std::filesystem::path& path, ImageFormat format) {
  const int channels = format == ImageFormat::pgm ? 1 : 3;
  if (img.channels() != channels) {
    throw FormatError(path.string() + ": cannot store a " + std::to_string(img.channels()) + "-channel image as " +
                      (channels == 1 ? "PGM" : "PPM"));
  }
  const std::vector<std::uint8_t> bytes = to_bytes(img);
  std::string out = (channels == 1 ? "P5\n" : "P6\n") + std::to_string(img.width()) + " " +
                    std::to_string(img.height()) + "\n255\n";
  out.append(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  write_text_file(path, out);
}

}  // namespace

ImageBuffer read_image(const std::filesystem::path& path) {
  const ImageFormat format = format_from_extension(path);
  if (!std::filesystem::exists(path)) throw IoError(path.string() + ": no such file");
  return format == ImageFormat::png ? read_png(path) : read_pnm(path);
}

void write_image(const ImageBuffer& img, const std::filesystem::path& path) {
  if (img.empty()) throw SizeError(path.string() + ": cannot write an empty image");
  const ImageFormat format = format_from_extension(path);
  if (format == ImageFormat::png) {
    write_png(img, path);
  } else {
    write_pnm(img, path, format);
  }
}

void write_mask(const ScalarMap& mask, const std::filesystem::path& path) {
  std::vector<float> data(mask.data().begin(), mask.data().end());
  for (float& v : data) v = std::clamp(v, 0.0f, 1.0f);
  write_image(ImageBuffer(mask.width(), mask.height(), 1, std::move(data)), path);
}

ScalarMap read_mask(const std::filesystem::path& path) {
  const ImageBuffer img = read_image(path);
  ScalarMap mask(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      float sum = 0.0f;
      for (int c = 0; c < img.channels(); ++c) sum += img.at(x, y, c);
      mask.at(x, y) = sum / static_cast<float>(img.channels());
    }
  }
  return mask;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError(path.string() + ": write failed");
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string() + ": cannot open for reading");
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace rsvr
