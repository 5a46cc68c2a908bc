// Byte-level formats: files, digests, PFM depth, PNG/PGM images.

#include <png.h>
#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <string>

#include "camcond/error.hpp"
#include "camcond/io_formats.hpp"

namespace camcond::io {

std::vector<std::uint8_t> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::IoFailure, "read failed: " + path.string());
  return bytes;
}

void write_file_atomic(const fs::path& path, std::span<const std::uint8_t> bytes) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + path.parent_path().string());
  }
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  fs::path tmp = path;
  tmp += ".tmp" + std::to_string(rng());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::IoFailure, "write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::IoFailure, "cannot move output into place: " + path.string());
  }
}

void write_text_atomic(const fs::path& path, std::string_view text) {
  write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::IoFailure, "SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

std::string sha256_hex(std::string_view text) {
  return sha256_hex(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

// ---------------------------------------------------------------------------
// Netpbm-style header tokenizer shared by PFM and PGM.

namespace {

constexpr int kMaxImageSide = 1 << 15;

class HeaderReader {
 public:
  HeaderReader(std::span<const std::uint8_t> bytes, ErrorCode code) : bytes_(bytes), code_(code) {}

  std::string token() {
    skip_space_and_comments();
    std::string tok;
    while (pos_ < bytes_.size() && !std::isspace(bytes_[pos_]) && tok.size() < 32) {
      tok.push_back(static_cast<char>(bytes_[pos_++]));
    }
    if (tok.empty()) fail("unexpected end of header");
    return tok;
  }

  int dimension(const char* what) {
    const std::string tok = token();
    if (tok.size() > 6 || !std::all_of(tok.begin(), tok.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      fail(std::string("bad ") + what + " '" + tok + "'");
    }
    const int v = std::stoi(tok);
    if (v < 1 || v > kMaxImageSide) fail(std::string(what) + " out of range");
    return v;
  }

  /// Exactly one whitespace byte separates the header from the payload.
  std::size_t payload_offset() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) fail("missing header terminator");
    return pos_ + 1;
  }

  [[noreturn]] void fail(const std::string& msg) const { throw Error(code_, msg); }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  ErrorCode code_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_pfm(const depthmesh::DepthRaster& raster) {
  const std::string header =
      "Pf\n" + std::to_string(raster.width()) + " " + std::to_string(raster.height()) + "\n-1.0\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + 4 * static_cast<std::size_t>(raster.width()) * static_cast<std::size_t>(raster.height()));
  for (int y = raster.height() - 1; y >= 0; --y) {
    for (int x = 0; x < raster.width(); ++x) {
      const float v = raster.valid(x, y) ? raster.at(x, y) : depthmesh::DepthRaster::kInvalid;
      const auto bits = std::bit_cast<std::uint32_t>(v);
      for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(bits >> (8 * b)));
    }
  }
  return out;
}

depthmesh::DepthRaster decode_pfm(std::span<const std::uint8_t> bytes) {
  HeaderReader header(bytes, ErrorCode::MalformedHeader);
  const std::string magic = header.token();
  if (magic == "PF") {
    throw Error(ErrorCode::NonFloatPayload, "three-channel PFM is not a depth raster");
  }
  if (magic != "Pf") header.fail("not a single-channel PFM (magic '" + magic + "')");
  const int w = header.dimension("width");
  const int h = header.dimension("height");
  const std::string scale_tok = header.token();
  double scale = 0.0;
  try {
    std::size_t used = 0;
    scale = std::stod(scale_tok, &used);
    if (used != scale_tok.size()) header.fail("bad scale '" + scale_tok + "'");
  } catch (const std::logic_error&) {
    header.fail("bad scale '" + scale_tok + "'");
  }
  if (!std::isfinite(scale) || scale == 0.0) header.fail("scale must be finite and non-zero");
  const bool little_endian = scale < 0.0;
  const std::size_t offset = header.payload_offset();

  const std::size_t expected = 4 * static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  const std::size_t available = bytes.size() - std::min(offset, bytes.size());
  if (available < expected) {
    throw Error(ErrorCode::MalformedHeader, "short read: payload has " + std::to_string(available) +
                                                " bytes, expected " + std::to_string(expected));
  }
  if (available > expected) {
    throw Error(ErrorCode::MalformedHeader, "trailing bytes after PFM payload");
  }

  depthmesh::DepthRaster raster(w, h);
  const std::uint8_t* p = bytes.data() + offset;
  for (int row = 0; row < h; ++row) {
    const int y = h - 1 - row;
    for (int x = 0; x < w; ++x, p += 4) {
      std::uint32_t bits = 0;
      for (int b = 0; b < 4; ++b) {
        const int shift = little_endian ? 8 * b : 8 * (3 - b);
        bits |= static_cast<std::uint32_t>(p[b]) << shift;
      }
      raster.set(x, y, std::bit_cast<float>(bits));
    }
  }
  return raster;
}

depthmesh::DepthRaster read_depth(const fs::path& path) {
  try {
    return decode_pfm(read_file(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::IoFailure) throw;
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

void write_depth(const depthmesh::DepthRaster& raster, const fs::path& path) {
  write_file_atomic(path, encode_pfm(raster));
}

// ---------------------------------------------------------------------------
// PNG via libpng's simplified API.

std::vector<std::uint8_t> encode_png(const Image& image) {
  if (image.channels != 1 && image.channels != 3) {
    throw Error(ErrorCode::InvalidArgument, "PNG encoder supports 1 or 3 channels");
  }
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.width);
  png.height = static_cast<png_uint_32>(image.height);
  png.format = image.channels == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;

  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&png, nullptr, &size, 0, image.pixels.data(), 0, nullptr)) {
    throw Error(ErrorCode::IoFailure, std::string("PNG encode failed: ") + png.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&png, out.data(), &size, 0, image.pixels.data(), 0, nullptr)) {
    throw Error(ErrorCode::IoFailure, std::string("PNG encode failed: ") + png.message);
  }
  out.resize(size);
  return out;
}

Image decode_png(std::span<const std::uint8_t> bytes) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&png, bytes.data(), bytes.size())) {
    throw Error(ErrorCode::SchemaViolation, std::string("not a readable PNG: ") + png.message);
  }
  if (png.width < 1 || png.height < 1 || png.width > kMaxImageSide || png.height > kMaxImageSide) {
    png_image_free(&png);
    throw Error(ErrorCode::SchemaViolation, "PNG dimensions out of range");
  }
  const bool color = (png.format & PNG_FORMAT_FLAG_COLOR) != 0;
  png.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  Image img(static_cast<int>(png.width), static_cast<int>(png.height), color ? 3 : 1);
  if (!png_image_finish_read(&png, nullptr, img.pixels.data(), 0, nullptr)) {
    const std::string msg = png.message;
    png_image_free(&png);
    throw Error(ErrorCode::SchemaViolation, "PNG decode failed: " + msg);
  }
  return img;
}

namespace {

Mask threshold(const Image& img) {
  Mask m(img.width, img.height);
  for (std::size_t i = 0; i < m.bits.size(); ++i) m.bits[i] = img.pixels[i] > 127 ? 1 : 0;
  return m;
}

Mask decode_pgm(std::span<const std::uint8_t> bytes) {
  HeaderReader header(bytes, ErrorCode::SchemaViolation);
  if (header.token() != "P5") header.fail("not a binary PGM");
  const int w = header.dimension("width");
  const int h = header.dimension("height");
  if (header.token() != "255") header.fail("mask PGM must be 8-bit (maxval 255)");
  const std::size_t offset = header.payload_offset();
  const std::size_t expected = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  if (bytes.size() < offset || bytes.size() - offset != expected) {
    header.fail("PGM payload size does not match header");
  }
  Image img(w, h, 1);
  std::copy_n(bytes.data() + offset, expected, img.pixels.data());
  return threshold(img);
}

}  // namespace

Mask decode_mask(std::span<const std::uint8_t> bytes) {
  static constexpr std::array<std::uint8_t, 8> kPngSignature{0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
  if (bytes.size() >= 8 && std::equal(kPngSignature.begin(), kPngSignature.end(), bytes.begin())) {
    png_image png{};
    png.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&png, bytes.data(), bytes.size())) {
      throw Error(ErrorCode::SchemaViolation, std::string("unreadable PNG: ") + png.message);
    }
    const auto native = png.format;
    png_image_free(&png);
    if (native & (PNG_FORMAT_FLAG_COLOR | PNG_FORMAT_FLAG_ALPHA | PNG_FORMAT_FLAG_LINEAR)) {
      throw Error(ErrorCode::SchemaViolation, "mask PNG must be 8-bit single-channel");
    }
    return threshold(decode_png(bytes));
  }
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5') return decode_pgm(bytes);
  throw Error(ErrorCode::SchemaViolation, "mask must be a PNG or binary PGM image");
}

Mask read_mask(const fs::path& path) {
  const std::vector<std::uint8_t> bytes = read_file(path);
  try {
    return decode_mask(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

void write_mask(const Mask& mask, const fs::path& path) {
  Image img(mask.width, mask.height, 1);
  for (std::size_t i = 0; i < mask.bits.size(); ++i) img.pixels[i] = mask.bits[i] ? 255 : 0;
  write_file_atomic(path, encode_png(img));
}

}  // namespace camcond::io
