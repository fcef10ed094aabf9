#include "leafscan/codec.hpp"

#include "leafscan/atomic_file.hpp"
#include "leafscan/error.hpp"

#include <png.h>
#include <tiffio.h>

#include <algorithm>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <memory>
#include <string>

namespace leafscan {

namespace {

std::string describe(std::string_view source, std::string_view reason) {
  return std::string(source) + ": " + std::string(reason);
}

RasterImage decode_png(std::span<const std::uint8_t> bytes, std::string_view source) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (png_image_begin_read_from_memory(&image, bytes.data(), bytes.size()) == 0) {
    throw DecodeError(describe(source, image.message));
  }
  // Simplified API reports 16-bit sources as linear; those are out of scope.
  if ((image.format & PNG_FORMAT_FLAG_LINEAR) != 0) {
    png_image_free(&image);
    throw UnsupportedFormatError(describe(source, "unsupported PNG bit depth (only 8-bit is accepted)"));
  }
  if (image.width < 1 || image.height < 1 || image.width > 1u << 15 || image.height > 1u << 15) {
    png_image_free(&image);
    throw UnsupportedFormatError(describe(source, "unsupported PNG dimensions"));
  }
  // RGBA output so the library never composites alpha against a background.
  image.format = PNG_FORMAT_RGBA;
  const auto width = static_cast<int>(image.width);
  const auto height = static_cast<int>(image.height);
  std::vector<std::uint8_t> rgba(PNG_IMAGE_SIZE(image));
  if (png_image_finish_read(&image, nullptr, rgba.data(), 0, nullptr) == 0) {
    const std::string reason = image.message;
    png_image_free(&image);
    throw DecodeError(describe(source, reason));
  }
  std::vector<Rgb> px(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
  for (std::size_t i = 0; i < px.size(); ++i) {
    px[i] = Rgb{rgba[4 * i], rgba[4 * i + 1], rgba[4 * i + 2]};
  }
  return RasterImage(width, height, std::move(px));
}

// In-memory stream for libtiff's client interface.
struct TiffMemory {
  std::vector<std::uint8_t> data;
  toff_t pos = 0;
  bool writable = false;
};

tsize_t tiff_read(thandle_t h, tdata_t buf, tsize_t size) {
  auto *m = static_cast<TiffMemory *>(h);
  if (m->pos >= m->data.size()) {
    return 0;
  }
  const auto n = std::min<toff_t>(static_cast<toff_t>(size), m->data.size() - m->pos);
  std::memcpy(buf, m->data.data() + m->pos, n);
  m->pos += n;
  return static_cast<tsize_t>(n);
}

tsize_t tiff_write(thandle_t h, tdata_t buf, tsize_t size) {
  auto *m = static_cast<TiffMemory *>(h);
  if (!m->writable) {
    return 0;
  }
  const auto n = static_cast<toff_t>(size);
  if (m->pos + n > m->data.size()) {
    m->data.resize(m->pos + n);
  }
  std::memcpy(m->data.data() + m->pos, buf, n);
  m->pos += n;
  return size;
}

toff_t tiff_seek(thandle_t h, toff_t off, int whence) {
  auto *m = static_cast<TiffMemory *>(h);
  toff_t base = 0;
  if (whence == SEEK_CUR) {
    base = m->pos;
  } else if (whence == SEEK_END) {
    base = m->data.size();
  }
  const auto target = base + off;
  if (m->writable && target > m->data.size()) {
    m->data.resize(target);
  }
  m->pos = target;
  return m->pos;
}

int tiff_close(thandle_t) { return 0; }
toff_t tiff_size(thandle_t h) { return static_cast<TiffMemory *>(h)->data.size(); }
int tiff_map(thandle_t, tdata_t *, toff_t *) { return 0; }
void tiff_unmap(thandle_t, tdata_t, toff_t) {}

thread_local std::string tiff_last_error;

void tiff_error_handler(const char *module, const char *fmt, va_list ap) {
  char buf[512];
  std::vsnprintf(buf, sizeof buf, fmt, ap);
  tiff_last_error = module != nullptr ? std::string(module) + ": " + buf : std::string(buf);
}

struct TiffCloser {
  void operator()(TIFF *t) const { TIFFClose(t); }
};
using TiffHandle = std::unique_ptr<TIFF, TiffCloser>;

TiffHandle open_tiff(TiffMemory &mem, const char *mode) {
  TIFFSetErrorHandler(tiff_error_handler);
  TIFFSetWarningHandler(nullptr);
  tiff_last_error.clear();
  return TiffHandle(TIFFClientOpen("memory", mode, &mem, tiff_read, tiff_write, tiff_seek, tiff_close, tiff_size,
                                   tiff_map, tiff_unmap));
}

RasterImage decode_tiff(std::span<const std::uint8_t> bytes, std::string_view source) {
  TiffMemory mem{std::vector<std::uint8_t>(bytes.begin(), bytes.end())};
  auto tif = open_tiff(mem, "rm");
  if (!tif) {
    throw DecodeError(describe(source, tiff_last_error.empty() ? "not a readable TIFF" : tiff_last_error));
  }
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint16_t bits = 0;
  std::uint16_t samples = 0;
  std::uint16_t photometric = 0;
  std::uint16_t compression = COMPRESSION_NONE;
  std::uint16_t planar = PLANARCONFIG_CONTIG;
  TIFFGetField(tif.get(), TIFFTAG_IMAGEWIDTH, &width);
  TIFFGetField(tif.get(), TIFFTAG_IMAGELENGTH, &height);
  TIFFGetFieldDefaulted(tif.get(), TIFFTAG_BITSPERSAMPLE, &bits);
  TIFFGetFieldDefaulted(tif.get(), TIFFTAG_SAMPLESPERPIXEL, &samples);
  TIFFGetField(tif.get(), TIFFTAG_PHOTOMETRIC, &photometric);
  TIFFGetFieldDefaulted(tif.get(), TIFFTAG_COMPRESSION, &compression);
  TIFFGetFieldDefaulted(tif.get(), TIFFTAG_PLANARCONFIG, &planar);

  if (bits != 8) {
    throw UnsupportedFormatError(describe(source, "unsupported TIFF bit depth " + std::to_string(bits)));
  }
  if (photometric != PHOTOMETRIC_RGB || (samples != 3 && samples != 4)) {
    throw UnsupportedFormatError(describe(source, "unsupported TIFF layout (only RGB/RGBA is accepted)"));
  }
  if (compression != COMPRESSION_NONE && compression != COMPRESSION_ADOBE_DEFLATE &&
      compression != COMPRESSION_DEFLATE) {
    throw UnsupportedFormatError(describe(source, "unsupported TIFF compression " + std::to_string(compression)));
  }
  if (planar != PLANARCONFIG_CONTIG || TIFFIsTiled(tif.get())) {
    throw UnsupportedFormatError(describe(source, "unsupported TIFF organization (planar or tiled)"));
  }
  if (width < 1 || height < 1 || width > 1u << 15 || height > 1u << 15) {
    throw UnsupportedFormatError(describe(source, "unsupported TIFF dimensions"));
  }

  const auto w = static_cast<int>(width);
  const auto h = static_cast<int>(height);
  std::vector<Rgb> px(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
  std::vector<std::uint8_t> row(static_cast<std::size_t>(TIFFScanlineSize(tif.get())));
  if (row.size() < static_cast<std::size_t>(w) * samples) {
    throw DecodeError(describe(source, "TIFF scanline shorter than declared width"));
  }
  for (int y = 0; y < h; ++y) {
    if (TIFFReadScanline(tif.get(), row.data(), static_cast<std::uint32_t>(y), 0) < 0) {
      throw DecodeError(describe(source, tiff_last_error.empty() ? "truncated TIFF data" : tiff_last_error));
    }
    for (int x = 0; x < w; ++x) {
      const auto *s = row.data() + static_cast<std::size_t>(x) * samples;
      px[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x)] =
          Rgb{s[0], s[1], s[2]};
    }
  }
  return RasterImage(w, h, std::move(px));
}

} // namespace

bool looks_like_png(std::span<const std::uint8_t> bytes) noexcept {
  static constexpr std::uint8_t sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  return bytes.size() >= 8 && std::equal(std::begin(sig), std::end(sig), bytes.begin());
}

bool looks_like_tiff(std::span<const std::uint8_t> bytes) noexcept {
  if (bytes.size() < 4) {
    return false;
  }
  return (bytes[0] == 'I' && bytes[1] == 'I' && bytes[2] == 42 && bytes[3] == 0) ||
         (bytes[0] == 'M' && bytes[1] == 'M' && bytes[2] == 0 && bytes[3] == 42);
}

RasterImage decode_image(std::span<const std::uint8_t> bytes, std::string_view source) {
  if (looks_like_png(bytes)) {
    return decode_png(bytes, source);
  }
  if (looks_like_tiff(bytes)) {
    return decode_tiff(bytes, source);
  }
  throw UnsupportedFormatError(describe(source, "unrecognized image format (expected PNG or TIFF)"));
}

RasterImage load_image(const std::filesystem::path &path) {
  std::vector<std::uint8_t> bytes;
  try {
    bytes = read_file(path);
  } catch (const IoError &e) {
    throw DecodeError(describe(path.string(), "unreadable file"));
  }
  return decode_image(bytes, path.string());
}

std::vector<std::uint8_t> encode_png(const RasterImage &img) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width());
  image.height = static_cast<png_uint_32>(img.height());
  image.format = PNG_FORMAT_RGB;
  static_assert(sizeof(Rgb) == 3);
  const auto *buffer = reinterpret_cast<const std::uint8_t *>(img.pixels().data());

  png_alloc_size_t size = 0;
  if (png_image_write_to_memory(&image, nullptr, &size, 0, buffer, 0, nullptr) == 0) {
    throw EncodeError(std::string("PNG size query failed: ") + image.message);
  }
  std::vector<std::uint8_t> out(size);
  if (png_image_write_to_memory(&image, out.data(), &size, 0, buffer, 0, nullptr) == 0) {
    throw EncodeError(std::string("PNG encode failed: ") + image.message);
  }
  out.resize(size);
  return out;
}

void save_png(const RasterImage &img, const std::filesystem::path &path) {
  write_file_atomic(path, encode_png(img));
}

std::vector<std::uint8_t> encode_tiff(const RasterImage &img, bool deflate) {
  TiffMemory mem;
  mem.writable = true;
  {
    auto tif = open_tiff(mem, "w");
    if (!tif) {
      throw EncodeError("cannot open TIFF writer: " + tiff_last_error);
    }
    TIFFSetField(tif.get(), TIFFTAG_IMAGEWIDTH, static_cast<std::uint32_t>(img.width()));
    TIFFSetField(tif.get(), TIFFTAG_IMAGELENGTH, static_cast<std::uint32_t>(img.height()));
    TIFFSetField(tif.get(), TIFFTAG_BITSPERSAMPLE, 8);
    TIFFSetField(tif.get(), TIFFTAG_SAMPLESPERPIXEL, 3);
    TIFFSetField(tif.get(), TIFFTAG_PHOTOMETRIC, PHOTOMETRIC_RGB);
    TIFFSetField(tif.get(), TIFFTAG_PLANARCONFIG, PLANARCONFIG_CONTIG);
    TIFFSetField(tif.get(), TIFFTAG_COMPRESSION, deflate ? COMPRESSION_ADOBE_DEFLATE : COMPRESSION_NONE);
    TIFFSetField(tif.get(), TIFFTAG_ROWSPERSTRIP, 16);
    std::vector<std::uint8_t> row(static_cast<std::size_t>(img.width()) * 3);
    for (int y = 0; y < img.height(); ++y) {
      for (int x = 0; x < img.width(); ++x) {
        const auto p = img.at(x, y);
        row[3 * static_cast<std::size_t>(x)] = p.r;
        row[3 * static_cast<std::size_t>(x) + 1] = p.g;
        row[3 * static_cast<std::size_t>(x) + 2] = p.b;
      }
      if (TIFFWriteScanline(tif.get(), row.data(), static_cast<std::uint32_t>(y), 0) < 0) {
        throw EncodeError("TIFF scanline write failed: " + tiff_last_error);
      }
    }
  }
  return std::move(mem.data);
}

RasterImage mask_to_image(const BinaryMask &mask) {
  RasterImage out(mask.width(), mask.height(), Rgb{255, 255, 255});
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask.test(i)) {
      out[i] = Rgb{0, 0, 0};
    }
  }
  return out;
}

} // namespace leafscan
