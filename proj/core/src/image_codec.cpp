#include "sogs/image_codec.hpp"

#include <jpeglib.h>
#include <png.h>

#include <algorithm>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <memory>
#include <string>

#include "sogs/error.hpp"

namespace sogs {
namespace {

[[noreturn]] void decode_failure(std::string_view codec, const std::string& what) {
  throw Error(ErrorCode::kDecodeError, std::string(codec) + ": " + what);
}

// ---------------------------------------------------------------- PNG

struct PngReader {
  std::span<const std::uint8_t> bytes;
  std::size_t offset = 0;
};

struct PngErrorState {
  char message[200] = "unknown libpng error";
};

void png_error_handler(png_structp png, png_const_charp msg) {
  auto* state = static_cast<PngErrorState*>(png_get_error_ptr(png));
  std::snprintf(state->message, sizeof(state->message), "%s", msg);
  png_longjmp(png, 1);
}

void png_warning_handler(png_structp, png_const_charp) {}

void png_write_to_vector(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + length);
}

void png_flush_noop(png_structp) {}

void png_read_from_span(png_structp png, png_bytep data, png_size_t length) {
  auto* src = static_cast<PngReader*>(png_get_io_ptr(png));
  if (length > src->bytes.size() - src->offset) {
    png_error(png, "unexpected end of PNG data");
  }
  std::memcpy(data, src->bytes.data() + src->offset, length);
  src->offset += length;
}

int png_color_type_for(std::size_t channels) {
  switch (channels) {
    case 1:
      return PNG_COLOR_TYPE_GRAY;
    case 3:
      return PNG_COLOR_TYPE_RGB;
    default:
      return PNG_COLOR_TYPE_RGB_ALPHA;
  }
}

class PngCodec final : public ImageCodec {
 public:
  std::string_view tag() const noexcept override { return "png"; }
  std::string_view extension() const noexcept override { return "png"; }
  const CodecCapabilities& capabilities() const noexcept override { return caps_; }

  std::vector<std::uint8_t> encode(const ImagePlane& plane, int) const override {
    const std::size_t bytes_per_sample = plane.bit_depth == 16 ? 2 : 1;
    const std::size_t row_bytes = plane.width * plane.channels * bytes_per_sample;
    // Big-endian sample rows as PNG stores them.
    std::vector<std::uint8_t> raw(row_bytes * plane.height);
    for (std::size_t i = 0; i < plane.samples.size(); ++i) {
      if (bytes_per_sample == 2) {
        raw[2 * i] = static_cast<std::uint8_t>(plane.samples[i] >> 8);
        raw[2 * i + 1] = static_cast<std::uint8_t>(plane.samples[i] & 0xff);
      } else {
        raw[i] = static_cast<std::uint8_t>(plane.samples[i]);
      }
    }
    std::vector<png_bytep> rows(plane.height);
    for (std::size_t r = 0; r < plane.height; ++r) rows[r] = raw.data() + r * row_bytes;

    std::vector<std::uint8_t> out;
    PngErrorState err;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err,
                                              png_error_handler, png_warning_handler);
    if (!png) throw Error(ErrorCode::kIoError, "png: cannot allocate writer");
    png_infop info = png_create_info_struct(png);
    if (!info || setjmp(png_jmpbuf(png))) {
      png_destroy_write_struct(&png, info ? &info : nullptr);
      throw Error(ErrorCode::kIoError, std::string("png encode: ") + err.message);
    }
    png_set_write_fn(png, &out, png_write_to_vector, png_flush_noop);
    png_set_IHDR(png, info, static_cast<png_uint_32>(plane.width),
                 static_cast<png_uint_32>(plane.height), plane.bit_depth,
                 png_color_type_for(plane.channels), PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_set_compression_level(png, 9);
    png_set_filter(png, PNG_FILTER_TYPE_BASE, PNG_ALL_FILTERS);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return out;
  }

  ImagePlane decode(std::span<const std::uint8_t> bytes) const override {
    if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
      decode_failure("png", "missing PNG signature");
    }
    PngReader reader{bytes, 0};
    PngErrorState err;
    ImagePlane plane;
    std::vector<std::uint8_t> raw;
    std::vector<png_bytep> rows;

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err,
                                             png_error_handler, png_warning_handler);
    if (!png) throw Error(ErrorCode::kIoError, "png: cannot allocate reader");
    png_infop info = png_create_info_struct(png);
    if (!info || setjmp(png_jmpbuf(png))) {
      png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
      decode_failure("png", err.message);
    }
    png_set_read_fn(png, &reader, png_read_from_span);
    png_read_info(png, info);
    const png_uint_32 width = png_get_image_width(png, info);
    const png_uint_32 height = png_get_image_height(png, info);
    const int depth = png_get_bit_depth(png, info);
    const int color = png_get_color_type(png, info);
    std::size_t channels = 0;
    if (color == PNG_COLOR_TYPE_GRAY) channels = 1;
    if (color == PNG_COLOR_TYPE_RGB) channels = 3;
    if (color == PNG_COLOR_TYPE_RGB_ALPHA) channels = 4;
    if (channels == 0 || (depth != 8 && depth != 16)) {
      png_destroy_read_struct(&png, &info, nullptr);
      decode_failure("png", "unsupported color type or bit depth");
    }
    // Refuse absurd headers before allocating.
    if (static_cast<std::uint64_t>(width) * height * channels > (1ull << 32)) {
      png_destroy_read_struct(&png, &info, nullptr);
      decode_failure("png", "image dimensions too large");
    }
    plane.width = width;
    plane.height = height;
    plane.channels = channels;
    plane.bit_depth = depth;
    const std::size_t row_bytes = png_get_rowbytes(png, info);
    raw.resize(row_bytes * height);
    rows.resize(height);
    for (std::size_t r = 0; r < height; ++r) rows[r] = raw.data() + r * row_bytes;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    plane.samples.resize(static_cast<std::size_t>(width) * height * channels);
    for (std::size_t i = 0; i < plane.samples.size(); ++i) {
      plane.samples[i] = depth == 16
                             ? static_cast<std::uint16_t>((raw[2 * i] << 8) | raw[2 * i + 1])
                             : raw[i];
    }
    return plane;
  }

 private:
  CodecCapabilities caps_{true, true, true, {1, 3, 4}};
};

// ---------------------------------------------------------------- JPEG

struct JpegError {
  jpeg_error_mgr mgr;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX] = "unknown libjpeg error";
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegError*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

void jpeg_silent(j_common_ptr, int) {}

class JpegCodec final : public ImageCodec {
 public:
  std::string_view tag() const noexcept override { return "jpeg"; }
  std::string_view extension() const noexcept override { return "jpg"; }
  const CodecCapabilities& capabilities() const noexcept override { return caps_; }

  std::vector<std::uint8_t> encode(const ImagePlane& plane, int quality) const override {
    std::vector<std::uint8_t> raw(plane.samples.begin(), plane.samples.end());
    jpeg_compress_struct cinfo{};
    JpegError err;
    cinfo.err = jpeg_std_error(&err.mgr);
    err.mgr.error_exit = jpeg_error_exit;
    err.mgr.emit_message = jpeg_silent;
    unsigned char* buffer = nullptr;
    unsigned long size = 0;
    if (setjmp(err.jump)) {
      jpeg_destroy_compress(&cinfo);
      std::free(buffer);
      throw Error(ErrorCode::kIoError, std::string("jpeg encode: ") + err.message);
    }
    jpeg_create_compress(&cinfo);
    jpeg_mem_dest(&cinfo, &buffer, &size);
    cinfo.image_width = static_cast<JDIMENSION>(plane.width);
    cinfo.image_height = static_cast<JDIMENSION>(plane.height);
    cinfo.input_components = static_cast<int>(plane.channels);
    cinfo.in_color_space = plane.channels == 1 ? JCS_GRAYSCALE : JCS_RGB;
    jpeg_set_defaults(&cinfo);
    jpeg_set_quality(&cinfo, std::clamp(quality, 1, 100), TRUE);
    // No chroma subsampling: every channel is a separate attribute.
    for (int c = 0; c < cinfo.num_components; ++c) {
      cinfo.comp_info[c].h_samp_factor = 1;
      cinfo.comp_info[c].v_samp_factor = 1;
    }
    jpeg_start_compress(&cinfo, TRUE);
    const std::size_t stride = plane.width * plane.channels;
    while (cinfo.next_scanline < cinfo.image_height) {
      JSAMPROW row = raw.data() + cinfo.next_scanline * stride;
      jpeg_write_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_compress(&cinfo);
    jpeg_destroy_compress(&cinfo);
    std::vector<std::uint8_t> out(buffer, buffer + size);
    std::free(buffer);
    return out;
  }

  ImagePlane decode(std::span<const std::uint8_t> bytes) const override {
    jpeg_decompress_struct cinfo{};
    JpegError err;
    cinfo.err = jpeg_std_error(&err.mgr);
    err.mgr.error_exit = jpeg_error_exit;
    err.mgr.emit_message = jpeg_silent;
    ImagePlane plane;
    std::vector<std::uint8_t> raw;
    if (setjmp(err.jump)) {
      jpeg_destroy_decompress(&cinfo);
      decode_failure("jpeg", err.message);
    }
    jpeg_create_decompress(&cinfo);
    jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
    jpeg_read_header(&cinfo, TRUE);
    jpeg_start_decompress(&cinfo);
    plane.width = cinfo.output_width;
    plane.height = cinfo.output_height;
    plane.channels = static_cast<std::size_t>(cinfo.output_components);
    plane.bit_depth = 8;
    const std::size_t stride = plane.width * plane.channels;
    raw.resize(stride * plane.height);
    while (cinfo.output_scanline < cinfo.output_height) {
      JSAMPROW row = raw.data() + cinfo.output_scanline * stride;
      jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    plane.samples.assign(raw.begin(), raw.end());
    return plane;
  }

 private:
  CodecCapabilities caps_{false, true, false, {1, 3}};
};

const PngCodec kPng;
const JpegCodec kJpeg;

}  // namespace

bool ImageCodec::supports(int bit_depth, std::size_t channels) const noexcept {
  const CodecCapabilities& caps = capabilities();
  const bool depth_ok = (bit_depth == 8 && caps.supports_8bit) ||
                        (bit_depth == 16 && caps.supports_16bit);
  return depth_ok && std::find(caps.channel_counts.begin(), caps.channel_counts.end(),
                               channels) != caps.channel_counts.end();
}

const ImageCodec& find_codec(std::string_view tag) {
  if (tag == kPng.tag()) return kPng;
  if (tag == kJpeg.tag()) return kJpeg;
  throw Error(ErrorCode::kUnsupportedCodec,
              "codec '" + std::string(tag) + "' is not available in this build");
}

std::vector<std::string> codec_tags() { return {"png", "jpeg"}; }

std::vector<std::uint8_t> encode_plane(const ImagePlane& plane, std::string_view tag,
                                       int quality) {
  const ImageCodec& codec = find_codec(tag);
  if (plane.bit_depth != 8 && plane.bit_depth != 16) {
    throw Error(ErrorCode::kInvalidInput, "bit depth must be 8 or 16");
  }
  if (plane.width == 0 || plane.height == 0 ||
      plane.samples.size() != plane.width * plane.height * plane.channels) {
    throw Error(ErrorCode::kInvalidInput, "image dimensions do not match the sample count");
  }
  if (!codec.supports(plane.bit_depth, plane.channels)) {
    throw Error(ErrorCode::kUnsupportedCodec,
                "codec '" + std::string(tag) + "' cannot store " +
                    std::to_string(plane.bit_depth) + "-bit images with " +
                    std::to_string(plane.channels) + " channels");
  }
  const std::uint32_t limit = plane.bit_depth == 16 ? 0xffffu : 0xffu;
  if (std::any_of(plane.samples.begin(), plane.samples.end(),
                  [&](std::uint16_t s) { return s > limit; })) {
    throw Error(ErrorCode::kInvalidInput, "sample exceeds the image bit depth");
  }
  return codec.encode(plane, quality);
}

ImagePlane decode_plane(std::span<const std::uint8_t> bytes, std::string_view tag) {
  return find_codec(tag).decode(bytes);
}

}  // namespace sogs
