#include "umbra/image_io.h"

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iterator>

#include <jpeglib.h>
#include <png.h>

namespace umbra {
namespace {

bool IsPng(std::span<const std::uint8_t> bytes) {
  static constexpr std::uint8_t kSig[8] = {0x89, 'P', 'N', 'G', '\r', '\n',
                                           0x1a, '\n'};
  return bytes.size() >= 8 && std::memcmp(bytes.data(), kSig, 8) == 0;
}

bool IsJpeg(std::span<const std::uint8_t> bytes) {
  return bytes.size() >= 3 && bytes[0] == 0xff && bytes[1] == 0xd8 &&
         bytes[2] == 0xff;
}

RasterImage DecodePng(std::span<const std::uint8_t> bytes, int channels) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw Error(ErrorCode::kIo, std::string("PNG decode: ") + image.message);
  }
  image.format = channels == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    png_image_free(&image);
    throw Error(ErrorCode::kIo, std::string("PNG decode: ") + image.message);
  }
  std::vector<double> data(buffer.size());
  std::transform(buffer.begin(), buffer.end(), data.begin(),
                 [](std::uint8_t v) { return v / 255.0; });
  return RasterImage(static_cast<int>(image.width),
                     static_cast<int>(image.height), channels,
                     std::move(data));
}

struct JpegErrorManager {
  jpeg_error_mgr base;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void JpegErrorExit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

RasterImage DecodeJpeg(std::span<const std::uint8_t> bytes, int channels) {
  jpeg_decompress_struct cinfo;
  JpegErrorManager err;
  std::vector<std::uint8_t> pixels;
  int w = 0;
  int h = 0;
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = JpegErrorExit;
  // libjpeg reports failures by longjmp; no objects are constructed
  // between here and the last library call.
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw Error(ErrorCode::kIo, std::string("JPEG decode: ") + err.message);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = channels == 1 ? JCS_GRAYSCALE : JCS_RGB;
  jpeg_start_decompress(&cinfo);
  w = static_cast<int>(cinfo.output_width);
  h = static_cast<int>(cinfo.output_height);
  pixels.resize(static_cast<std::size_t>(w) * h * channels);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW rows[1] = {pixels.data() + static_cast<std::size_t>(
                                            cinfo.output_scanline) *
                                            w * channels};
    jpeg_read_scanlines(&cinfo, rows, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);

  std::vector<double> data(pixels.size());
  std::transform(pixels.begin(), pixels.end(), data.begin(),
                 [](std::uint8_t v) { return v / 255.0; });
  return RasterImage(w, h, channels, std::move(data));
}

Bytes EncodePngBuffer(const void* pixels, int width, int height,
                      png_uint_32 format) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(width);
  image.height = static_cast<png_uint_32>(height);
  image.format = format;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, pixels, 0,
                                 nullptr)) {
    throw Error(ErrorCode::kIo, std::string("PNG encode: ") + image.message);
  }
  Bytes out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, pixels, 0,
                                 nullptr)) {
    throw Error(ErrorCode::kIo, std::string("PNG encode: ") + image.message);
  }
  out.resize(size);
  return out;
}

void RequireEncodable(const RasterImage& img) {
  if (img.channels() != 1 && img.channels() != 3) {
    throw Error(ErrorCode::kInvalidInput, "only 1- or 3-channel images encode");
  }
}

}  // namespace

std::uint8_t QuantizeUnit(double v) {
  const double scaled = std::floor(std::clamp(v, 0.0, 1.0) * 255.0 + 0.5);
  return static_cast<std::uint8_t>(scaled);
}

RasterImage DecodeImage(std::span<const std::uint8_t> bytes, int channels) {
  if (channels != 1 && channels != 3) {
    throw Error(ErrorCode::kInvalidParameter, "decode to 1 or 3 channels");
  }
  if (IsPng(bytes)) return DecodePng(bytes, channels);
  if (IsJpeg(bytes)) return DecodeJpeg(bytes, channels);
  throw Error(ErrorCode::kIo, "unrecognized image format");
}

RasterImage LoadImage(const std::string& path, int channels) {
  const Bytes bytes = ReadFileBytes(path);
  try {
    return DecodeImage(bytes, channels);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

Bytes EncodePng(const RasterImage& img) {
  RequireEncodable(img);
  std::vector<std::uint8_t> pixels(img.data().size());
  std::transform(img.data().begin(), img.data().end(), pixels.begin(),
                 QuantizeUnit);
  return EncodePngBuffer(pixels.data(), img.width(), img.height(),
                         img.channels() == 1 ? PNG_FORMAT_GRAY
                                             : PNG_FORMAT_RGB);
}

Bytes EncodePng16(const RasterImage& img) {
  RequireEncodable(img);
  std::vector<std::uint16_t> pixels(img.data().size());
  std::transform(img.data().begin(), img.data().end(), pixels.begin(),
                 [](double v) {
                   return static_cast<std::uint16_t>(
                       std::floor(std::clamp(v, 0.0, 1.0) * 65535.0 + 0.5));
                 });
  return EncodePngBuffer(
      pixels.data(), img.width(), img.height(),
      img.channels() == 1 ? PNG_FORMAT_LINEAR_Y : PNG_FORMAT_LINEAR_RGB);
}

Bytes EncodeJpeg(const RasterImage& img, int quality) {
  RequireEncodable(img);
  std::vector<std::uint8_t> pixels(img.data().size());
  std::transform(img.data().begin(), img.data().end(), pixels.begin(),
                 QuantizeUnit);
  const int stride = img.width() * img.channels();
  jpeg_compress_struct cinfo;
  JpegErrorManager err;
  unsigned char* buffer = nullptr;
  unsigned long size = 0;
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = JpegErrorExit;
  if (setjmp(err.jump)) {
    jpeg_destroy_compress(&cinfo);
    std::free(buffer);
    throw Error(ErrorCode::kIo, std::string("JPEG encode: ") + err.message);
  }
  jpeg_create_compress(&cinfo);
  jpeg_mem_dest(&cinfo, &buffer, &size);
  cinfo.image_width = static_cast<JDIMENSION>(img.width());
  cinfo.image_height = static_cast<JDIMENSION>(img.height());
  cinfo.input_components = img.channels();
  cinfo.in_color_space = img.channels() == 1 ? JCS_GRAYSCALE : JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, quality, TRUE);
  jpeg_start_compress(&cinfo, TRUE);
  while (cinfo.next_scanline < cinfo.image_height) {
    JSAMPROW rows[1] = {
        pixels.data() + static_cast<std::size_t>(cinfo.next_scanline) * stride};
    jpeg_write_scanlines(&cinfo, rows, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);
  Bytes out(buffer, buffer + size);
  std::free(buffer);
  return out;
}

void SaveImage(const RasterImage& img, const std::string& path) {
  std::string ext = path.substr(path.find_last_of('.') + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
  if (ext == "jpg" || ext == "jpeg") {
    WriteFileBytes(path, EncodeJpeg(img));
  } else {
    WriteFileBytes(path, EncodePng(img));
  }
}

void SavePng16(const RasterImage& img, const std::string& path) {
  WriteFileBytes(path, EncodePng16(img));
}

RasterImage MaskToImage(const Mask& mask) {
  RasterImage out(mask.width(), mask.height(), 1);
  for (std::size_t i = 0; i < mask.pixel_count(); ++i) {
    out.at(i, 0) = mask.at(i) ? 1.0 : 0.0;
  }
  return out;
}

Bytes MaskToPngBytes(const Mask& mask) { return EncodePng(MaskToImage(mask)); }

Mask LoadMask(const std::string& path) {
  const RasterImage img = LoadImage(path, 1);
  Mask out(img.width(), img.height());
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    out.set(i, img.at(i, 0) >= 0.5);
  }
  return out;
}

Bytes ReadFileBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  return Bytes(std::istreambuf_iterator<char>(in),
               std::istreambuf_iterator<char>());
}

void WriteFileBytes(const std::string& path,
                    std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path);
}

}  // namespace umbra
