#ifndef UMBRA_IMAGE_IO_H_
#define UMBRA_IMAGE_IO_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "umbra/image.h"

namespace umbra {

using Bytes = std::vector<std::uint8_t>;

// Decodes 8-bit PNG or JPEG (detected by signature). Samples are divided by
// 255. `channels` selects 1 (luma) or 3 (RGB) output.
RasterImage DecodeImage(std::span<const std::uint8_t> bytes, int channels = 3);
RasterImage LoadImage(const std::string& path, int channels = 3);

// 8-bit PNG; samples are clamped to [0,1] and rounded half up.
Bytes EncodePng(const RasterImage& img);
// 16-bit PNG, value * 65535 rounded half up. Used for scale-field dumps.
Bytes EncodePng16(const RasterImage& img);
Bytes EncodeJpeg(const RasterImage& img, int quality = 95);

// Format follows the extension (.jpg/.jpeg, otherwise PNG).
void SaveImage(const RasterImage& img, const std::string& path);
void SavePng16(const RasterImage& img, const std::string& path);

Bytes MaskToPngBytes(const Mask& mask);
Mask LoadMask(const std::string& path);
RasterImage MaskToImage(const Mask& mask);

Bytes ReadFileBytes(const std::string& path);
void WriteFileBytes(const std::string& path, std::span<const std::uint8_t> bytes);

std::uint8_t QuantizeUnit(double v);

}  // namespace umbra

#endif  // UMBRA_IMAGE_IO_H_
