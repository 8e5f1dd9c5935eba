#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "rdeg/image.hpp"

namespace rdeg {

enum class ImageFormat { png, jpeg };

std::string_view extension(ImageFormat format) noexcept;  // "png" / "jpg"

using Bytes = std::vector<std::uint8_t>;

/// An image serialised in the format it should be stored in.
struct EncodedImage {
  Bytes bytes;
  ImageFormat format = ImageFormat::png;
};

/// Encodes losslessly. Output bytes are a pure function of the pixels.
Bytes encode_png(const Image& img);

/// Baseline JPEG, IJG quality scaling, 4:2:0 chroma subsampling, islow DCT.
/// Throws ParameterError unless quality is in [1, 100].
Bytes encode_jpeg(const Image& img, int quality);

/// Decodes PNG or JPEG (sniffed from the magic bytes) into RGB. Grayscale is
/// replicated across channels and alpha is dropped.
Image decode_image(std::span<const std::uint8_t> bytes);

/// Throws IoError when the file is missing or unreadable, FormatError when
/// the bytes do not decode.
Image load_image(const std::filesystem::path& path);

/// `quality` is only consulted for JPEG.
void save_image(const Image& img, const std::filesystem::path& path,
                ImageFormat format, int quality = 95);

Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path,
                std::span<const std::uint8_t> bytes);

}  // namespace rdeg
