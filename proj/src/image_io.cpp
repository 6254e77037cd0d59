#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <vector>

#include "enrp/error.hpp"
#include "enrp/signal_io.hpp"

namespace enrp {

std::uint8_t quantize_8bit(double value) {
  const double scaled = (std::clamp(value, -1.0, 1.0) + 1.0) * 127.5;
  return static_cast<std::uint8_t>(std::clamp(std::nearbyint(scaled), 0.0, 255.0));
}

SignalTensor load_image(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw IoError("image not found: " + path.string());
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str()))
    throw IoError("cannot decode PNG " + path.string() + ": " + image.message);
  if (image.format & PNG_FORMAT_FLAG_LINEAR) {
    png_image_free(&image);
    throw IoError("unsupported bit depth in " + path.string() + " (only 8-bit PNG is accepted)");
  }
  if (image.width != image.height) {
    const auto w = image.width, h = image.height;
    png_image_free(&image);
    throw IoError("image " + path.string() + " is not square (" + std::to_string(w) + "x" + std::to_string(h) + ")");
  }
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  const int n = static_cast<int>(image.width);
  const int channels = color ? 3 : 1;
  std::vector<png_byte> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw IoError("cannot decode PNG " + path.string() + ": " + msg);
  }
  if (n < 2) throw IoError("image " + path.string() + " is smaller than 2x2");

  SignalTensor s(2, n, channels);
  for (std::size_t k = 0; k < s.values.size(); ++k) s.values[k] = buffer[k] / 127.5 - 1.0;
  s.source.format = SourceFormat::Png8;
  s.source.original_channels = channels;
  return s;
}

void save_image(const SignalTensor& signal, const std::filesystem::path& path) {
  if (signal.rank != 2) throw ShapeError("save_image needs a rank-2 signal");
  if (signal.channels != 1 && signal.channels != 3) throw ShapeError("PNG output supports 1 or 3 channels");
  std::vector<png_byte> buffer(signal.values.size());
  for (std::size_t k = 0; k < buffer.size(); ++k) buffer[k] = quantize_8bit(signal.values[k]);
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(signal.n);
  image.height = static_cast<png_uint_32>(signal.n);
  image.format = signal.channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&image, path.c_str(), 0, buffer.data(), 0, nullptr))
    throw IoError("cannot write PNG " + path.string() + ": " + image.message);
}

void save_reconstruction(const SignalTensor& signal, const std::filesystem::path& path) {
  if (signal.rank == 2)
    save_image(signal, path);
  else
    save_audio(signal, path);
}

}  // namespace enrp
