#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <memory>
#include <string>
#include <vector>

#include "enrp/error.hpp"
#include "enrp/signal_io.hpp"

namespace enrp {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;
constexpr int kDefaultSampleRate = 44100;

std::uint32_t read_u32(const unsigned char* p) {
  return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 | std::uint32_t(p[3]) << 24;
}
std::uint16_t read_u16(const unsigned char* p) { return static_cast<std::uint16_t>(p[0] | p[1] << 8); }

void put_u32(std::string& out, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) out.push_back(static_cast<char>((v >> (8 * k)) & 0xff));
}
void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>(v >> 8));
}

std::vector<unsigned char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

std::int16_t quantize_pcm16(double value) {
  const double scaled = std::nearbyint(std::clamp(value, -1.0, 1.0) * 32768.0);
  return static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
}

SignalTensor load_audio(const std::filesystem::path& path, double max_seconds, int trim_multiple) {
  if (!std::filesystem::exists(path)) throw IoError("audio file not found: " + path.string());
  if (trim_multiple < 1) throw Error("trim multiple must be >= 1");
  const auto bytes = read_file(path);
  if (bytes.size() < 12 || std::string(bytes.begin(), bytes.begin() + 4) != "RIFF" ||
      std::string(bytes.begin() + 8, bytes.begin() + 12) != "WAVE")
    throw IoError(path.string() + " is not a RIFF/WAVE file");

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const unsigned char* data = nullptr;
  std::size_t data_size = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::string id(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.begin() + static_cast<std::ptrdiff_t>(pos + 4));
    const std::size_t size = read_u32(&bytes[pos + 4]);
    const std::size_t body = pos + 8;
    const std::size_t avail = std::min(size, bytes.size() - body);
    if (id == "fmt ") {
      if (avail < 16) throw IoError("truncated fmt chunk in " + path.string());
      format = read_u16(&bytes[body]);
      channels = read_u16(&bytes[body + 2]);
      rate = read_u32(&bytes[body + 4]);
      bits = read_u16(&bytes[body + 14]);
      if (format == kFormatExtensible && avail >= 26) format = read_u16(&bytes[body + 24]);
    } else if (id == "data") {
      data = &bytes[body];
      data_size = avail;
    }
    pos = body + size + (size & 1);
  }
  if (format != kFormatPcm || bits != 16)
    throw IoError("unsupported codec in " + path.string() + " (need 16-bit PCM, got format " + std::to_string(format) +
                  ", " + std::to_string(bits) + " bits)");
  if (channels == 0 || rate == 0) throw IoError("invalid fmt chunk in " + path.string());
  if (data == nullptr) throw IoError("no data chunk in " + path.string());

  const std::size_t frame = 2u * channels;
  std::size_t frames = data_size / frame;
  if (max_seconds > 0.0) frames = std::min(frames, static_cast<std::size_t>(max_seconds * rate));
  const std::size_t kept = frames - frames % static_cast<std::size_t>(trim_multiple);
  if (kept < 2) throw IoError("audio file " + path.string() + " holds fewer than 2 usable samples");

  SignalTensor s(1, static_cast<int>(kept), 1);
  for (std::size_t f = 0; f < kept; ++f) {
    double sum = 0.0;
    for (std::size_t ch = 0; ch < channels; ++ch)
      sum += static_cast<std::int16_t>(read_u16(data + f * frame + 2 * ch));
    s.values[f] = sum / channels / 32768.0;
  }
  s.source.format = SourceFormat::Pcm16;
  s.source.sample_rate = static_cast<int>(rate);
  s.source.original_channels = channels;
  s.source.trimmed_samples = frames - kept;
  return s;
}

void save_audio(const SignalTensor& signal, const std::filesystem::path& path) {
  if (signal.rank != 1 || signal.channels != 1) throw ShapeError("save_audio needs a mono rank-1 signal");
  const std::uint32_t rate = signal.source.sample_rate > 0 ? static_cast<std::uint32_t>(signal.source.sample_rate)
                                                           : kDefaultSampleRate;
  const auto data_size = static_cast<std::uint32_t>(signal.values.size() * 2);
  std::string out;
  out.reserve(44 + data_size);
  out += "RIFF";
  put_u32(out, 36 + data_size);
  out += "WAVEfmt ";
  put_u32(out, 16);
  put_u16(out, kFormatPcm);
  put_u16(out, 1);
  put_u32(out, rate);
  put_u32(out, rate * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  out += "data";
  put_u32(out, data_size);
  for (double v : signal.values) put_u16(out, static_cast<std::uint16_t>(quantize_pcm16(v)));
  std::ofstream f(path, std::ios::binary);
  if (!f.write(out.data(), static_cast<std::streamsize>(out.size()))) throw IoError("cannot write " + path.string());
}

}  // namespace enrp
