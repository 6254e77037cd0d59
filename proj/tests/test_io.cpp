#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <png.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "enrp/error.hpp"
#include "enrp/json_io.hpp"
#include "enrp/model_file.hpp"
#include "enrp/reports.hpp"
#include "enrp/signal_io.hpp"

using namespace enrp;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "enrp_test_io";
  fs::create_directories(dir);
  return dir / name;
}

void write_png(const fs::path& path, int width, int height, std::uint32_t format, const void* pixels) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(width);
  image.height = static_cast<png_uint_32>(height);
  image.format = format;
  REQUIRE(png_image_write_to_file(&image, path.c_str(), 0, pixels, 0, nullptr));
}

void put(std::string& s, std::uint32_t v, int bytes) {
  for (int k = 0; k < bytes; ++k) s.push_back(static_cast<char>((v >> (8 * k)) & 0xff));
}

// Minimal RIFF/WAVE writer for fixtures the library cannot produce itself.
void write_wav(const fs::path& path, std::uint16_t format, std::uint16_t channels, std::uint16_t bits,
               const std::vector<std::int16_t>& interleaved, std::uint32_t rate = 44100) {
  const auto data_size = static_cast<std::uint32_t>(interleaved.size() * 2);
  std::string out = "RIFF";
  put(out, 36 + data_size, 4);
  out += "WAVEfmt ";
  put(out, 16, 4);
  put(out, format, 2);
  put(out, channels, 2);
  put(out, rate, 4);
  put(out, rate * channels * bits / 8, 4);
  put(out, static_cast<std::uint32_t>(channels * bits / 8), 2);
  put(out, bits, 2);
  out += "data";
  put(out, data_size, 4);
  for (auto v : interleaved) put(out, static_cast<std::uint16_t>(v), 2);
  std::ofstream(path, std::ios::binary) << out;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("natural test image loads as a 128x128 RGB signal") {
  const auto s = load_image(fs::path(ENRP_TEST_DATA) / "astronaut_128.png");
  CHECK(s.rank == 2);
  CHECK(s.n == 128);
  CHECK(s.channels == 3);
  CHECK(s.source.format == SourceFormat::Png8);
  CHECK_NOTHROW(s.validate());
}

TEST_CASE("PNG round trip is pixel-identical") {
  const auto src = fs::path(ENRP_TEST_DATA) / "coffee_64.png";
  const auto s = load_image(src);
  const auto out = scratch("roundtrip.png");
  save_image(s, out);
  const auto back = load_image(out);
  CHECK(back.values == s.values);
  for (std::size_t k = 0; k < s.values.size(); k += 97) CHECK(quantize_8bit(s.values[k]) == quantize_8bit(back.values[k]));
}

TEST_CASE("grayscale and black images") {
  std::vector<std::uint8_t> black(16 * 16, 0);
  const auto path = scratch("black.png");
  write_png(path, 16, 16, PNG_FORMAT_GRAY, black.data());
  const auto s = load_image(path);
  CHECK(s.channels == 1);
  for (double v : s.values) CHECK(v == -1.0);

  std::vector<std::uint8_t> ramp(4 * 4);
  for (std::size_t k = 0; k < ramp.size(); ++k) ramp[k] = static_cast<std::uint8_t>(k * 17);
  write_png(scratch("ramp.png"), 4, 4, PNG_FORMAT_GRAY, ramp.data());
  const auto r = load_image(scratch("ramp.png"));
  for (std::size_t k = 0; k < ramp.size(); ++k) CHECK(r.values[k] == doctest::Approx(ramp[k] / 127.5 - 1.0));
}

TEST_CASE("all -1 tensor saves as an all-zero image") {
  SignalTensor s(2, 8, 3);
  std::fill(s.values.begin(), s.values.end(), -1.0);
  save_image(s, scratch("zero.png"));
  const auto back = load_image(scratch("zero.png"));
  for (double v : back.values) CHECK(v == -1.0);
}

TEST_CASE("image errors") {
  std::vector<std::uint8_t> rect(100 * 128 * 3, 10);
  write_png(scratch("rect.png"), 128, 100, PNG_FORMAT_RGB, rect.data());
  CHECK_THROWS_WITH_AS(load_image(scratch("rect.png")), doctest::Contains("not square"), IoError);

  std::vector<std::uint16_t> deep(8 * 8 * 3, 1000);
  write_png(scratch("deep.png"), 8, 8, PNG_FORMAT_LINEAR_RGB, deep.data());
  CHECK_THROWS_WITH_AS(load_image(scratch("deep.png")), doctest::Contains("bit depth"), IoError);

  std::ofstream(scratch("garbage.png")) << "not a png at all";
  CHECK_THROWS_AS(load_image(scratch("garbage.png")), IoError);

  CHECK_THROWS_WITH_AS(load_image(scratch("missing.png")), doctest::Contains("missing.png"), IoError);
}

TEST_CASE("8-bit quantization rounds half to even") {
  CHECK(quantize_8bit(0.0) == 128);
  CHECK(quantize_8bit(-1.0) == 0);
  CHECK(quantize_8bit(1.0) == 255);
  CHECK(quantize_8bit(2.5) == 255);
  CHECK(quantize_8bit(-7.0) == 0);
  CHECK(quantize_8bit(1.0 / 127.5 - 1.0) == 1);
}

TEST_CASE("PCM quantization") {
  CHECK(quantize_pcm16(0.0) == 0);
  CHECK(quantize_pcm16(1.0) == 32767);
  CHECK(quantize_pcm16(-1.0) == -32768);
  CHECK(quantize_pcm16(0.5) == 16384);
  CHECK(quantize_pcm16(100.0) == 32767);
}

TEST_CASE("WAV round trip is lossless") {
  std::vector<std::int16_t> pcm(1000);
  std::mt19937 rng(1);
  std::uniform_int_distribution<int> u(-32768, 32767);
  for (auto& v : pcm) v = static_cast<std::int16_t>(u(rng));
  write_wav(scratch("mono.wav"), 1, 1, 16, pcm, 22050);
  const auto s = load_audio(scratch("mono.wav"));
  CHECK(s.rank == 1);
  CHECK(s.n == 1000);
  CHECK(s.channels == 1);
  CHECK(s.source.sample_rate == 22050);
  for (std::size_t k = 0; k < pcm.size(); ++k) CHECK(s.values[k] == pcm[k] / 32768.0);

  save_audio(s, scratch("mono_out.wav"));
  const auto back = load_audio(scratch("mono_out.wav"));
  CHECK(back.values == s.values);
  CHECK(back.source.sample_rate == 22050);
  CHECK(slurp(scratch("mono_out.wav")) == slurp(scratch("mono.wav")));
}

TEST_CASE("stereo input is averaged to mono") {
  std::vector<std::int16_t> stereo;
  std::vector<double> expected;
  for (int k = 0; k < 500; ++k) {
    const auto l = static_cast<std::int16_t>(k * 61 - 15000);
    const auto r = static_cast<std::int16_t>(9000 - k * 37);
    stereo.push_back(l);
    stereo.push_back(r);
    expected.push_back((l / 32768.0 + r / 32768.0) / 2.0);
  }
  write_wav(scratch("stereo.wav"), 1, 2, 16, stereo);
  const auto s = load_audio(scratch("stereo.wav"));
  CHECK(s.n == 500);
  CHECK(s.source.original_channels == 2);
  for (std::size_t k = 0; k < expected.size(); ++k) CHECK(s.values[k] == doctest::Approx(expected[k]).epsilon(1e-15));
}

TEST_CASE("full-scale square wave") {
  std::vector<std::int16_t> pcm;
  for (int k = 0; k < 400; ++k) pcm.push_back((k / 50) % 2 == 0 ? 32767 : -32768);
  write_wav(scratch("square.wav"), 1, 1, 16, pcm);
  const auto s = load_audio(scratch("square.wav"));
  for (std::size_t k = 0; k < pcm.size(); ++k) {
    if (pcm[k] < 0)
      CHECK(s.values[k] == -1.0);
    else
      CHECK(s.values[k] == doctest::Approx(1.0).epsilon(1.0 / 32768.0));
  }
}

TEST_CASE("truncation and trimming") {
  std::vector<std::int16_t> pcm(6 * 44100 + 123, 7);
  write_wav(scratch("six.wav"), 1, 1, 16, pcm);
  const auto full = load_audio(scratch("six.wav"), 6.0);
  CHECK(full.n == 264600);
  CHECK(full.rank == 1);
  CHECK(full.channels == 1);
  CHECK(full.source.trimmed_samples == 0);

  const auto trimmed = load_audio(scratch("six.wav"), 0.0, 32);
  CHECK(trimmed.n % 32 == 0);
  CHECK(trimmed.n + static_cast<int>(trimmed.source.trimmed_samples) == 6 * 44100 + 123);
  CHECK(trimmed.source.trimmed_samples < 32);
}

TEST_CASE("audio errors") {
  write_wav(scratch("float.wav"), 3, 1, 32, std::vector<std::int16_t>(20, 0));
  CHECK_THROWS_WITH_AS(load_audio(scratch("float.wav")), doctest::Contains("unsupported codec"), IoError);
  write_wav(scratch("empty.wav"), 1, 1, 16, {});
  CHECK_THROWS_AS(load_audio(scratch("empty.wav")), IoError);
  std::ofstream(scratch("junk.wav")) << "junk";
  CHECK_THROWS_AS(load_audio(scratch("junk.wav")), IoError);
  CHECK_THROWS_WITH_AS(load_audio(scratch("nope.wav")), doctest::Contains("nope.wav"), IoError);
}

TEST_CASE("model files round trip bitwise") {
  for (auto act : {Activation::Sine, Activation::Relu, Activation::FourierRelu}) {
    SubNetworkConfig cfg;
    cfg.depth = 2;
    cfg.width = 8;
    cfg.activation = act;
    cfg.mapping_size = 5;
    EnsembleModel m;
    m.grid = GridSpec{2, 2};
    m.n = 8;
    m.input_dim = 2;
    m.output_dim = 3;
    m.source.format = SourceFormat::Png8;
    m.source.original_channels = 3;
    for (int k = 1; k <= 4; ++k) m.subnets.push_back(init_subnetwork(cfg, 2, 3, 40 + k));

    const auto bytes = encode_model(m);
    CHECK(bytes.substr(0, 8) == "ENRPMODL");
    const auto back = decode_model(bytes);
    CHECK(back == m);
    CHECK(encode_model(back) == bytes);

    save_model(m, scratch("model.enrp"));
    CHECK(load_model(scratch("model.enrp")) == m);
    CHECK(slurp(scratch("model.enrp")) == bytes);

    CHECK_THROWS_AS(decode_model(bytes.substr(0, bytes.size() - 1)), IoError);
    CHECK_THROWS_AS(decode_model(bytes + "x"), IoError);
    std::string bad = bytes;
    bad[0] = 'X';
    CHECK_THROWS_AS(decode_model(bad), IoError);
  }
}

TEST_CASE("reports carry schema lines and checksums") {
  TrainReport report;
  report.records = {{0, 0.5, 10.0, psnr_from_mse(0.5)}, {1, 0.25, 5.0, psnr_from_mse(0.25)}};
  std::ostringstream csv;
  write_train_csv(report, csv);
  std::istringstream lines(csv.str());
  std::string first, header;
  std::getline(lines, first);
  std::getline(lines, header);
  CHECK(first.rfind("# enrp", 0) == 0);
  CHECK(header == "step,mse,residual_norm_sum,psnr_db");

  std::ofstream(scratch("abc.txt")) << "abc";
  CHECK(sha256_file(scratch("abc.txt")) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("config JSON keeps defaults for missing keys") {
  const auto cfg = nlohmann::json::parse(R"({"alpha": 3, "network": {"width": 64}, "train": {"steps": 9}})")
                       .get<SearchConfig>();
  CHECK(cfg.alpha == 3.0);
  CHECK(cfg.iter_max == 5);
  CHECK(cfg.base.width == 64);
  CHECK(cfg.base.depth == 3);
  CHECK(cfg.train.steps == 9);
  CHECK(cfg.train.adam.learning_rate == 1e-4);

  nlohmann::json j = cfg;
  CHECK(j.get<SearchConfig>().train.steps == 9);
}
