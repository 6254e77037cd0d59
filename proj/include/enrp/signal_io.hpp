#pragma once

#include <cstdint>
#include <filesystem>

#include "enrp/signal.hpp"

namespace enrp {

/// 8-bit RGB or grayscale square PNG, mapped linearly from [0, 255] to [-1, 1].
/// Palette images are expanded to RGB; alpha is dropped.
SignalTensor load_image(const std::filesystem::path& path);

/// 16-bit PCM WAV scaled by 1/32768; multi-channel input is averaged to mono.
/// `max_seconds` > 0 truncates; the tail is then trimmed to a multiple of
/// `trim_multiple` samples (the dropped count lands in source.trimmed_samples).
SignalTensor load_audio(const std::filesystem::path& path, double max_seconds = 0.0, int trim_multiple = 1);

void save_image(const SignalTensor& signal, const std::filesystem::path& path);
/// Mono 16-bit PCM at the source sample rate (44100 Hz when unknown).
void save_audio(const SignalTensor& signal, const std::filesystem::path& path);

/// PNG for rank 2, WAV for rank 1.
void save_reconstruction(const SignalTensor& signal, const std::filesystem::path& path);

/// Clamp, scale to [0, 255] and round half to even (0.0 -> 128).
std::uint8_t quantize_8bit(double value);
/// Clamp, scale by 32768 and round half to even; +1.0 saturates at 32767.
std::int16_t quantize_pcm16(double value);

}  // namespace enrp
