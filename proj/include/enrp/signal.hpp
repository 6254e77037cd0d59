#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace enrp {

enum class SourceFormat { Unknown, Png8, Pcm16 };

std::string to_string(SourceFormat f);
SourceFormat source_format_from_string(const std::string& s);

/// Where a normalized signal came from, so it can be written back out.
struct SourceRange {
  SourceFormat format = SourceFormat::Unknown;
  int sample_rate = 0;           // audio only
  int original_channels = 0;     // before any downmix
  std::size_t trimmed_samples = 0;  // audio samples dropped to satisfy divisibility

  bool operator==(const SourceRange&) const = default;
};

/// A 1D (audio) or square 2D (image) signal with values in [-1, 1].
/// Storage is sample-major, row-major: index ((r * n + c) * channels + ch), 0-based.
struct SignalTensor {
  int rank = 2;
  int n = 0;
  int channels = 1;
  std::vector<double> values;
  SourceRange source;

  SignalTensor() = default;
  SignalTensor(int rank, int n, int channels);

  std::size_t sample_count() const {
    return rank == 2 ? static_cast<std::size_t>(n) * static_cast<std::size_t>(n) : static_cast<std::size_t>(n);
  }
  /// 0-based linear sample index.
  std::size_t sample_index(int r0, int c0) const {
    return rank == 2 ? static_cast<std::size_t>(r0) * static_cast<std::size_t>(n) + static_cast<std::size_t>(c0)
                     : static_cast<std::size_t>(r0);
  }
  double& at(std::size_t sample, int ch) { return values[sample * static_cast<std::size_t>(channels) + static_cast<std::size_t>(ch)]; }
  double at(std::size_t sample, int ch) const { return values[sample * static_cast<std::size_t>(channels) + static_cast<std::size_t>(ch)]; }

  bool same_shape(const SignalTensor& o) const { return rank == o.rank && n == o.n && channels == o.channels; }

  /// Throws if the shape is invalid or a value lies outside [-1, 1].
  void validate() const;
};

/// Copy with every value clamped to [-1, 1].
SignalTensor clamped(SignalTensor s);

}  // namespace enrp
