#include "enrp/signal.hpp"

#include <algorithm>
#include <cmath>

#include "enrp/error.hpp"

namespace enrp {

std::string to_string(SourceFormat f) {
  switch (f) {
    case SourceFormat::Png8: return "png8";
    case SourceFormat::Pcm16: return "pcm16";
    case SourceFormat::Unknown: break;
  }
  return "unknown";
}

SourceFormat source_format_from_string(const std::string& s) {
  if (s == "png8") return SourceFormat::Png8;
  if (s == "pcm16") return SourceFormat::Pcm16;
  return SourceFormat::Unknown;
}

SignalTensor::SignalTensor(int rank_, int n_, int channels_) : rank(rank_), n(n_), channels(channels_) {
  if (rank != 1 && rank != 2) throw ShapeError("signal rank must be 1 or 2");
  if (n < 1 || channels < 1) throw ShapeError("signal size and channel count must be positive");
  values.assign(sample_count() * static_cast<std::size_t>(channels), 0.0);
}

void SignalTensor::validate() const {
  if (rank != 1 && rank != 2) throw ShapeError("signal rank must be 1 or 2");
  if (n < 2) throw ShapeError("signal needs at least 2 samples per axis");
  if (values.size() != sample_count() * static_cast<std::size_t>(channels))
    throw ShapeError("signal value count does not match its shape");
  for (double v : values)
    if (!(v >= -1.0 && v <= 1.0)) throw Error("signal value outside [-1, 1]");
}

SignalTensor clamped(SignalTensor s) {
  for (double& v : s.values) v = std::clamp(v, -1.0, 1.0);
  return s;
}

}  // namespace enrp
