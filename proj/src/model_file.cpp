#include "enrp/model_file.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "enrp/json_io.hpp"

namespace enrp {

namespace {

constexpr char kMagic[8] = {'E', 'N', 'R', 'P', 'M', 'O', 'D', 'L'};

void put_u32(std::string& out, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) out.push_back(static_cast<char>((v >> (8 * k)) & 0xff));
}

std::uint32_t get_u32(const std::string& in, std::size_t pos) {
  std::uint32_t v = 0;
  for (int k = 0; k < 4; ++k) v |= std::uint32_t(static_cast<unsigned char>(in[pos + k])) << (8 * k);
  return v;
}

void put_floats(std::string& out, const float* data, Eigen::Index count) {
  for (Eigen::Index k = 0; k < count; ++k) put_u32(out, std::bit_cast<std::uint32_t>(data[k]));
}

// Row-major traversal of a column-major Eigen matrix.
void put_matrix(std::string& out, const Mat<float>& m) {
  const Mat<float> t = m.transpose();
  put_floats(out, t.data(), t.size());
}

class Reader {
 public:
  Reader(const std::string& bytes, std::size_t pos) : bytes_(bytes), pos_(pos) {}

  float next() {
    if (pos_ + 4 > bytes_.size()) throw IoError("model file truncated in parameter data");
    const float f = std::bit_cast<float>(get_u32(bytes_, pos_));
    pos_ += 4;
    return f;
  }
  void fill_row_major(Mat<float>& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = next();
  }
  void fill(Vec<float>& v) {
    for (Eigen::Index k = 0; k < v.size(); ++k) v(k) = next();
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  const std::string& bytes_;
  std::size_t pos_;
};

}  // namespace

std::string encode_model(const EnsembleModel& model) {
  model.validate();
  nlohmann::json header{{"format_version", kModelFormatVersion},
                        {"grid", model.grid},
                        {"n", model.n},
                        {"input_dim", model.input_dim},
                        {"output_dim", model.output_dim},
                        {"network", model.config()},
                        {"source", model.source},
                        {"cells", model.subnets.size()},
                        {"parameters_per_cell", model.subnets.front().parameter_count()}};
  const std::string text = header.dump();

  std::string out(kMagic, sizeof kMagic);
  put_u32(out, kModelFormatVersion);
  put_u32(out, static_cast<std::uint32_t>(text.size()));
  out += text;
  for (const auto& net : model.subnets) {
    for (const auto& layer : net.layers()) {
      put_matrix(out, layer.weight);
      put_floats(out, layer.bias.data(), layer.bias.size());
    }
    if (net.has_fourier_matrix()) put_matrix(out, net.fourier_matrix());
  }
  return out;
}

EnsembleModel decode_model(const std::string& bytes) {
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0)
    throw IoError("not an ensemble model file (bad magic)");
  const std::uint32_t version = get_u32(bytes, 8);
  if (version != kModelFormatVersion)
    throw IoError("unsupported model format version " + std::to_string(version));
  const std::size_t header_len = get_u32(bytes, 12);
  if (16 + header_len > bytes.size()) throw IoError("model file truncated in header");
  const auto header = nlohmann::json::parse(bytes.substr(16, header_len));

  EnsembleModel model;
  header.at("grid").get_to(model.grid);
  model.n = header.at("n").get<int>();
  model.input_dim = header.at("input_dim").get<int>();
  model.output_dim = header.at("output_dim").get<int>();
  header.at("source").get_to(model.source);
  SubNetworkConfig cfg;
  header.at("network").get_to(cfg);
  model.grid.check_divides(model.n);

  Reader reader(bytes, 16 + header_len);
  const int cells = model.grid.cell_count();
  model.subnets.reserve(static_cast<std::size_t>(cells));
  for (int m = 0; m < cells; ++m) {
    SubNetwork net(cfg, model.input_dim, model.output_dim);
    for (auto& layer : net.layers()) {
      reader.fill_row_major(layer.weight);
      reader.fill(layer.bias);
    }
    if (net.has_fourier_matrix()) reader.fill_row_major(net.fourier_matrix());
    model.subnets.push_back(std::move(net));
  }
  if (!reader.done()) throw IoError("model file has trailing bytes");
  model.validate();
  return model;
}

void save_model(const EnsembleModel& model, const std::filesystem::path& path) {
  const std::string bytes = encode_model(model);
  std::ofstream out(path, std::ios::binary);
  if (!out.write(bytes.data(), static_cast<std::streamsize>(bytes.size())))
    throw IoError("cannot write model file " + path.string());
}

EnsembleModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file " + path.string());
  const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return decode_model(bytes);
}

}  // namespace enrp
