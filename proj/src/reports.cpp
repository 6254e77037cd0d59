#include "enrp/reports.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include "enrp/json_io.hpp"

namespace enrp {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string schema_line(const char* kind) {
  return std::string("# enrp ") + kind + " v" + std::to_string(kReportSchemaVersion) + "\n";
}

nlohmann::json conventions() {
  return {{"psnr_peak", kPsnrPeak},
          {"psnr_cap_db", kPsnrCap},
          {"normalization", "[-1, 1]"},
          {"training_loss", "mse"},
          {"reconstruction_clamped", true}};
}

}  // namespace

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (!EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr))
    throw Error("SHA-256 failed for " + path.string());
  std::string hex;
  char buf[3];
  for (unsigned int k = 0; k < len; ++k) {
    std::snprintf(buf, sizeof buf, "%02x", digest[k]);
    hex += buf;
  }
  return hex;
}

nlohmann::json manifest_json(const RunManifest& m) {
  return {{"schema_version", kReportSchemaVersion},
          {"experiment", m.experiment},
          {"input", {{"path", m.input_path}, {"sha256", m.input_sha256}, {"source", m.source}}},
          {"grid", m.grid},
          {"network", m.network},
          {"config", m.run_config},
          {"tool_version", m.tool_version},
          {"seed", m.seed}};
}

void write_train_csv(const TrainReport& report, std::ostream& out) {
  out << schema_line("train-report") << "step,mse,residual_norm_sum,psnr_db\n";
  for (const auto& r : report.records)
    out << r.step << ',' << num(r.mse) << ',' << num(r.residual_norm_sum) << ',' << num(r.psnr_db) << '\n';
}

nlohmann::json train_summary_json(const TrainReport& report, const RunManifest& manifest) {
  const auto& last = report.final_record();
  return {{"schema_version", kReportSchemaVersion},
          {"manifest", manifest_json(manifest)},
          {"conventions", conventions()},
          {"final", {{"step", last.step}, {"mse", last.mse}, {"residual_norm_sum", last.residual_norm_sum}, {"psnr_db", last.psnr_db}}},
          {"flops", {{"total", report.flops.total}, {"human", format_flops(report.flops.total)}}},
          {"wall_time_s", report.wall_time_s}};
}

void write_search_csv(const SearchTrace& trace, std::ostream& out) {
  out << schema_line("search-candidates") << "iteration,phase,depth,width,mean_psnr_db,flops,score,accepted\n";
  for (const auto& c : trace.candidates)
    out << c.iteration << ',' << to_string(c.phase) << ',' << c.depth << ',' << c.width << ',' << num(c.mean_psnr_db)
        << ',' << c.flops.total << ',' << num(c.score) << ',' << (c.accepted ? 1 : 0) << '\n';
}

nlohmann::json search_trace_json(const SearchTrace& trace, const RunManifest& manifest) {
  nlohmann::json cands = nlohmann::json::array();
  for (const auto& c : trace.candidates)
    cands.push_back({{"iteration", c.iteration},
                     {"phase", to_string(c.phase)},
                     {"depth", c.depth},
                     {"width", c.width},
                     {"psnr_runs", c.psnr_runs},
                     {"mean_psnr_db", c.mean_psnr_db},
                     {"flops", c.flops.total},
                     {"score", c.score},
                     {"accepted", c.accepted}});
  nlohmann::json iters = nlohmann::json::array();
  for (const auto& it : trace.iterations)
    iters.push_back({{"iteration", it.iteration},
                     {"depth", it.depth},
                     {"width", it.width},
                     {"mean_psnr_db", it.mean_psnr_db},
                     {"flops", it.flops.total},
                     {"score", it.score}});
  return {{"schema_version", kReportSchemaVersion},
          {"manifest", manifest_json(manifest)},
          {"conventions", conventions()},
          {"candidates", cands},
          {"iterations", iters},
          {"start_depth", trace.start_depth},
          {"final", {{"depth", trace.final_depth}, {"width", trace.final_width}}},
          {"termination", to_string(trace.termination)}};
}

void write_divergence_csv(const DivergenceTable& table, std::ostream& out) {
  out << schema_line("divergence") << "width,flops,mean_psnr_db,runs\n";
  for (const auto& r : table.rows)
    out << r.width << ',' << r.flops.total << ',' << num(r.mean_psnr_db) << ',' << r.runs << '\n';
}

void write_divergence_runs_csv(const DivergenceTable& table, std::ostream& out) {
  out << schema_line("divergence-runs") << "image,width,repeat,psnr_db\n";
  for (const auto& r : table.runs) out << r.image << ',' << r.width << ',' << r.repeat << ',' << num(r.psnr_db) << '\n';
}

void write_comparison_csv(const std::vector<ComparisonRow>& rows, std::ostream& out) {
  out << schema_line("comparison") << "activation,grid,depth,width,flops,psnr_db\n";
  for (const auto& r : rows)
    out << to_string(r.config.activation) << ',' << r.grid_order << ',' << r.config.depth << ',' << r.config.width
        << ',' << r.flops.total << ',' << num(r.psnr_db) << '\n';
}

std::string line_plot_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                          const std::vector<PlotSeries>& series, bool log_x) {
  constexpr double width = 640, height = 400, left = 70, right = 150, top = 40, bottom = 50;
  static const std::array<const char*, 8> colors = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};
  auto tx = [&](double x) { return log_x ? std::log10(std::max(x, 1e-300)) : x; };

  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      x0 = std::min(x0, tx(x));
      x1 = std::max(x1, tx(x));
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  const double pw = width - left - right, ph = height - top - bottom;
  auto px = [&](double x) { return left + (tx(x) - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return top + (1.0 - (y - y0) / (y1 - y0)) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
  o << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double fx = x0 + (x1 - x0) * k / 4.0, fy = y0 + (y1 - y0) * k / 4.0;
    const double gx = left + pw * k / 4.0, gy = top + ph * (1.0 - k / 4.0);
    char lx[32], ly[32];
    std::snprintf(lx, sizeof lx, "%.3g", log_x ? std::pow(10.0, fx) : fx);
    std::snprintf(ly, sizeof ly, "%.3g", fy);
    o << "<text x=\"" << gx << "\" y=\"" << top + ph + 16 << "\" text-anchor=\"middle\">" << lx << "</text>\n";
    o << "<text x=\"" << left - 6 << "\" y=\"" << gy + 4 << "\" text-anchor=\"end\">" << ly << "</text>\n";
  }
  o << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 10 << "\" text-anchor=\"middle\">" << x_label
    << "</text>\n";
  o << "<text x=\"15\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 15 "
    << top + ph / 2 << ")\">" << y_label << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = colors[s % colors.size()];
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : series[s].points) o << px(x) << ',' << py(y) << ' ';
    o << "\"/>\n";
    for (const auto& [x, y] : series[s].points)
      o << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
    const double ly = top + 14 + 18.0 * static_cast<double>(s);
    o << "<line x1=\"" << left + pw + 10 << "\" y1=\"" << ly - 4 << "\" x2=\"" << left + pw + 30 << "\" y2=\""
      << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << left + pw + 35 << "\" y=\"" << ly << "\">" << series[s].name << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out.write(text.data(), static_cast<std::streamsize>(text.size())))
    throw IoError("cannot write " + path.string());
}

}  // namespace enrp
