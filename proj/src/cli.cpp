#include "enrp/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "enrp/json_io.hpp"
#include "enrp/model_file.hpp"
#include "enrp/reports.hpp"
#include "enrp/signal_io.hpp"

namespace fs = std::filesystem;

namespace enrp {

namespace {

template <typename T>
void override_with(const std::optional<T>& flag, T& target) {
  if (flag) target = *flag;
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error("invalid JSON in " + path + ": " + e.what());
  }
}

// Options shared by every subcommand that builds a sub-network.
struct NetworkFlags {
  std::optional<int> depth, width, mapping_size;
  std::optional<std::string> activation;
  std::optional<double> omega0, hidden_omega, mapping_scale;

  void add(CLI::App* app) {
    app->add_option("--depth", depth, "Hidden-to-hidden layers per sub-network");
    app->add_option("--width", width, "Hidden units per layer");
    app->add_option("--activation", activation, "sine, relu or fourier");
    app->add_option("--omega0", omega0, "First sine layer frequency");
    app->add_option("--hidden-omega", hidden_omega, "Frequency of deeper sine layers");
    app->add_option("--mapping-size", mapping_size, "Fourier feature count");
    app->add_option("--mapping-scale", mapping_scale, "Std of the Fourier matrix");
  }
  void apply_to(SubNetworkConfig& c) const {
    override_with(depth, c.depth);
    override_with(width, c.width);
    if (activation) c.activation = activation_from_string(*activation);
    override_with(omega0, c.omega0);
    override_with(hidden_omega, c.hidden_omega);
    override_with(mapping_size, c.mapping_size);
    override_with(mapping_scale, c.mapping_scale);
  }
};

struct TrainFlags {
  std::optional<int> steps, eval_every, workers;
  std::optional<std::uint64_t> seed;
  std::optional<double> lr;

  void add(CLI::App* app) {
    app->add_option("--steps", steps, "Optimizer steps per sub-network");
    app->add_option("--eval-every", eval_every, "Report interval in steps");
    app->add_option("--workers", workers, "Worker threads (0: all cores)");
    app->add_option("--seed", seed, "Random seed");
    app->add_option("--lr", lr, "Adam learning rate");
  }
  void apply_to(TrainConfig& t) const {
    override_with(steps, t.steps);
    override_with(eval_every, t.eval_every);
    override_with(workers, t.workers);
    override_with(seed, t.seed);
    override_with(lr, t.adam.learning_rate);
  }
};

struct InputFlags {
  std::optional<std::string> image, audio;
  double max_seconds = 0.0;

  void add(CLI::App* app) {
    auto* img = app->add_option("--image", image, "Input PNG");
    auto* aud = app->add_option("--audio", audio, "Input WAV (16-bit PCM)");
    img->excludes(aud);
    app->add_option("--max-seconds", max_seconds, "Truncate audio input (0: full length)");
  }
  void apply_json(const nlohmann::json& j) {
    if (!image && j.contains("image")) image = j.at("image").get<std::string>();
    if (!audio && !image && j.contains("audio")) audio = j.at("audio").get<std::string>();
    if (j.contains("max_seconds") && max_seconds == 0.0) max_seconds = j.at("max_seconds").get<double>();
  }
  std::string path() const {
    if (image) return *image;
    if (audio) return *audio;
    throw Error("an input is required: pass --image or --audio");
  }
  SignalTensor load(int trim_multiple) const {
    if (image) return load_image(*image);
    return load_audio(path(), max_seconds, trim_multiple);
  }
};

RunManifest make_manifest(const std::string& experiment, const InputFlags& input, const SignalTensor& signal,
                          const GridSpec& grid, const SubNetworkConfig& net, nlohmann::json run_config,
                          std::uint64_t seed) {
  RunManifest m;
  m.experiment = experiment;
  m.input_path = input.path();
  m.input_sha256 = sha256_file(m.input_path);
  m.grid = grid;
  m.network = net;
  m.run_config = std::move(run_config);
  m.seed = seed;
  m.source = signal.source;
  return m;
}

void write_csv_file(const fs::path& path, const std::function<void(std::ostream&)>& fn) {
  std::ostringstream s;
  fn(s);
  write_text_file(path, s.str());
}

std::string reconstruction_name(const SignalTensor& s) { return s.rank == 2 ? "reconstruction.png" : "reconstruction.wav"; }

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Grid-partitioned ensembles of coordinate networks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  // fit
  auto* fit = app.add_subcommand("fit", "Train an ensemble on one signal");
  InputFlags fit_in;
  NetworkFlags fit_net;
  TrainFlags fit_train;
  std::optional<int> fit_grid;
  std::optional<std::string> fit_config;
  std::string fit_out = "enrp_fit", fit_name = "fit";
  fit_in.add(fit);
  fit_net.add(fit);
  fit_train.add(fit);
  fit->add_option("--grid", fit_grid, "Grid order M (cells per axis)");
  fit->add_option("--config", fit_config, "JSON run configuration");
  fit->add_option("--out", fit_out, "Output directory");
  fit->add_option("--name", fit_name, "Experiment name");

  // search
  auto* search = app.add_subcommand("search", "Width/depth search under a FLOP budget");
  InputFlags s_in;
  NetworkFlags s_net;
  TrainFlags s_train;
  std::optional<int> s_grid, s_iter, s_repeats;
  std::optional<double> s_fmax, s_alpha;
  std::optional<std::vector<int>> s_depths, s_widths;
  std::optional<std::string> s_config;
  std::string s_out = "enrp_search", s_name = "search";
  s_in.add(search);
  s_net.add(search);
  s_train.add(search);
  search->add_option("--config", s_config, "JSON search configuration");
  search->add_option("--grid", s_grid, "Grid order M");
  search->add_option("--iter-max", s_iter, "Maximum iterations");
  search->add_option("--f-max", s_fmax, "FLOP budget");
  search->add_option("--alpha", s_alpha, "FLOP regularization weight");
  search->add_option("--repeats", s_repeats, "Training runs per candidate");
  search->add_option("--depths", s_depths, "Depth search set");
  search->add_option("--widths", s_widths, "Width search set");
  search->add_option("--out", s_out, "Output directory");
  search->add_option("--name", s_name, "Experiment name");

  // reconstruct
  auto* rec = app.add_subcommand("reconstruct", "Render a saved model back to PNG/WAV");
  std::string rec_model, rec_out;
  int rec_workers = 0;
  rec->add_option("--model", rec_model, "Model file")->required();
  rec->add_option("--out", rec_out, "Output PNG or WAV")->required();
  rec->add_option("--workers", rec_workers, "Worker threads");

  // flops
  auto* fl = app.add_subcommand("flops", "Forward-pass FLOP count of a configuration");
  NetworkFlags fl_net;
  int fl_n = 128, fl_rank = 2, fl_grid = 1;
  std::optional<int> fl_in, fl_outdim;
  fl_net.add(fl);
  fl->add_option("--n", fl_n, "Samples per axis");
  fl->add_option("--rank", fl_rank, "1 (audio) or 2 (image)");
  fl->add_option("--grid", fl_grid, "Grid order M");
  fl->add_option("--input-dim", fl_in, "Coordinate dimension (default: rank)");
  fl->add_option("--output-dim", fl_outdim, "Output channels (default: 3 for images, 1 for audio)");

  // divergence
  auto* dv = app.add_subcommand("divergence", "Mean PSNR per width over images and repeats");
  std::vector<std::string> dv_images;
  std::vector<int> dv_widths{16, 32, 64, 128, 256};
  int dv_grid = 4, dv_repeats = 1;
  NetworkFlags dv_net;
  TrainFlags dv_train;
  std::string dv_out = "enrp_divergence";
  dv->add_option("--images", dv_images, "Input PNGs of equal size")->required();
  dv->add_option("--widths", dv_widths, "Widths to evaluate");
  dv->add_option("--grid", dv_grid, "Grid order M");
  dv->add_option("--repeats", dv_repeats, "Runs per image and width");
  dv_net.add(dv);
  dv_train.add(dv);
  dv->add_option("--out", dv_out, "Output directory");

  // compare
  auto* cmp = app.add_subcommand("compare", "Sine, ReLU and Fourier-feature networks, single vs grid ensemble");
  std::string cmp_image, cmp_out = "enrp_compare";
  int cmp_grid = 32;
  NetworkFlags cmp_net;
  TrainFlags cmp_train;
  cmp->add_option("--image", cmp_image, "Input PNG")->required();
  cmp->add_option("--grid", cmp_grid, "Grid order of the ensemble");
  cmp_net.add(cmp);
  cmp_train.add(cmp);
  cmp->add_option("--out", cmp_out, "Output directory");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    const auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    if (e.get_exit_code() == 0) {
      out << sub->help();
      return 0;
    }
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*fit) {
      nlohmann::json cfg_json = fit_config ? read_json_file(*fit_config) : nlohmann::json::object();
      SubNetworkConfig net;
      TrainConfig train;
      int order = 1;
      fit_in.apply_json(cfg_json);
      if (cfg_json.contains("network")) cfg_json.at("network").get_to(net);
      if (cfg_json.contains("train")) cfg_json.at("train").get_to(train);
      if (cfg_json.contains("grid")) order = cfg_json.at("grid").get<int>();
      fit_net.apply_to(net);
      fit_train.apply_to(train);
      override_with(fit_grid, order);

      const SignalTensor signal = fit_in.load(order);
      const GridSpec grid{order, signal.rank};
      const auto result = train_ensemble(signal, grid, net, train);

      fs::create_directories(fit_out);
      const fs::path dir(fit_out);
      save_model(result.model, dir / "model.enrp");
      write_csv_file(dir / "train.csv", [&](std::ostream& s) { write_train_csv(result.report, s); });
      const auto manifest = make_manifest(fit_name, fit_in, signal, grid, net, train, train.seed);
      write_text_file(dir / "report.json", train_summary_json(result.report, manifest).dump(2) + "\n");
      save_reconstruction(result.report.reconstruction, dir / reconstruction_name(signal));
      PlotSeries curve{"M=" + std::to_string(order), {}};
      for (const auto& r : result.report.records) curve.points.emplace_back(r.step, r.psnr_db);
      write_text_file(dir / "psnr.svg", line_plot_svg("PSNR vs. step", "step", "PSNR (dB)", {curve}));

      const auto& last = result.report.final_record();
      out << "PSNR " << last.psnr_db << " dB after " << last.step << " steps, FLOPs "
          << format_flops(result.report.flops.total) << ", " << result.report.wall_time_s << " s\n";
      out << "wrote " << dir.string() << '\n';
      return 0;
    }

    if (*search) {
      nlohmann::json cfg_json = s_config ? read_json_file(*s_config) : nlohmann::json::object();
      SearchConfig cfg;
      SearchSpace space;
      cfg_json.get_to(cfg);
      if (cfg_json.contains("space")) cfg_json.at("space").get_to(space);
      s_in.apply_json(cfg_json);
      s_net.apply_to(cfg.base);
      s_train.apply_to(cfg.train);
      override_with(s_grid, cfg.grid_order);
      override_with(s_iter, cfg.iter_max);
      override_with(s_repeats, cfg.repeats);
      override_with(s_alpha, cfg.alpha);
      if (s_fmax) cfg.f_max = static_cast<std::uint64_t>(*s_fmax);
      override_with(s_depths, space.depths);
      override_with(s_widths, space.widths);

      const SignalTensor signal = s_in.load(cfg.grid_order);
      const auto result = run_search(space, cfg, signal);

      fs::create_directories(s_out);
      const fs::path dir(s_out);
      nlohmann::json run_config = cfg;
      run_config["space"] = space;
      const auto manifest = make_manifest(s_name, s_in, signal, GridSpec{cfg.grid_order, signal.rank}, result.config,
                                          run_config, cfg.train.seed);
      write_text_file(dir / "search.json", search_trace_json(result.trace, manifest).dump(2) + "\n");
      write_csv_file(dir / "search.csv", [&](std::ostream& s) { write_search_csv(result.trace, s); });
      PlotSeries psnr{"mean PSNR", {}}, score{"score", {}};
      for (const auto& it : result.trace.iterations) {
        psnr.points.emplace_back(it.iteration, it.mean_psnr_db);
        score.points.emplace_back(it.iteration, it.score);
      }
      write_text_file(dir / "search.svg", line_plot_svg("Search progress", "iteration", "dB", {psnr, score}));
      out << "selected depth " << result.trace.final_depth << ", width " << result.trace.final_width << " ("
          << to_string(result.trace.termination) << " after " << result.trace.iterations.size() << " iterations)\n";
      out << "wrote " << dir.string() << '\n';
      return 0;
    }

    if (*rec) {
      const auto model = load_model(rec_model);
      const SignalTensor signal = clamped(reconstruct(model, rec_workers));
      save_reconstruction(signal, rec_out);
      out << "wrote " << rec_out << '\n';
      return 0;
    }

    if (*fl) {
      SubNetworkConfig net;
      fl_net.apply_to(net);
      const int in_dim = fl_in.value_or(fl_rank);
      const int out_dim = fl_outdim.value_or(fl_rank == 2 ? 3 : 1);
      const auto per_sample = flops_per_sample(net, in_dim, out_dim);
      const auto total = total_flops(net, GridSpec{fl_grid, fl_rank}, fl_n, in_dim, out_dim);
      out << total.total << " FLOPs (" << format_flops(total.total) << "), " << per_sample << " per sample\n";
      return 0;
    }

    if (*dv) {
      SubNetworkConfig net;
      TrainConfig train;
      dv_net.apply_to(net);
      dv_train.apply_to(train);
      std::vector<SignalTensor> images;
      for (const auto& p : dv_images) images.push_back(load_image(p));
      const auto table = divergence_experiment(images, dv_widths, net.depth, dv_grid, dv_repeats, net, train);
      fs::create_directories(dv_out);
      const fs::path dir(dv_out);
      write_csv_file(dir / "divergence.csv", [&](std::ostream& s) { write_divergence_csv(table, s); });
      write_csv_file(dir / "divergence_runs.csv", [&](std::ostream& s) { write_divergence_runs_csv(table, s); });
      PlotSeries curve{"M=" + std::to_string(dv_grid) + ", d=" + std::to_string(net.depth), {}};
      for (const auto& r : table.rows) curve.points.emplace_back(static_cast<double>(r.flops.total), r.mean_psnr_db);
      write_text_file(dir / "divergence.svg", line_plot_svg("Mean PSNR vs. FLOPs", "FLOPs", "PSNR (dB)", {curve}, true));
      for (const auto& r : table.rows)
        out << "width " << r.width << ": " << r.mean_psnr_db << " dB over " << r.runs << " runs, "
            << format_flops(r.flops.total) << '\n';
      return 0;
    }

    if (*cmp) {
      SubNetworkConfig base;
      base.depth = 1;
      base.width = 128;
      cmp_net.apply_to(base);
      TrainConfig train;
      cmp_train.apply_to(train);
      std::vector<SubNetworkConfig> configs;
      for (Activation a : {Activation::Sine, Activation::Relu, Activation::FourierRelu}) {
        SubNetworkConfig c = base;
        c.activation = a;
        configs.push_back(c);
      }
      const SignalTensor signal = load_image(cmp_image);
      const auto rows = compare_activations(signal, configs, cmp_grid, train);
      fs::create_directories(cmp_out);
      write_csv_file(fs::path(cmp_out) / "comparison.csv", [&](std::ostream& s) { write_comparison_csv(rows, s); });
      for (const auto& r : rows)
        out << to_string(r.config.activation) << " M=" << r.grid_order << ": " << r.psnr_db << " dB, "
            << format_flops(r.flops.total) << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace enrp
