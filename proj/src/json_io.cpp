#include "enrp/json_io.hpp"

namespace enrp {

using nlohmann::json;

namespace {

template <typename T>
void read_opt(const json& j, const char* key, T& out) {
  if (j.contains(key)) j.at(key).get_to(out);
}

}  // namespace

void to_json(json& j, const SubNetworkConfig& c) {
  j = json{{"depth", c.depth},
           {"width", c.width},
           {"activation", std::string(to_string(c.activation))},
           {"omega0", c.omega0},
           {"hidden_omega", c.hidden_omega},
           {"mapping_size", c.mapping_size},
           {"mapping_scale", c.mapping_scale}};
}

void from_json(const json& j, SubNetworkConfig& c) {
  read_opt(j, "depth", c.depth);
  read_opt(j, "width", c.width);
  if (j.contains("activation")) c.activation = activation_from_string(j.at("activation").get<std::string>());
  read_opt(j, "omega0", c.omega0);
  read_opt(j, "hidden_omega", c.hidden_omega);
  read_opt(j, "mapping_size", c.mapping_size);
  read_opt(j, "mapping_scale", c.mapping_scale);
}

void to_json(json& j, const AdamOptions& o) {
  j = json{{"learning_rate", o.learning_rate}, {"beta1", o.beta1}, {"beta2", o.beta2}, {"epsilon", o.epsilon}};
}

void from_json(const json& j, AdamOptions& o) {
  read_opt(j, "learning_rate", o.learning_rate);
  read_opt(j, "beta1", o.beta1);
  read_opt(j, "beta2", o.beta2);
  read_opt(j, "epsilon", o.epsilon);
}

void to_json(json& j, const TrainConfig& c) {
  j = json{{"steps", c.steps}, {"seed", c.seed}, {"eval_every", c.eval_every}, {"optimizer", c.adam}};
}

void from_json(const json& j, TrainConfig& c) {
  read_opt(j, "steps", c.steps);
  read_opt(j, "seed", c.seed);
  read_opt(j, "eval_every", c.eval_every);
  read_opt(j, "workers", c.workers);
  read_opt(j, "optimizer", c.adam);
}

void to_json(json& j, const GridSpec& g) { j = json{{"order", g.order}, {"rank", g.rank}}; }

void from_json(const json& j, GridSpec& g) {
  read_opt(j, "order", g.order);
  read_opt(j, "rank", g.rank);
}

void to_json(json& j, const SourceRange& s) {
  j = json{{"format", to_string(s.format)},
           {"sample_rate", s.sample_rate},
           {"original_channels", s.original_channels},
           {"trimmed_samples", s.trimmed_samples}};
}

void from_json(const json& j, SourceRange& s) {
  if (j.contains("format")) s.format = source_format_from_string(j.at("format").get<std::string>());
  read_opt(j, "sample_rate", s.sample_rate);
  read_opt(j, "original_channels", s.original_channels);
  read_opt(j, "trimmed_samples", s.trimmed_samples);
}

void to_json(json& j, const SearchSpace& s) { j = json{{"depths", s.depths}, {"widths", s.widths}}; }

void from_json(const json& j, SearchSpace& s) {
  read_opt(j, "depths", s.depths);
  read_opt(j, "widths", s.widths);
}

void to_json(json& j, const SearchConfig& c) {
  j = json{{"iter_max", c.iter_max},
           {"f_max", c.f_max},
           {"alpha", c.alpha},
           {"repeats", c.repeats},
           {"grid", c.grid_order},
           {"initial_depth", c.initial_depth},
           {"initial_width", c.initial_width},
           {"network", c.base},
           {"train", c.train}};
}

void from_json(const json& j, SearchConfig& c) {
  read_opt(j, "iter_max", c.iter_max);
  if (j.contains("f_max")) c.f_max = static_cast<std::uint64_t>(j.at("f_max").get<double>());
  read_opt(j, "alpha", c.alpha);
  read_opt(j, "repeats", c.repeats);
  read_opt(j, "grid", c.grid_order);
  read_opt(j, "initial_depth", c.initial_depth);
  read_opt(j, "initial_width", c.initial_width);
  read_opt(j, "network", c.base);
  read_opt(j, "train", c.train);
}

}  // namespace enrp
