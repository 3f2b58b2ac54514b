#include "pcae/checkpoint.hpp"

#include <json.hpp>

#include <cstring>
#include <fstream>
#include <string>

#include "binary_io.hpp"
#include "pcae/error.hpp"

namespace pcae {

namespace {

constexpr char kCkptMagic[8] = {'P', 'C', 'A', 'E', 'C', 'K', 'P', '\n'};

const char* activation_name(Activation a) { return a == Activation::relu ? "relu" : "identity"; }

Activation parse_activation(const std::string& s) {
  if (s == "relu") return Activation::relu;
  if (s == "identity") return Activation::identity;
  throw IoError("load_checkpoint: unknown activation '" + s + "'");
}

nlohmann::json stack_activations(const std::vector<Layer>& layers) {
  auto arr = nlohmann::json::array();
  for (const auto& l : layers) arr.push_back(activation_name(l.activation));
  return arr;
}

std::vector<Layer> empty_stack(const std::vector<std::size_t>& widths,
                               const std::vector<std::string>& acts) {
  std::vector<Layer> layers;
  if (widths.empty()) return layers;
  if (acts.size() + 1 != widths.size())
    throw IoError("load_checkpoint: activation count does not match widths");
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    Layer layer;
    layer.weight = Matrix(widths[l + 1], widths[l]);
    layer.bias.assign(widths[l + 1], 0.0);
    layer.activation = parse_activation(acts[l]);
    layers.push_back(std::move(layer));
  }
  return layers;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const MlpModel& model, std::size_t epoch) {
  validate_model(model);
  nlohmann::ordered_json manifest;
  manifest["format"] = "pcae-ckpt";
  manifest["version"] = 1;
  manifest["encoder_widths"] = model.encoder_widths();
  manifest["decoder_widths"] = model.decoder_widths();
  manifest["encoder_activations"] = stack_activations(model.encoder);
  manifest["decoder_activations"] = stack_activations(model.decoder);
  manifest["latent_dim"] = model.latent_dim();
  manifest["seed"] = model.seed;
  manifest["epoch"] = epoch;
  manifest["parameter_count"] = model.parameter_count();
  const std::string text = manifest.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("save_checkpoint: cannot open " + path.string());
  out.write(kCkptMagic, sizeof(kCkptMagic));
  detail::put_le<std::uint64_t>(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (double v : get_parameters(model)) detail::put_le<double>(out, v);
  if (!out) throw IoError("save_checkpoint: write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("load_checkpoint: cannot open " + path.string());
  char magic[sizeof(kCkptMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kCkptMagic, sizeof(kCkptMagic)) != 0)
    throw IoError("load_checkpoint: " + path.string() + " is not a .ckpt file");
  const auto len = detail::get_le<std::uint64_t>(in);
  std::string text(len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(len));
  if (!in) throw IoError("load_checkpoint: truncated manifest");

  Checkpoint ck;
  std::size_t count = 0;
  try {
    const auto m = nlohmann::json::parse(text);
    ck.model.encoder = empty_stack(m.at("encoder_widths").get<std::vector<std::size_t>>(),
                                   m.at("encoder_activations").get<std::vector<std::string>>());
    ck.model.decoder = empty_stack(m.at("decoder_widths").get<std::vector<std::size_t>>(),
                                   m.at("decoder_activations").get<std::vector<std::string>>());
    ck.model.seed = m.at("seed").get<std::uint64_t>();
    ck.epoch = m.at("epoch").get<std::size_t>();
    count = m.at("parameter_count").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError("load_checkpoint: bad manifest: " + std::string(e.what()));
  }
  try {
    validate_model(ck.model);
  } catch (const ShapeError& e) {
    throw IoError(std::string("load_checkpoint: ") + e.what());
  }
  if (count != ck.model.parameter_count())
    throw IoError("load_checkpoint: parameter_count disagrees with widths");
  std::vector<double> params(count);
  for (double& v : params) v = detail::get_le<double>(in);
  set_parameters(ck.model, params);
  ck.model.version = 0;
  return ck;
}

}  // namespace pcae
