#include "neurolens/harness.hpp"

#include "neurolens/mock_store.hpp"
#include "neurolens/pipeline.hpp"

#include <cstdio>

namespace neurolens {

namespace fs = std::filesystem;
using nlohmann::json;

HarnessSpec default_harness_spec(std::uint64_t seed) {
  HarnessSpec spec;
  spec.seed = seed;
  const auto h = LabelHierarchy::make(spec.vocab_size, spec.probe.group_size);
  const auto &leaf = h.leaves();
  auto planted = [&](std::size_t target, std::uint64_t s, std::optional<std::string> answer,
                     std::string role) {
    return HarnessNeuron{{leaf[target], 1.0, 0.2, seed * 1000 + s}, std::move(answer),
                         std::move(role)};
  };
  spec.neurons = {
      planted(0, 1, std::nullopt, "true"),   planted(7, 2, std::nullopt, "true"),
      planted(14, 3, std::nullopt, "true"),  planted(21, 4, std::nullopt, "true"),
      planted(3, 5, std::nullopt, "true"),   planted(9, 6, leaf[20], "unrelated"),
      planted(16, 7, leaf[2], "unrelated"),
      HarnessNeuron{{"", 1.0, 0.2, seed * 1000 + 8}, std::nullopt, "refusal"},
  };
  return spec;
}

void write_harness(const fs::path &dir, const HarnessSpec &spec, bool record) {
  fs::create_directories(dir / "images");
  const auto probe = make_probe(spec.vocab_size, spec.n_images, spec.labels_per_image, spec.seed,
                                spec.probe);
  for (std::size_t i = 0; i < probe.manifest.count(); ++i) {
    write_file_atomic(dir / probe.manifest.images[i].uri,
                      label_png(probe.oracle.membership[i], probe.hierarchy, spec.probe.raster_px,
                                probe_key(i)));
  }
  save_manifest(probe.manifest, dir / "manifest.json");

  std::vector<SyntheticNeuron> neurons;
  std::map<std::size_t, SyntheticNeuron> by_index;
  WorldOptions world;
  world.raster_px = spec.probe.raster_px;
  json described = json::array();
  for (std::size_t j = 0; j < spec.neurons.size(); ++j) {
    const auto &hn = spec.neurons[j];
    neurons.push_back(hn.neuron);
    by_index[j] = hn.neuron;
    if (hn.answer) {
      world.confusion[hn.neuron.target_label] = *hn.answer;
    }
    json d = {{"neuron", j},
              {"target", hn.neuron.target_label},
              {"signal_weight", hn.neuron.signal_weight},
              {"noise_scale", hn.neuron.noise_scale},
              {"seed", hn.neuron.seed},
              {"role", hn.role},
              {"answer", hn.answer ? json(*hn.answer) : json(nullptr)}};
    if (!hn.neuron.target_label.empty()) {
      d["true_score_target"] = true_score(hn.neuron, probe.oracle, hn.neuron.target_label);
    }
    if (hn.answer) {
      d["true_score_answer"] = true_score(hn.neuron, probe.oracle, *hn.answer);
    }
    described.push_back(std::move(d));
  }
  write_matrix(activation_matrix(neurons, probe.oracle), MatrixKind::activation,
               dir / "activations.nact");
  write_matrix(probe.embeddings, MatrixKind::embedding, dir / "embeddings.nemb");
  write_file_atomic(dir / "neurons.json",
                    json{{"vocabulary", probe.hierarchy.leaves()}, {"neurons", described}}.dump(1) +
                        "\n");

  PipelineConfig config;
  config.manifest = "manifest.json";
  config.activations = "activations.nact";
  config.embeddings = "embeddings.nemb";
  config.model_id = "synthetic";
  config.layer_id = "planted";
  config.store = "mock_store";
  config.mode = BackendMode::mock;
  write_file_atomic(dir / "pipeline.cfg", "# Synthetic harness fixtures.\n" + render_config(config));

  if (!record) {
    return;
  }
  fs::create_directories(dir / "mock_store");
  PipelineConfig rec = load_config(dir / "pipeline.cfg");
  rec.out_dir = dir / ".record";
  rec.mode = BackendMode::live;
  auto transport = std::make_shared<RecordingTransport>(
      std::make_shared<SyntheticWorld>(probe.hierarchy, by_index, world),
      std::make_shared<ResponseStore>(dir / "mock_store"), false);
  const auto ctx = RunContext::load(rec, shared_backends(transport));
  for (const auto &o : run_pipeline(ctx)) {
    if (!o.errors.empty()) {
      throw Error("harness recording failed for neuron " + std::to_string(o.neuron) + ": " +
                  o.errors.front());
    }
  }
  fs::remove_all(rec.out_dir);
}

} // namespace neurolens
