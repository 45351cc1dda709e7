#include "neurolens/pipeline.hpp"

#include "neurolens/exemplar.hpp"
#include "neurolens/grid.hpp"
#include "neurolens/http_transport.hpp"
#include "neurolens/image.hpp"
#include "neurolens/mock_store.hpp"
#include "neurolens/subset_select.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <thread>

namespace neurolens {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json read_artifact(const fs::path &path, Stage producer) {
  if (!fs::exists(path)) {
    throw MissingArtifactError(path.string(), to_string(producer));
  }
  try {
    return json::parse(read_text_file(path));
  } catch (const json::exception &e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_json(const fs::path &path, const json &j) { write_file_atomic(path, j.dump(1) + "\n"); }

bool is_infrastructure(const std::exception &e) {
  return dynamic_cast<const TransportError *>(&e) != nullptr ||
         dynamic_cast<const CacheMissError *>(&e) != nullptr ||
         dynamic_cast<const ProtocolError *>(&e) != nullptr ||
         dynamic_cast<const IoError *>(&e) != nullptr;
}

std::string input_digest(const fs::path &p) { return sha256_hex(read_file(p)); }

void require_file(const fs::path &p, const std::string &what) {
  if (p.empty()) {
    throw ConfigError(what + " path is not configured");
  }
  if (!fs::exists(p)) {
    throw ConfigError(what + " not found: " + p.string());
  }
}

void stage_exemplars(const RunContext &ctx, std::size_t neuron) {
  const auto set = extract_exemplars(ctx.activations.column(neuron),
                                     {ctx.config.rank_k, ctx.config.cap}, ctx.neuron_ref(neuron));
  write_json(ctx.neuron_dir(neuron) / exemplars_file, set);
}

void stage_select(const RunContext &ctx, std::size_t neuron) {
  const auto dir = ctx.neuron_dir(neuron);
  const auto set = read_artifact(dir / exemplars_file, Stage::exemplars).get<ExemplarSet>();
  const auto graph = build_graph(set, ctx.embeddings);
  const auto selection = select_subset(graph, ctx.config.m);
  write_json(dir / selection_file, selection_to_json(selection, graph));
}

void stage_grid(const RunContext &ctx, std::size_t neuron) {
  const auto dir = ctx.neuron_dir(neuron);
  const auto selection = read_artifact(dir / selection_file, Stage::select);
  const auto indices = selection.at("input_indices").get<std::vector<std::size_t>>();
  std::vector<Bytes> encoded;
  for (std::size_t i : indices) {
    encoded.push_back(fetch_uri(ctx.manifest.resolve_uri(i)));
  }
  const auto grid = compose_grid(encoded, GridSpec::for_count(indices.size(), ctx.config.cell_px));
  std::string inputs;
  for (std::size_t i : indices) {
    inputs += (inputs.empty() ? "" : ",") + std::to_string(i);
  }
  const NeuronRef ref = ctx.neuron_ref(neuron);
  const TextChunks text{{"neuron", ref.model_id + "/" + ref.layer_id + "/" + std::to_string(neuron)},
                        {"inputs", inputs}};
  write_file_atomic(dir / grid_file, encode_png(grid, text));
}

void stage_propose(const RunContext &ctx, std::size_t neuron) {
  const auto dir = ctx.neuron_dir(neuron);
  const auto selection = read_artifact(dir / selection_file, Stage::select);
  if (!fs::exists(dir / grid_file)) {
    throw MissingArtifactError((dir / grid_file).string(), to_string(Stage::grid));
  }
  const auto proposal =
      propose_concept(ctx.neuron_ref(neuron), read_file(dir / grid_file),
                      selection.at("input_indices").get<std::vector<std::size_t>>(),
                      ctx.bad_answers, *ctx.backends.mllm, ctx.prompt);
  write_json(dir / proposal_file, proposal);
}

ValidationReport stage_validate(const RunContext &ctx, std::size_t neuron) {
  const auto dir = ctx.neuron_dir(neuron);
  ConceptProposal proposal;
  try {
    proposal = read_artifact(dir / proposal_file, Stage::propose).get<ConceptProposal>();
  } catch (const json::exception &e) {
    throw FormatError((dir / proposal_file).string() + ": " + e.what());
  }
  const ValidationParams params{ctx.config.cohyponyms, ctx.config.caption_pairs,
                                ctx.config.images_per_caption, ctx.config.inference_steps};
  auto &activation = *ctx.backends.activation;
  const ActivationFn activation_fn = [&](const GeneratedImage &img) {
    return activation
        .call({RequestKind::activation, "", img.bytes, {{"neuron", neuron}, {"uri", img.uri}}})
        .number();
  };
  const ImageSink sink = [&](const GeneratedImage &img) { write_file_atomic(dir / img.uri, img.bytes); };
  const auto report = validate_concept(ctx.neuron_ref(neuron), proposal, ctx.backends, params,
                                       activation_fn, sink, "images/");
  write_file_atomic(dir / report_file, serialize_report(report));
  return report;
}

} // namespace

std::string to_string(Stage stage) {
  switch (stage) {
  case Stage::exemplars:
    return "exemplars";
  case Stage::select:
    return "select";
  case Stage::grid:
    return "grid";
  case Stage::propose:
    return "propose";
  case Stage::validate:
    return "validate";
  }
  return "?";
}

Stage parse_stage(const std::string &name) {
  for (Stage s : all_stages()) {
    if (to_string(s) == name) {
      return s;
    }
  }
  throw ConfigError("unknown stage '" + name + "' (expected exemplars, select, grid, propose or validate)");
}

const std::vector<Stage> &all_stages() {
  static const std::vector<Stage> stages{Stage::exemplars, Stage::select, Stage::grid,
                                         Stage::propose, Stage::validate};
  return stages;
}

std::optional<std::string> process_env(const std::string &name) {
  if (const char *v = std::getenv(name.c_str()); v != nullptr && *v != '\0') {
    return std::string(v);
  }
  return std::nullopt;
}

BackendBundle make_backends(const PipelineConfig &config, const EnvLookup &env) {
  const RetryPolicy policy{config.max_attempts};
  auto client = [&](std::shared_ptr<Transport> t) {
    return std::make_shared<BackendClient>(std::move(t), policy, RefusalDetector{},
                                           config.max_in_flight);
  };
  if (config.mode == BackendMode::live) {
    std::shared_ptr<ResponseStore> store;
    if (!config.store.empty()) {
      store = std::make_shared<ResponseStore>(config.store);
    }
    auto service = [&](const std::string &name) {
      const auto url = env("NL_" + name + "_URL");
      if (!url) {
        throw ConfigError("live mode needs NL_" + name + "_URL");
      }
      std::shared_ptr<Transport> t = std::make_shared<HttpTransport>(
          *url, env("NL_API_KEY_" + name).value_or(""),
          std::chrono::seconds(static_cast<long>(config.timeout_s)));
      if (store) {
        t = std::make_shared<RecordingTransport>(t, store, true);
      }
      return client(t);
    };
    return {service("MLLM"), service("LLM"), service("DIFFUSION"), service("ACTIVATION")};
  }
  if (!fs::is_directory(config.store)) {
    throw ConfigError(to_string(config.mode) + " mode needs a mock store; not found: " +
                      config.store.string());
  }
  const MissPolicy miss = config.mode == BackendMode::replay ? MissPolicy::error
                                                             : parse_miss_policy(config.mock_fallback);
  auto transport =
      std::make_shared<MockTransport>(std::make_shared<ResponseStore>(config.store), miss);
  return {client(transport), client(transport), client(transport), client(transport)};
}

BackendBundle shared_backends(std::shared_ptr<Transport> transport, std::size_t max_in_flight) {
  auto client = [&] {
    return std::make_shared<BackendClient>(transport, RetryPolicy{}, RefusalDetector{},
                                           max_in_flight);
  };
  return {client(), client(), client(), client()};
}

RunContext RunContext::load(const PipelineConfig &config, BackendBundle backends) {
  config.validate();
  require_file(config.manifest, "manifest");
  require_file(config.activations, "activation matrix");
  require_file(config.embeddings, "embedding matrix");
  RunContext ctx;
  ctx.config = config;
  ctx.manifest = load_manifest(config.manifest);
  ctx.activations = load_activations(config.activations);
  ctx.embeddings = load_embeddings(config.embeddings);
  validate_manifest(ctx.manifest, ctx.activations);
  validate_manifest(ctx.manifest, ctx.embeddings);
  if (!config.bad_answers.empty()) {
    require_file(config.bad_answers, "bad-answer list");
    ctx.bad_answers = BadAnswerList::from_lines(read_text_file(config.bad_answers));
  }
  if (!config.prompt_template.empty()) {
    require_file(config.prompt_template, "prompt template");
    ctx.prompt = ProposerPrompt::load(config.prompt_template.string());
  }
  ctx.backends = std::move(backends);
  ctx.neurons();
  return ctx;
}

std::vector<std::size_t> RunContext::neurons() const {
  const std::size_t width = activations.n_neurons();
  auto selected = parse_neuron_range(config.neurons);
  if (!selected) {
    std::vector<std::size_t> all(width);
    for (std::size_t i = 0; i < width; ++i) {
      all[i] = i;
    }
    return all;
  }
  for (std::size_t n : *selected) {
    if (n >= width) {
      throw ConfigError("neuron " + std::to_string(n) + " is outside the activation matrix (" +
                        std::to_string(width) + " neurons)");
    }
  }
  return *selected;
}

NeuronRef RunContext::neuron_ref(std::size_t index) const {
  return {config.model_id, config.layer_id, index};
}

fs::path RunContext::neuron_dir(std::size_t index) const {
  char name[32];
  std::snprintf(name, sizeof name, "neuron_%05zu", index);
  return config.out_dir / name;
}

void run_stage(const RunContext &ctx, Stage stage, std::size_t neuron) {
  fs::create_directories(ctx.neuron_dir(neuron));
  switch (stage) {
  case Stage::exemplars:
    stage_exemplars(ctx, neuron);
    break;
  case Stage::select:
    stage_select(ctx, neuron);
    break;
  case Stage::grid:
    stage_grid(ctx, neuron);
    break;
  case Stage::propose:
    stage_propose(ctx, neuron);
    break;
  case Stage::validate:
    stage_validate(ctx, neuron);
    break;
  }
}

NeuronOutcome run_neuron(const RunContext &ctx, std::size_t neuron) {
  NeuronOutcome out;
  out.neuron = neuron;
  Stage current = Stage::exemplars;
  try {
    for (Stage s : {Stage::exemplars, Stage::select, Stage::grid, Stage::propose}) {
      current = s;
      run_stage(ctx, s, neuron);
    }
    current = Stage::validate;
    const auto report = stage_validate(ctx, neuron);
    out.concept_name = report.concept_name;
    out.refusal = report.refusal;
    out.score = report.score;
    out.infrastructure_error = report.infrastructure_error;
    out.errors = report.errors;
  } catch (const Error &e) {
    out.errors.push_back(to_string(current) + ": " + e.what());
    out.infrastructure_error = is_infrastructure(e);
  }
  return out;
}

nlohmann::json run_manifest(const RunContext &ctx, std::span<const std::size_t> neurons) {
  json inputs = {
      {"manifest", {{"path", ctx.config.manifest.string()}, {"sha256", input_digest(ctx.config.manifest)}}},
      {"activations",
       {{"path", ctx.config.activations.string()}, {"sha256", input_digest(ctx.config.activations)}}},
      {"embeddings",
       {{"path", ctx.config.embeddings.string()}, {"sha256", input_digest(ctx.config.embeddings)}}},
  };
  return json{{"config", ctx.config.to_json()},
              {"inputs", std::move(inputs)},
              {"neurons", std::vector<std::size_t>(neurons.begin(), neurons.end())},
              {"prompt_sha256", sha256_hex(ctx.prompt.template_text())},
              {"bad_answers", ctx.bad_answers.phrases()}};
}

std::vector<NeuronOutcome> run_pipeline(const RunContext &ctx) {
  const auto neurons = ctx.neurons();
  fs::create_directories(ctx.config.out_dir);
  write_json(ctx.config.out_dir / "run_manifest.json", run_manifest(ctx, neurons));

  std::vector<NeuronOutcome> outcomes(neurons.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < neurons.size(); i = next++) {
      outcomes[i] = run_neuron(ctx, neurons[i]);
    }
  };
  const std::size_t jobs = std::min(ctx.config.jobs, neurons.size());
  std::vector<std::jthread> pool;
  for (std::size_t t = 1; t < jobs; ++t) {
    pool.emplace_back(worker);
  }
  worker();
  pool.clear();
  return outcomes;
}

std::string summary_table(std::span<const NeuronOutcome> outcomes) {
  std::size_t width = 7;
  auto label = [](const NeuronOutcome &o) {
    if (!o.errors.empty() && !o.concept_name && !o.refusal) {
      return std::string("<error>");
    }
    return o.refusal ? std::string("<refused>") : o.concept_name.value_or("");
  };
  for (const auto &o : outcomes) {
    width = std::max(width, label(o).size());
  }
  std::ostringstream out;
  char line[64];
  std::snprintf(line, sizeof line, "%-8s ", "neuron");
  out << line << std::string("concept") << std::string(width - 7 + 2, ' ') << "score\n";
  for (const auto &o : outcomes) {
    std::snprintf(line, sizeof line, "%-8zu ", o.neuron);
    const std::string l = label(o);
    char score[32];
    std::snprintf(score, sizeof score, "%.3f", o.score);
    out << line << l << std::string(width - l.size() + 2, ' ') << score
        << (o.errors.empty() ? "" : "  (" + std::to_string(o.errors.size()) + " error(s))") << "\n";
  }
  return out.str();
}

} // namespace neurolens
