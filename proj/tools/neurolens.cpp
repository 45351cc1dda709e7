// Command-line entry point: end-to-end runs, single stages, report tools and
// synthetic harness generation.

#include "CLI11.hpp"
#include "neurolens/harness.hpp"
#include "neurolens/mock_store.hpp"
#include "neurolens/pipeline.hpp"
#include "neurolens/report_tools.hpp"

#include <iostream>

namespace fs = std::filesystem;
using namespace neurolens;

namespace {

struct CommonFlags {
  std::string config;
  std::string neurons;
  std::string mode;
  std::size_t jobs = 0;
  std::string out;
  std::vector<std::string> sets;
};

void add_common(CLI::App *cmd, CommonFlags &f) {
  cmd->add_option("--config", f.config, "Pipeline configuration file");
  cmd->add_option("--neurons", f.neurons, "Neuron selection, e.g. 0-7 or 0,2,5-6");
  cmd->add_option("--mode", f.mode, "Backend mode: live, mock or replay");
  cmd->add_option("--jobs", f.jobs, "Neurons processed in parallel");
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_option("--set", f.sets, "Override a config key: section.key=value");
}

PipelineConfig resolve_config(const CommonFlags &f) {
  PipelineConfig c = f.config.empty() ? PipelineConfig{} : load_config(f.config);
  for (const auto &s : f.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("--set expects section.key=value, got '" + s + "'");
    }
    c.set(s.substr(0, eq), s.substr(eq + 1), fs::current_path());
  }
  if (!f.neurons.empty()) {
    c.neurons = f.neurons;
  }
  if (!f.mode.empty()) {
    c.mode = parse_backend_mode(f.mode);
  }
  if (f.jobs > 0) {
    c.jobs = f.jobs;
  }
  if (!f.out.empty()) {
    c.out_dir = f.out;
  }
  c.validate();
  return c;
}

int cmd_run(const CommonFlags &f) {
  const auto config = resolve_config(f);
  const auto ctx = RunContext::load(config, make_backends(config));
  const auto outcomes = run_pipeline(ctx);
  std::cout << summary_table(outcomes);
  bool infrastructure = false;
  bool other = false;
  for (const auto &o : outcomes) {
    for (const auto &e : o.errors) {
      std::cerr << "neuron " << o.neuron << ": " << e << "\n";
    }
    infrastructure = infrastructure || o.infrastructure_error;
    other = other || (!o.errors.empty() && !o.infrastructure_error);
  }
  return infrastructure ? 1 : other ? 2 : 0;
}

int cmd_stage(const CommonFlags &f, const std::string &name) {
  const Stage stage = parse_stage(name);
  const auto config = resolve_config(f);
  const bool needs_backends = stage == Stage::propose || stage == Stage::validate;
  const auto ctx =
      RunContext::load(config, needs_backends ? make_backends(config) : BackendBundle{});
  for (std::size_t n : ctx.neurons()) {
    run_stage(ctx, stage, n);
    std::cout << "neuron " << n << ": " << name << " -> " << ctx.neuron_dir(n).string() << "\n";
  }
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Neuron concept discovery and validation pipeline"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  auto *run = app.add_subcommand("run", "Run every stage for the selected neurons");
  add_common(run, run_flags);

  CommonFlags stage_flags;
  std::string stage_name;
  auto *stage = app.add_subcommand("stage", "Run one stage from persisted intermediates");
  stage->add_option("name", stage_name, "exemplars, select, grid, propose or validate")->required();
  add_common(stage, stage_flags);

  std::string hist_dir;
  bool hist_csv = false;
  auto *hist = app.add_subcommand("score-histogram", "Histogram of report scores in 0.05 bins");
  hist->add_option("dir", hist_dir, "Directory containing report.json files")->required();
  hist->add_flag("--csv", hist_csv, "CSV output");

  std::string words_dir;
  bool words_csv = false;
  std::size_t top_k = 10;
  auto *words = app.add_subcommand("word-stats", "Vocabulary statistics over concept names");
  words->add_option("dir", words_dir, "Directory containing report.json files")->required();
  words->add_option("--top", top_k, "Number of frequent words to list");
  words->add_flag("--csv", words_csv, "CSV output");

  std::string synth_out;
  std::uint64_t synth_seed = 7;
  bool no_record = false;
  auto *synth = app.add_subcommand("synth", "Write synthetic harness fixtures and a mock store");
  synth->add_option("--out", synth_out, "Fixture directory")->required();
  synth->add_option("--seed", synth_seed, "Generation seed");
  synth->add_flag("--no-record", no_record, "Skip populating the mock store");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*run) {
      return cmd_run(run_flags);
    }
    if (*stage) {
      return cmd_stage(stage_flags, stage_name);
    }
    if (*hist) {
      const auto reports = load_reports(hist_dir);
      std::cout << render_histogram(score_histogram(reports), hist_csv);
      return 0;
    }
    if (*words) {
      const auto reports = load_reports(words_dir);
      const auto concepts = report_concepts(reports);
      std::cout << render_word_stats(word_stats(concepts, top_k), words_csv);
      return 0;
    }
    if (*synth) {
      write_harness(synth_out, default_harness_spec(synth_seed), !no_record);
      std::cout << "synthetic fixtures written to " << synth_out << "\n";
      return 0;
    }
  } catch (const TransportError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const CacheMissError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ProtocolError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const IoError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
