//
// sage-amine - Copyright 2026 The sage-amine Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <unordered_set>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "sage/benchmark.hpp"
#include "sage/chemclass.hpp"
#include "sage/dataset.hpp"
#include "sage/explore.hpp"
#include "sage/fingerprint.hpp"
#include "sage/formula.hpp"
#include "sage/genops.hpp"
#include "sage/ngram.hpp"
#include "sage/predictor.hpp"
#include "sage/qspr.hpp"
#include "sage/reference.hpp"
#include "sage/smiles.hpp"

namespace fs = std::filesystem;
using namespace sage;

namespace {

enum Exit { kOk = 0, kUsage = 1, kDataError = 2, kRuntimeError = 3 };

struct Globals {
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 1;
  bool threads_set = false;
};

std::vector<std::string> read_lines(const std::string &path) {
  if (path == "-") {
    std::vector<std::string> out;
    for (std::string line; std::getline(std::cin, line);)
      if (!line.empty()) out.push_back(line);
    return out;
  }
  return read_smiles_file(path);
}

// Positional SMILES, or stdin lines when none are given.
std::vector<std::string> inputs(const std::vector<std::string> &args) {
  return args.empty() ? read_lines("-") : args;
}

void ensure_parent(const std::string &path) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

std::vector<Molecule> parse_all(const std::vector<std::string> &smiles) {
  std::vector<Molecule> out;
  out.reserve(smiles.size());
  for (const auto &s : smiles) out.push_back(parse_smiles(s));
  return out;
}

MutationConfig mutation_config(const std::vector<double> &weights, const std::string &alphabet,
                               int max_heavy) {
  MutationConfig cfg;
  if (!weights.empty()) {
    if (weights.size() != cfg.weights.size())
      throw CLI::ValidationError("--weights", fmt::format("needs {} values", cfg.weights.size()));
    std::copy(weights.begin(), weights.end(), cfg.weights.begin());
  }
  cfg.alphabet.clear();
  for (char ch : alphabet) {
    auto e = element_from_symbol(std::string(1, ch));
    if (!e || *e == Element::H)
      throw CLI::ValidationError("--alphabet", fmt::format("unsupported element '{}'", ch));
    cfg.alphabet.push_back(*e);
  }
  cfg.max_heavy_atoms = max_heavy;
  return cfg;
}

void print_stats(const IterationStats &st, int total) {
  std::cerr << fmt::format("iteration {}/{}: scored={} failed={} median={:.4f} best={:.4f}\n",
                           st.iteration, total, st.scored, st.failed, st.median, st.buffer_best);
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Amine generation, scoring and exploration toolkit", "sage"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version",
                       fmt::format("sage {} (model {}, predictor {}, checkpoint {})", "0.1.0",
                                   kModelMagic, kPredictorMagic, kCheckpointMagic));
  Globals g;
  app.add_option_function<std::uint64_t>(
         "--seed", [&](std::uint64_t s) { g.seed = s, g.seed_set = true; }, "Random seed")
      ->option_text("UINT");
  app.add_option_function<int>(
         "--threads", [&](int t) { g.threads = t, g.threads_set = true; },
         "Cap on scoring threads")
      ->check(CLI::PositiveNumber);

  std::function<int()> action;

  // Structure commands.
  std::vector<std::string> smiles_args;
  auto *canonical = app.add_subcommand("canonical", "Print canonical SMILES");
  canonical->add_option("smiles", smiles_args, "SMILES (default: stdin lines)");
  canonical->callback([&] {
    action = [&] {
      for (const auto &s : inputs(smiles_args)) std::cout << canonical_smiles(parse_smiles(s)) << "\n";
      return kOk;
    };
  });

  auto *parse = app.add_subcommand("parse", "Validate SMILES and print formula and weight");
  parse->add_option("smiles", smiles_args, "SMILES (default: stdin lines)");
  parse->callback([&] {
    action = [&] {
      std::cout << "smiles,canonical,formula,heavy_atoms,molecular_weight\n";
      for (const auto &s : inputs(smiles_args)) {
        const Molecule m = parse_smiles(s);
        std::cout << fmt::format("{},{},{},{},{:.3f}\n", s, canonical_smiles(m),
                                 to_string(molecular_formula(m)), m.heavy_atom_count(),
                                 molecular_weight(m));
      }
      return kOk;
    };
  });

  auto *classify = app.add_subcommand("classify", "Print the amine class");
  classify->add_option("smiles", smiles_args, "SMILES (default: stdin lines)");
  classify->callback([&] {
    action = [&] {
      for (const auto &s : inputs(smiles_args))
        std::cout << to_string(classify_amine(parse_smiles(s))) << "\n";
      return kOk;
    };
  });

  int radius = kDefaultRadius;
  std::size_t width = kDefaultWidth;
  auto *fingerprint = app.add_subcommand("fingerprint", "Print the set bits of the ECFP");
  fingerprint->add_option("smiles", smiles_args, "SMILES (default: stdin lines)");
  fingerprint->add_option("--radius", radius, "Neighbourhood radius")->capture_default_str();
  fingerprint->add_option("--width", width, "Bit width")->capture_default_str();
  fingerprint->callback([&] {
    action = [&] {
      for (const auto &s : inputs(smiles_args)) {
        const Fingerprint fp = ecfp(parse_smiles(s), radius, width);
        std::string bits;
        for (std::size_t b = 0; b < fp.width(); ++b)
          if (fp.test(b)) bits += (bits.empty() ? "" : " ") + std::to_string(b);
        std::cout << bits << "\n";
      }
      return kOk;
    };
  });

  std::string smiles_a, smiles_b;
  auto *tanimoto_cmd = app.add_subcommand("tanimoto", "Tanimoto similarity of two molecules");
  tanimoto_cmd->add_option("a", smiles_a)->required();
  tanimoto_cmd->add_option("b", smiles_b)->required();
  tanimoto_cmd->callback([&] {
    action = [&] {
      std::cout << fmt::format("{:.6f}\n", tanimoto(ecfp(parse_smiles(smiles_a)),
                                                    ecfp(parse_smiles(smiles_b))));
      return kOk;
    };
  });

  // Generator commands.
  std::string corpus_path, out_path, model_path;
  int order = NgramModel::kDefaultOrder;
  double alpha = NgramModel::kDefaultAlpha;
  auto *pretrain = app.add_subcommand("pretrain", "Train an n-gram generator on a corpus");
  pretrain->add_option("--corpus", corpus_path, "One SMILES per line")->required();
  pretrain->add_option("--out", out_path, "Model file to write")->required();
  pretrain->add_option("--order", order)->capture_default_str()->check(CLI::PositiveNumber);
  pretrain->add_option("--alpha", alpha)->capture_default_str()->check(CLI::NonNegativeNumber);
  pretrain->callback([&] {
    action = [&] {
      const auto corpus = read_lines(corpus_path);
      const auto model = NgramModel::train(corpus, order, alpha);
      ensure_parent(out_path);
      model.save_file(out_path);
      std::cerr << fmt::format("trained order-{} model on {} strings, {} contexts\n", order,
                               corpus.size(), model.context_count());
      return kOk;
    };
  });

  std::size_t count = 1000;
  int max_len = NgramModel::kDefaultMaxLen;
  bool no_guard = false;
  auto *sample = app.add_subcommand("sample", "Sample SMILES strings from a model");
  sample->add_option("--model", model_path)->required();
  sample->add_option("-n,--count", count)->capture_default_str();
  sample->add_option("--max-len", max_len)->capture_default_str()->check(CLI::PositiveNumber);
  sample->add_flag("--no-guard", no_guard, "Disable syntax-guarded sampling");
  sample->callback([&] {
    action = [&] {
      const auto model = NgramModel::load_file(model_path);
      std::mt19937_64 rng(g.seed);
      for (const auto &s : model.sample(count, rng, max_len, !no_guard)) std::cout << s << "\n";
      return kOk;
    };
  });

  std::string samples_path, training_path, dataset_name = "corpus", model_name = "ngram";
  auto *metrics = app.add_subcommand("metrics", "Distribution metrics of generated samples");
  metrics->add_option("--samples", samples_path)->required();
  metrics->add_option("--training", training_path, "Training corpus for novelty")->required();
  metrics->add_option("--dataset", dataset_name)->capture_default_str();
  metrics->add_option("--model-name", model_name)->capture_default_str();
  metrics->callback([&] {
    action = [&] {
      std::ifstream in(samples_path);
      if (!in) throw IoError("cannot read " + samples_path);
      std::vector<std::string> samples;
      for (std::string line; std::getline(in, line);) samples.push_back(line);
      std::unordered_set<std::string> training;
      for (const auto &s : read_lines(training_path)) {
        try {
          training.insert(canonical_smiles(parse_smiles(s)));
        } catch (const ParseError &) {
        }
      }
      const GenMetrics m = distribution_metrics(samples, training, g.seed);
      std::cout << metrics_csv_header() << "\n" << metrics_csv_row(dataset_name, model_name, m)
                << "\n";
      return kOk;
    };
  });

  // QSPR commands.
  std::string data_path, kind = "ridge", grid;
  double param = 1.0;
  int folds = 5;
  auto *qtrain = app.add_subcommand("qspr-train", "Fit a property predictor");
  qtrain->add_option("--data", data_path, "CSV with smiles,value[,temperature]")->required();
  qtrain->add_option("--model", kind)
      ->check(CLI::IsMember({"lookup", "knn", "ridge"}))
      ->capture_default_str();
  qtrain->add_option("--param", param, "k for knn, lambda for ridge")->capture_default_str();
  qtrain->add_option("--grid", grid, "Comma-separated parameters to cross-validate");
  qtrain->add_option("--folds", folds)->capture_default_str()->check(CLI::Range(2, 100));
  qtrain->add_option("--out", out_path, "Predictor file to write");
  qtrain->callback([&] {
    action = [&] {
      const PropertyDataset ds = load_dataset(data_path);
      for (const auto &w : ds.warnings) std::cerr << fmt::format("warning: line {}: {}\n", w.line, w.message);
      double chosen = param;
      if (!grid.empty()) {
        const auto points = grid_search(ds, kind, parse_grid(grid), folds, g.seed);
        const std::size_t best = best_grid_point(points);
        for (std::size_t i = 0; i < points.size(); ++i)
          std::cout << cv_report_csv(points[i].report, ds.property,
                                     fmt::format("{}:{}", kind, points[i].param), i == 0);
        chosen = points[best].param;
        std::cerr << fmt::format("selected {}={}\n", kind == "knn" ? "k" : "lambda", chosen);
      } else if (kind != "lookup") {
        const auto report = cross_validate(ds, make_trainer(kind, param), folds, g.seed);
        std::cout << cv_report_csv(report, ds.property, fmt::format("{}:{}", kind, param));
      }
      if (!out_path.empty()) {
        ensure_parent(out_path);
        make_trainer(kind, chosen)(ds)->save_file(out_path);
      }
      return kOk;
    };
  });

  std::string predictor_path;
  double temperature = kStandardTemperature;
  auto *qpredict = app.add_subcommand("qspr-predict", "Predict a property");
  qpredict->add_option("--predictor", predictor_path, "Predictor file or spec")->required();
  qpredict->add_option("--temperature", temperature, "Kelvin")->capture_default_str();
  qpredict->add_option("smiles", smiles_args, "SMILES (default: stdin lines)");
  qpredict->callback([&] {
    action = [&] {
      const auto p = predictor_path.find(':') == std::string::npos
                         ? load_predictor_file(predictor_path)
                         : make_predictor(predictor_path);
      std::cout << "smiles,prediction\n";
      for (const auto &s : inputs(smiles_args)) {
        const Molecule m = parse_smiles(s);
        try {
          std::cout << fmt::format("{},{:.6f}\n", s, p->predict(m, temperature));
        } catch (const MissingKey &) {
          std::cout << s << ",\n";
        }
      }
      return kOk;
    };
  });

  // Benchmark.
  std::string candidates_path, tasks_path;
  auto *bench = app.add_subcommand("benchmark", "Score a candidate list on the benchmark tasks");
  bench->add_option("--candidates", candidates_path, "One SMILES per line")->required();
  bench->add_option("--tasks", tasks_path, "Task file (default: built-in suite)");
  bench->callback([&] {
    action = [&] {
      const auto tasks = tasks_path.empty() ? default_tasks() : load_task_file(tasks_path);
      const auto result = run_suite(tasks, replay_source(read_lines(candidates_path)), 0);
      std::cout << suite_report_csv(result);
      std::cerr << fmt::format("rediscovery {:.3f} similarity {:.3f} median {:.3f} isomer "
                               "{:.3f} total {:.3f}\n",
                               result.subtotal(TaskKind::kRediscovery),
                               result.subtotal(TaskKind::kSimilarity),
                               result.subtotal(TaskKind::kMedianSimilarity),
                               result.subtotal(TaskKind::kIsomer), result.total());
      return kOk;
    };
  });

  // Library commands.
  std::vector<std::string> seed_smiles;
  std::vector<double> weights;
  std::string alphabet = "CNO";
  int max_heavy = 12;
  bool amines_only = false;
  std::size_t limit = 0;
  auto *grow = app.add_subcommand("grow", "Grow a molecule library by random edits");
  grow->add_option("--from", seed_smiles, "Seed SMILES (default: the reference amines)");
  grow->add_option("-n,--count", count)->capture_default_str();
  grow->add_option("--weights", weights, "Six edit weights")->expected(6);
  grow->add_option("--alphabet", alphabet)->capture_default_str();
  grow->add_option("--max-heavy", max_heavy)->capture_default_str();
  grow->add_flag("--amines-only", amines_only);
  grow->callback([&] {
    action = [&] {
      std::vector<Molecule> seeds;
      if (seed_smiles.empty()) {
        for (const auto &r : reference_amines()) {
          Molecule m = parse_smiles(r.smiles);
          if (m.heavy_atom_count() <= max_heavy) seeds.push_back(std::move(m));
        }
      } else {
        seeds = parse_all(seed_smiles);
      }
      MutationConfig cfg = mutation_config(weights, alphabet, max_heavy);
      cfg.require_amine = amines_only;
      std::mt19937_64 rng(g.seed);
      for (const auto &s : grow_library(seeds, count, rng, cfg)) std::cout << s << "\n";
      return kOk;
    };
  });

  auto *enumerate = app.add_subcommand("enumerate", "Every molecule reachable by edits");
  enumerate->add_option("--from", seed_smiles, "Seed SMILES")->required();
  enumerate->add_option("--weights", weights, "Six edit weights; zero disables a kind")
      ->expected(6);
  enumerate->add_option("--alphabet", alphabet)->capture_default_str();
  enumerate->add_option("--max-heavy", max_heavy)->capture_default_str();
  enumerate->add_option("--limit", limit, "Stop after this many (0: no limit)");
  enumerate->add_flag("--amines-only", amines_only);
  enumerate->callback([&] {
    action = [&] {
      const MutationConfig cfg = mutation_config(weights, alphabet, max_heavy);
      for (const auto &s : enumerate_closure(parse_all(seed_smiles), cfg, limit)) {
        if (amines_only && !is_amine(parse_smiles(s))) continue;
        std::cout << s << "\n";
      }
      return kOk;
    };
  });

  // Exploration loop.
  std::string config_path, out_dir;
  std::optional<int> iterations;
  auto *run = app.add_subcommand("run", "Run the exploration loop");
  run->add_option("--config", config_path, "key=value config file")->required();
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--iterations", iterations, "Override the configured iteration count");
  run->callback([&] {
    action = [&] {
      RunConfig c = load_run_config(config_path);
      if (g.seed_set) c.seed = g.seed;
      if (g.threads_set) c.threads = g.threads;
      if (iterations) c.iterations = *iterations;
      const auto state =
          run_experiment(c, out_dir, [&](const IterationStats &st) { print_stats(st, c.iterations); });
      if (!state.buffer.empty())
        std::cout << fmt::format("{},{:.6f}\n", state.buffer.front().smiles,
                                 state.buffer.front().score);
      return kOk;
    };
  });

  auto *resume = app.add_subcommand("resume", "Continue a checkpointed run");
  resume->add_option("--out", out_dir, "Run directory")->required();
  resume->add_option("--iterations", iterations, "New total iteration count");
  resume->callback([&] {
    action = [&] {
      const auto state = resume_experiment(out_dir, iterations, [&](const IterationStats &st) {
        print_stats(st, iterations.value_or(0));
      });
      if (!state) {
        std::cerr << "warning: run already finished; reports rewritten\n";
        return kOk;
      }
      if (!state->buffer.empty())
        std::cout << fmt::format("{},{:.6f}\n", state->buffer.front().smiles,
                                 state->buffer.front().score);
      return kOk;
    };
  });

  std::size_t top = 10;
  auto *report = app.add_subcommand("report", "Rewrite reports and print the top of the buffer");
  report->add_option("--out", out_dir, "Run directory")->required();
  report->add_option("--top", top)->capture_default_str();
  report->callback([&] {
    action = [&] {
      const Explorer ex =
          Explorer::from_checkpoint((fs::path(out_dir) / kCheckpointFile).string());
      ex.write_reports(out_dir);
      std::istringstream rows(ex.buffer_csv());
      std::string line;
      for (std::size_t i = 0; i <= top && std::getline(rows, line); ++i) std::cout << line << "\n";
      return kOk;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    std::cerr << "error: " << e.what() << "\n" << app.help();
    return kUsage;
  }

  try {
    return action();
  } catch (const CLI::ValidationError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ParseError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const IoError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::invalid_argument &e) {  // ConfigError, TokenizeError, EmptyInput, ...
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const CorruptCheckpoint &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const ModelFormatError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const PredictorLoadError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const SchemaError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const DuplicateKey &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
}
