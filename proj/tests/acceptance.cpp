// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <unistd.h>

#include <fmt/format.h>

#include "sage/benchmark.hpp"
#include "sage/chemclass.hpp"
#include "sage/dataset.hpp"
#include "sage/explore.hpp"
#include "sage/fingerprint.hpp"
#include "sage/formula.hpp"
#include "sage/genops.hpp"
#include "sage/predictor.hpp"
#include "sage/qspr.hpp"
#include "sage/reference.hpp"
#include "sage/scoring.hpp"
#include "sage/smiles.hpp"

using namespace sage;
namespace fs = std::filesystem;

namespace {

const std::string kData = SAGE_DATA_DIR;
const std::string kCorpus = kData + "/corpus/amines_5k.smi";

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

fs::path scratch_dir(const std::string &name) {
  const fs::path p =
      fs::temp_directory_path() / fmt::format("sage_acceptance_{}_{}", ::getpid(), name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write_file(const fs::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

std::string read_text(const fs::path &path) { return read_file(path.string()); }

// 1. Round trip and permutation invariance of canonical SMILES.
Outcome parser_properties() {
  const auto t0 = Clock::now();
  const auto corpus = read_smiles_file(kCorpus);
  std::mt19937_64 rng(1);
  std::size_t round_trip = 0, invariant = 0;
  for (const auto &s : corpus) {
    const Molecule m = parse_smiles(s);
    const std::string c = canonical_smiles(m);
    if (canonicalize(c) == c) ++round_trip;
    bool ok = true;
    for (int i = 0; i < 5 && ok; ++i) ok = canonicalize(random_smiles(m, rng)) == c;
    if (ok) ++invariant;
  }
  const double secs = seconds_since(t0);
  const bool pass = corpus.size() >= 1000 && round_trip == corpus.size() &&
                    invariant == corpus.size() && secs < 10.0;
  return {pass, fmt::format("{} molecules, round trip {}/{}, permutation-invariant {}/{}, {:.2f} s",
                            corpus.size(), round_trip, corpus.size(), invariant, corpus.size(),
                            secs)};
}

// 2. Reference amine classes.
Outcome classification() {
  std::size_t ok = 0, n = 0;
  std::string wrong;
  for (const auto &r : reference_amines()) {
    ++n;
    const AmineType t = classify_amine(parse_smiles(r.smiles));
    if (t == r.type)
      ++ok;
    else
      wrong += fmt::format(" {}={}", r.name, to_string(t));
  }
  return {ok == 23 && n == 23, fmt::format("{}/{} exact{}", ok, n, wrong)};
}

// 3. Scaler breakpoints.
Outcome scaler_pins() {
  const auto s = default_scalers();
  struct Pin {
    Property p;
    double x, y;
  };
  const Pin pins[] = {
      {Property::kPka, 7, 0},          {Property::kPka, 14, 1},
      {Property::kViscosity, 2, 0},    {Property::kViscosity, -1, 1},
      {Property::kVaporPressure, 3, 0}, {Property::kVaporPressure, -3, 1},
      {Property::kBoilingPoint, 80, 0}, {Property::kBoilingPoint, 250, 1},
      {Property::kMeltingPoint, 80, 0}, {Property::kMeltingPoint, 40, 1},
      {Property::kLogS, -4, 0},         {Property::kLogS, 2, 1},
      {Property::kPrice, 0, 1},         {Property::kPrice, 10, 0},
  };
  double worst = 0;
  for (const auto &pin : pins) worst = std::max(worst, std::abs(scale(pin.x, s.at(pin.p)) - pin.y));
  return {worst <= 1e-12, fmt::format("{} breakpoints, max error {:.1e}", std::size(pins), worst)};
}

// 4. Benchmark ceilings.
Outcome benchmark_ceiling() {
  std::vector<std::string> targets;
  for (const auto &t : default_tasks())
    if (t.kind == TaskKind::kRediscovery) targets.push_back(t.targets.front());
  const auto suite = run_suite(default_tasks(), replay_source(targets), 0);
  const double rediscovery = suite.subtotal(TaskKind::kRediscovery);

  MutationConfig cfg;
  cfg.max_heavy_atoms = 6;
  cfg.weights = {1, 1, 0, 1, 1, 1};
  const auto universe =
      enumerate_closure({parse_smiles("C"), parse_smiles("N"), parse_smiles("O")}, cfg);
  const auto formula = parse_formula("C4H11NO");
  std::vector<std::string> isomers;
  for (const auto &s : universe) {
    const Molecule m = parse_smiles(s);
    if (molecular_formula(m) == formula && is_amine(m)) isomers.push_back(s);
  }
  const double isomer = score_task(isomer_task("C4H11NO"), prepare_candidates(isomers)).value;
  return {rediscovery == 10.0 && isomer == 1.0,
          fmt::format("rediscovery subtotal {:.3f}; C4H11NO isomer score {:.3f} over all {} "
                      "constitutional isomers (no more than {} exist)",
                      rediscovery, isomer, isomers.size(), isomers.size())};
}

// 5. Desk-scale similarity-to-MEA runs.
Outcome desk_rediscovery() {
  const auto t0 = Clock::now();
  int reached = 0;
  std::string per_seed;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    RunConfig c = desk_profile();
    c.objective = "similarity:MEA";
    c.corpus = kCorpus;
    c.seed = seed;
    Explorer ex(c);
    int hit = 0;
    while (!ex.finished() && ex.state().iteration < 20) {
      const auto &st = ex.step();
      if (st.buffer_best == 1.0) {
        hit = st.iteration;
        break;
      }
    }
    if (hit > 0) ++reached;
    per_seed += hit > 0 ? fmt::format(" {}", hit) : " -";
  }
  const double secs = seconds_since(t0);
  return {reached >= 4 && secs < 300,
          fmt::format("best 1.000 on {}/5 seeds within 20 iterations (iteration reached:{}), "
                      "{:.1f} s",
                      reached, per_seed, secs)};
}

// Ridge over a shipped property table with lambda chosen by 5-fold CV.
std::string cv_ridge_spec(Property p) {
  const std::string path = fmt::format("{}/predictors/{}.csv", kData, to_string(p));
  const auto grid = grid_search(load_dataset(path), "ridge", {0.01, 0.1, 1, 10, 100, 1000}, 5, 0);
  return fmt::format("ridge:{}:lambda={}", path, grid[best_grid_point(grid)].param);
}

// 6a. SPO monotonicity over the nine objective/restriction pairs.
Outcome spo_monotonicity() {
  const auto t0 = Clock::now();
  const char *objectives[] = {"max_pka", "min_viscosity", "min_vapor_pressure"};
  const Restriction restrictions[] = {Restriction::kPrimarySecondary,
                                      Restriction::kTertiaryCyclicPoly, Restriction::kNone};
  std::map<Property, std::string> predictors;
  for (Property p : {Property::kPka, Property::kViscosity, Property::kVaporPressure})
    predictors[p] = cv_ridge_spec(p);
  int good = 0;
  std::string detail;
  for (const char *obj : objectives) {
    for (Restriction r : restrictions) {
      RunConfig c = desk_profile();
      c.objective = fmt::format("spo:{}", obj);
      c.restriction = r;
      c.corpus = kCorpus;
      c.seed = 3;
      c.predictors = predictors;
      Explorer ex(c);
      ex.run();
      bool monotone = true;
      int improvements = 0;
      double prev = ex.state().stats.front().buffer_best;
      for (const auto &st : ex.state().stats) {
        if (st.buffer_best < prev) monotone = false;
        if (st.buffer_best > prev) ++improvements;
        prev = st.buffer_best;
      }
      if (monotone && improvements >= 3) ++good;
      detail += fmt::format(" {}/{}:{}{}{}", obj, to_string(r), improvements,
                            monotone ? "" : " not monotone",
                            prev == 1.0 ? fmt::format(" (ceiling at iteration {})",
                                                      [&] {
                                                        for (const auto &st : ex.state().stats)
                                                          if (st.buffer_best == 1.0)
                                                            return st.iteration;
                                                        return 0;
                                                      }())
                                        : "");
    }
  }
  return {good == 9, fmt::format("{}/9 monotone with >=3 strict improvements ({:.1f} s;{})", good,
                                 seconds_since(t0), detail)};
}

// 6b. Lookup-table universe: the loop's best equals the brute-force optimum.
// The table holds the CV-selected pKa ridge model tabulated over every amine
// with at most seven C/N heavy atoms.
Outcome lookup_optimum() {
  const auto t0 = Clock::now();
  MutationConfig ga;
  ga.max_heavy_atoms = 7;
  ga.alphabet = {Element::C, Element::N};
  ga.weights = {1, 1, 0, 1, 1, 1};
  const auto closure = enumerate_closure({parse_smiles("C"), parse_smiles("N")}, ga);
  const auto model = make_predictor(cv_ridge_spec(Property::kPka));
  PropertyDataset ds;
  ds.property = "pka";
  double best_value = -1e300;
  for (const auto &s : closure) {
    const Molecule m = parse_smiles(s);
    if (!is_amine(m)) continue;
    const double v = model->predict(m);
    best_value = std::max(best_value, v);
    ds.rows.push_back({s, v, {}});
  }
  const double optimum = scale(best_value, default_scalers().at(Property::kPka));

  const fs::path dir = scratch_dir("lookup");
  std::string corpus;
  for (const auto &s : read_smiles_file(kCorpus))
    if (parse_smiles(s).heavy_atom_count() <= 9) corpus += s + "\n";
  write_file(dir / "corpus.smi", corpus);

  PredictorSet preds;
  preds.predictors[Property::kPka] = std::make_shared<LookupTable>(ds);
  int found = 0;
  std::string per_seed;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    RunConfig c = desk_profile();
    c.objective = "spo:max_pka";
    c.corpus = (dir / "corpus.smi").string();
    c.seed = seed;
    c.ga = ga;
    Explorer ex(c, make_objective(c, preds));
    ex.run();
    const double best = ex.state().best();
    if (std::abs(best - optimum) <= 1e-12) ++found;
    per_seed += fmt::format(" {:.4f}", best);
  }
  fs::remove_all(dir);
  return {found >= 4,
          fmt::format("universe of {} amines, optimum {:.4f} found on {}/5 seeds (finals:{}), "
                      "{:.1f} s",
                      ds.size(), optimum, found, per_seed, seconds_since(t0))};
}

Outcome spo_criterion() {
  const Outcome a = spo_monotonicity();
  const Outcome b = lookup_optimum();
  return {a.pass && b.pass, a.detail + "; " + b.detail};
}

// 7. MPO mean and penalty.
class FnPredictor final : public Predictor {
public:
  explicit FnPredictor(std::function<double(const Molecule &)> fn) : fn_(std::move(fn)) {}
  PredictorKind kind() const override { return PredictorKind::kLookupTable; }
  double predict(const Molecule &mol, double) const override { return fn_(mol); }
  void save(std::ostream &) const override { throw std::logic_error("not serializable"); }

private:
  std::function<double(const Molecule &)> fn_;
};

Outcome mpo_composition() {
  PredictorSet preds;
  int k = 0;
  for (Property p : kMpoProperties) {
    const double offset = k++;
    preds.predictors[p] = std::make_shared<FnPredictor>([offset](const Molecule &mol) {
      return 3.0 * offset + 0.37 * static_cast<double>(mol.heavy_atom_count()) - 2.0 +
             0.11 * static_cast<double>(ecfp(mol).popcount() % 7);
    });
  }
  MutationConfig cfg;
  cfg.require_amine = true;
  std::mt19937_64 rng(20);
  const auto smiles = grow_library({parse_smiles("NCCO")}, 21, rng, cfg);
  const auto scalers = default_scalers();
  double worst = 0, worst_penalty = 0;
  std::size_t n = 0;
  for (std::size_t i = 1; i < smiles.size() && n < 20; ++i, ++n) {
    const Molecule mol = parse_smiles(smiles[i]);
    double sum = 0;
    for (Property p : kMpoProperties)
      sum += scale(preds.raw(p, mol, find_amine_sites(mol)), scalers.at(p));
    const double expected = sum / 8.0;
    const double got = mpo_score(mol, Restriction::kNone, preds).score;
    worst = std::max(worst, std::abs(got - expected));
    const Restriction wrong = matches_restriction(classify_amine(mol), Restriction::kPrimarySecondary)
                                  ? Restriction::kTertiaryCyclicPoly
                                  : Restriction::kPrimarySecondary;
    const double penalized = mpo_score(mol, wrong, preds).score;
    worst_penalty = std::max(worst_penalty, std::abs(penalized - 0.1 * got));
  }
  return {n == 20 && worst <= 1e-12 && worst_penalty <= 1e-12,
          fmt::format("{} molecules, max |score - mean| {:.1e}, max |penalized - 0.1 score| {:.1e}",
                      n, worst, worst_penalty)};
}

// 8. QSPR harness.
Outcome qspr_harness() {
  PropertyDataset ds;
  MutationConfig cfg;
  cfg.max_heavy_atoms = 60;
  cfg.weights = {4.0, 2.0, 0.3, 0.2, 0.5, 0.0};
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> size(2, 60);
  std::normal_distribution<double> noise(0.0, 0.01);
  std::set<std::string> seen;
  while (ds.rows.size() < 1000) {
    const Molecule m = grow_molecule(parse_smiles("N"), size(rng), rng, cfg);
    const std::string c = canonical_smiles(m);
    if (!seen.insert(c).second) continue;
    const double y = static_cast<double>(ecfp(m).popcount()) / kDefaultWidth + noise(rng);
    ds.rows.push_back({c, y, {}});
  }
  const auto report = cross_validate(ds, make_trainer("ridge", 100.0), 5, 0);
  const double r2 = report.mean().test.r2;
  const auto m3 = regression_metrics({1, 2, 3}, {1, 3, 3});
  const bool exact = m3.r2 == 0.5 && m3.mae == 1.0 / 3.0;
  return {r2 > 0.9 && exact,
          fmt::format("ridge(lambda=100) mean test R2 {:.4f} over 5 stratified folds; 3-point "
                      "R2 {} MAE {:.17g}",
                      r2, m3.r2, m3.mae)};
}

// 9. Corpus reduction.
Outcome corpus_reduction() {
  std::vector<Molecule> targets;
  std::set<std::string> target_smiles;
  for (const auto &t : default_tasks())
    for (const auto &s : t.targets) {
      targets.push_back(parse_smiles(s));
      target_smiles.insert(canonicalize(s));
    }
  std::vector<Molecule> mols;
  for (const auto &s : read_smiles_file(kCorpus)) mols.push_back(parse_smiles(s));
  for (const auto &t : targets) mols.push_back(t);

  auto kept_set = [&](const std::vector<Molecule> &in) {
    std::set<std::string> out;
    for (const auto &m : filter_corpus(in, 1e9, targets, 0.323)) out.insert(canonical_smiles(m));
    return out;
  };
  const auto base = kept_set(mols);
  bool no_target = true, below = true;
  std::vector<Fingerprint> tfps;
  for (const auto &t : targets) tfps.push_back(ecfp(t));
  for (const auto &s : base) {
    if (target_smiles.count(s)) no_target = false;
    const Fingerprint fp = ecfp(parse_smiles(s));
    for (const auto &t : tfps)
      if (tanimoto(fp, t) > 0.323) below = false;
  }
  bool invariant = true;
  std::mt19937_64 rng(9);
  for (int i = 0; i < 3; ++i) {
    std::shuffle(mols.begin(), mols.end(), rng);
    if (kept_set(mols) != base) invariant = false;
  }
  return {no_target && below && invariant && !base.empty(),
          fmt::format("kept {} of {}; targets excluded: {}; all below cutoff: {}; "
                      "shuffle-invariant: {}",
                      base.size(), mols.size(), no_target ? "yes" : "no", below ? "yes" : "no",
                      invariant ? "yes" : "no")};
}

// 10. Determinism of report files.
Outcome determinism() {
  const fs::path a = scratch_dir("det_a"), b = scratch_dir("det_b");
  RunConfig c = load_run_config(kData + "/configs/desk_mpo.cfg");
  c.iterations = 10;
  run_experiment(c, a.string());
  run_experiment(c, b.string());
  bool same = true;
  for (const char *f : {"stats.csv", "buffer.csv"})
    same = same && read_text(a / f) == read_text(b / f);
  fs::remove_all(a);
  fs::remove_all(b);
  return {same, fmt::format("two 10-iteration MPO runs: stats.csv and buffer.csv {}",
                            same ? "byte-identical" : "differ")};
}

}  // namespace

int main(int argc, char **argv) {
  // --expect-fail ID marks a criterion whose FAIL should not fail the process.
  std::set<std::string> expected;
  for (int i = 1; i + 1 < argc; i += 2)
    if (std::string(argv[i]) == "--expect-fail") expected.insert(argv[i + 1]);

  struct Criterion {
    const char *name;
    std::function<Outcome()> check;
  };
  const Criterion criteria[] = {
      {"C1 parser round trip and permutation invariance", parser_properties},
      {"C2 reference amine classification", classification},
      {"C3 scaler breakpoints", scaler_pins},
      {"C4 benchmark ceiling", benchmark_ceiling},
      {"C5 desk-scale rediscovery run", desk_rediscovery},
      {"C6 SPO monotonicity and lookup optimum", spo_criterion},
      {"C7 MPO composition", mpo_composition},
      {"C8 QSPR harness", qspr_harness},
      {"C9 corpus reduction", corpus_reduction},
      {"C10 determinism", determinism},
  };
  int failures = 0, expected_failures = 0;
  for (const auto &c : criteria) {
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception &e) {
      o = {false, fmt::format("exception: {}", e.what())};
    }
    const std::string id(c.name, std::string_view(c.name).find(' '));
    if (!o.pass) ++(expected.count(id) ? expected_failures : failures);
    std::cout << fmt::format("{} {}: {}", o.pass ? "PASS" : "FAIL", c.name, o.detail) << std::endl;
  }
  std::cout << fmt::format("{} unexpected failure(s), {} expected failure(s)", failures,
                           expected_failures)
            << std::endl;
  return failures == 0 ? 0 : 1;
}
