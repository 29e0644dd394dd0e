// weaktsa: command-line driver for the weak-label self-training pipeline.
//
// Every subcommand writes its resolved options next to its output
// (run_config.json inside output directories, <file>.config.json beside
// output files).  Passing that file back with --config re-runs the command
// with the same settings; flags given on the command line win.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "weaktsa/baseline.h"
#include "weaktsa/corpus.h"
#include "weaktsa/dataset.h"
#include "weaktsa/eval.h"
#include "weaktsa/external.h"
#include "weaktsa/lexicon.h"
#include "weaktsa/log.h"
#include "weaktsa/loop.h"
#include "weaktsa/random.h"
#include "weaktsa/synthkit.h"
#include "weaktsa/weaklabel.h"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace weaktsa;

namespace {

// Exit codes: CLI11 uses its own (>= 100) for usage errors.
constexpr int kFailure = 1;
constexpr int kMismatch = 2;

struct TaggerOptions {
  std::string tagger = "baseline";
  std::string endpoint;
  std::string lexicon;
  double threshold = 0.7;
};

struct Options {
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  TaggerOptions tagger;
  TrainConfig train;
  SelectionConfig selection;

  // ingest
  std::string reviews, business, domains, out;
  std::size_t max_sentences = 0;
  // synth
  std::string spec;
  // train / predict / select / loop
  std::string labeled, pool, model, input, predictions;
  std::size_t iterations = 3;
  bool dev_labeled_only = false;
  // evaluate / sample-errors / report
  std::string pred, gold, seeds_dir, dataset = "test", thresholds = "0:1:0.05", domain_filter;
  std::size_t n = 30;
  std::vector<std::string> eval_dirs, labels;
  std::string loop_dir;
};

void add_seed(CLI::App* cmd, Options& o) {
  cmd->add_option("--seed", o.seed, "root random seed")->capture_default_str();
}

void add_tagger(CLI::App* cmd, Options& o) {
  cmd->add_option("--tagger", o.tagger.tagger, "baseline or external")
      ->check(CLI::IsMember({"baseline", "external"}))
      ->capture_default_str();
  cmd->add_option("--endpoint", o.tagger.endpoint,
                  "external tagger: shell command or tcp://host:port");
  cmd->add_option("--lexicon", o.tagger.lexicon, "sentiment lexicon TSV (baseline features)");
  cmd->add_option("--lexicon-threshold", o.tagger.threshold, "keep words with |score| above this")
      ->capture_default_str();
}

void add_train(CLI::App* cmd, TrainConfig& t) {
  cmd->add_option("--learning-rate", t.learning_rate, "external tagger learning rate")
      ->capture_default_str();
  cmd->add_option("--adam-epsilon", t.adam_epsilon)->capture_default_str();
  cmd->add_option("--batch-size", t.batch_size)->capture_default_str();
  cmd->add_option("--max-epochs", t.max_epochs)->capture_default_str();
  cmd->add_option("--min-delta", t.min_delta, "early stopping threshold on dev token F1")
      ->capture_default_str();
  cmd->add_option("--patience", t.patience)->capture_default_str();
  cmd->add_option("--dev-fraction", t.dev_fraction)->capture_default_str();
  cmd->add_option("--baseline-learning-rate", t.baseline_learning_rate)->capture_default_str();
  cmd->add_option("--l2", t.l2)->capture_default_str();
}

void add_selection(CLI::App* cmd, SelectionConfig& s) {
  cmd->add_option("--target-high", s.target_high)->capture_default_str();
  cmd->add_option("--target-low", s.target_low)->capture_default_str();
  cmd->add_option("--non-target-fraction", s.non_target_fraction)->capture_default_str();
  cmd->add_option("--per-domain-cap", s.per_domain_cap)->capture_default_str();
}

void add_workers(CLI::App* cmd, Options& o) {
  cmd->add_option("--workers", o.workers, "parallel prediction workers")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

// --- persisted configuration -----------------------------------------------

json resolved_options(const CLI::App& cmd) {
  json options = json::object();
  for (const CLI::Option* opt : cmd.get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || name == "help" || name == "config") continue;
    if (opt->get_expected_min() == 0) {
      if (opt->count() > 0) options[name] = true;
      continue;
    }
    std::vector<std::string> values = opt->results();
    if (values.empty()) {
      if (opt->get_default_str().empty()) continue;
      values.push_back(opt->get_default_str());
    }
    if (opt->get_expected_max() > 1)
      options[name] = values;
    else
      options[name] = values.back();
  }
  return options;
}

fs::path config_path_for(const fs::path& out, bool out_is_dir) {
  return out_is_dir ? out / "run_config.json" : fs::path(out.string() + ".config.json");
}

void persist_config(const CLI::App& cmd, const fs::path& out, bool out_is_dir, json extra = {}) {
  json j = {{"command", cmd.get_name()}, {"options", resolved_options(cmd)}};
  if (!extra.is_null()) j["resolved"] = std::move(extra);
  const fs::path path = config_path_for(out, out_is_dir);
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << j.dump(2) << '\n';
}

// Expands `--config FILE` into explicit flags placed before the remaining
// arguments, so anything on the command line overrides the file.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  auto it = std::find_if(args.begin(), args.end(), [](const std::string& a) {
    return a == "--config" || a.rfind("--config=", 0) == 0;
  });
  if (it == args.end()) return args;
  std::string file;
  if (*it == "--config") {
    if (std::next(it) == args.end()) throw CLI::ArgumentMismatch("--config needs a file");
    file = *std::next(it);
    args.erase(it, it + 2);
  } else {
    file = it->substr(std::string("--config=").size());
    args.erase(it);
  }
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open config " + file);
  json j = json::parse(in);
  std::vector<std::string> injected;
  const std::string command = j.at("command").get<std::string>();
  for (const auto& [name, value] : j.at("options").items()) {
    if (value.is_boolean()) {
      if (value.get<bool>()) injected.push_back("--" + name);
    } else if (value.is_array()) {
      for (const auto& v : value) injected.push_back("--" + name + "=" + v.get<std::string>());
    } else {
      injected.push_back("--" + name + "=" + value.get<std::string>());
    }
  }
  // args[0] is the program name; the subcommand follows.
  auto cmd = std::find(args.begin(), args.end(), command);
  if (cmd == args.end()) {
    args.insert(args.begin() + 1, command);
    cmd = args.begin() + 1;
  }
  args.insert(cmd + 1, injected.begin(), injected.end());
  return args;
}

// --- helpers ---------------------------------------------------------------

std::shared_ptr<const SentimentLexicon> maybe_lexicon(const TaggerOptions& t) {
  if (t.lexicon.empty()) return nullptr;
  return std::make_shared<SentimentLexicon>(SentimentLexicon::load(t.lexicon, t.threshold));
}

std::unique_ptr<TaggerBackend> make_backend(const TaggerOptions& t) {
  if (t.tagger == "external") {
    if (t.endpoint.empty()) throw std::invalid_argument("--tagger external needs --endpoint");
    return std::make_unique<ExternalBackend>(t.endpoint);
  }
  return std::make_unique<BaselineBackend>(maybe_lexicon(t));
}

std::vector<LabeledSentence> as_labeled(std::span<const Sentence> sentences,
                                        std::vector<std::vector<TargetSpan>> spans) {
  std::vector<LabeledSentence> out;
  out.reserve(sentences.size());
  for (std::size_t i = 0; i < sentences.size(); ++i)
    out.push_back({sentences[i], std::move(spans[i]), Provenance::kLabeled});
  return out;
}

std::vector<double> parse_thresholds(const std::string& text) {
  // "lo:hi:step" or a comma-separated list.
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    double lo, hi, step;
    if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 || !(step > 0) || hi < lo)
      throw std::invalid_argument("bad --thresholds " + text);
    const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
    for (std::size_t i = 0; i <= count; ++i) out.push_back(lo + static_cast<double>(i) * step);
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

std::vector<LabeledSentence> filter_domains(std::vector<LabeledSentence> items,
                                            const std::set<std::string>& keep) {
  if (keep.empty()) return items;
  std::erase_if(items, [&](const LabeledSentence& l) { return !keep.count(l.sentence.domain); });
  return items;
}

std::set<std::string> split_list(const std::string& text) {
  std::set<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!trim(item).empty()) out.insert(std::string(trim(item)));
  return out;
}

std::vector<fs::path> seed_files(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".jsonl") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw std::runtime_error("no .jsonl prediction files in " + dir.string());
  return files;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << text;
}

// --- subcommands -----------------------------------------------------------

int cmd_ingest(const CLI::App& cmd, const Options& o) {
  IngestConfig cfg;
  cfg.reviews = o.reviews;
  if (!o.business.empty()) cfg.business = fs::path(o.business);
  cfg.domains = o.domains.empty() ? yelp_domains() : load_domain_list(o.domains);
  cfg.max_sentences = o.max_sentences;
  cfg.seed = derive_seed(o.seed, "ingest");
  auto lexicon = SentimentLexicon::load(o.tagger.lexicon, o.tagger.threshold);
  IngestStats stats;
  auto sentences = ingest(cfg, lexicon, &stats);
  write_sentence_pool(o.out, sentences);
  log::info("ingest: ", stats.load.loaded, " reviews read, ", stats.reviews_kept, " kept, ",
            stats.reviews_unassigned, " unassigned; ", stats.sentences_kept, " of ",
            stats.sentences_split, " sentences pass filters, ", stats.sentences_emitted,
            " written");
  json hist = json::object();
  for (const auto& [domain, count] : domain_histogram(sentences)) hist[domain] = count;
  persist_config(cmd, o.out, false, {{"domains", cfg.domains}, {"histogram", hist}});
  return 0;
}

int cmd_synth(const CLI::App& cmd, const Options& o) {
  SynthSpec spec = SynthSpec::default_spec();
  if (!o.spec.empty()) {
    std::ifstream in(o.spec);
    if (!in) throw std::runtime_error("cannot open spec " + o.spec);
    spec = SynthSpec::from_json(json::parse(in));
  }
  if (cmd.count("--seed")) spec.seed = o.seed;
  auto corpus = generate(spec);
  write_corpus(o.out, spec, corpus);
  log::info("synth: ", corpus.labeled.size(), " labeled, ", corpus.pool.size(), " pool, ",
            corpus.test.size(), " test sentences in ", o.out);
  persist_config(cmd, o.out, true);
  return 0;
}

LoopConfig loop_config(const Options& o) {
  LoopConfig cfg;
  cfg.iterations = o.iterations;
  cfg.selection = o.selection;
  cfg.train = o.train;
  cfg.seed = o.seed;
  cfg.artifact_dir = o.out;
  cfg.dev_from_labeled_only = o.dev_labeled_only;
  cfg.workers = o.workers;
  return cfg;
}

int cmd_train(const CLI::App& cmd, const Options& o) {
  auto labeled = read_labeled(o.labeled);
  LoopConfig cfg = loop_config(o);
  cfg.validate();
  auto backend = make_backend(o.tagger);
  fs::create_directories(o.out);
  IterationArtifact artifact;
  // Same seeds as iteration 0 of `loop`.
  auto model = train_iteration(labeled, nullptr, cfg, 0, *backend, &artifact);
  model->save(fs::path(o.out) / "model.json");
  write_text(fs::path(o.out) / "summary.json",
             json({{"train_size", artifact.train_size},
                   {"dev_size", artifact.dev_size},
                   {"dev_trace", artifact.dev_trace},
                   {"dev_token_f1", artifact.dev_token_f1}})
                     .dump(2) +
                 "\n");
  persist_config(cmd, o.out, true, cfg.to_json());
  return 0;
}

std::unique_ptr<TaggerModel> load_model(const Options& o, std::unique_ptr<TaggerBackend>& holder) {
  std::ifstream in(o.model);
  if (!in) throw std::runtime_error("cannot open model " + o.model);
  const std::string kind = json::parse(in).value("kind", "");
  if (kind == "external") {
    if (o.tagger.endpoint.empty())
      throw std::invalid_argument("external model " + o.model + " needs --endpoint");
    holder = std::make_unique<ExternalBackend>(o.tagger.endpoint);
  } else {
    holder = std::make_unique<BaselineBackend>();
  }
  return holder->load(o.model);
}

int cmd_predict(const CLI::App& cmd, const Options& o) {
  std::unique_ptr<TaggerBackend> backend;
  auto model = load_model(o, backend);
  auto sentences = read_sentence_pool(o.input);
  auto spans = predict_parallel(*model, sentences, o.workers);
  write_labeled(o.out, as_labeled(sentences, std::move(spans)), {.confidence = true});
  log::info("predict: ", sentences.size(), " sentences written to ", o.out);
  persist_config(cmd, o.out, false);
  return 0;
}

int cmd_select(const CLI::App& cmd, const Options& o) {
  auto predicted = read_labeled(o.predictions);
  std::vector<Prediction> predictions;
  predictions.reserve(predicted.size());
  for (auto& p : predicted) predictions.push_back({std::move(p.sentence), std::move(p.gold)});
  SelectionConfig cfg = o.selection;
  cfg.rng_seed = derive_seed(o.seed, "select");
  cfg.validate();
  SelectionStats stats;
  auto weak = build_weak_set(predictions, cfg, &stats);
  write_weak_set(o.out, weak);
  write_text(o.out + ".stats.json", stats.to_json().dump(2) + "\n");
  log::info("select: ", weak.target_part.size(), " target and ", weak.non_target_part.size(),
            " no-target sentences");
  persist_config(cmd, o.out, false, cfg.to_json());
  return 0;
}

int cmd_loop(const CLI::App& cmd, const Options& o) {
  auto labeled = read_labeled(o.labeled);
  auto pool = read_sentence_pool(o.pool);
  LoopConfig cfg = loop_config(o);
  cfg.validate();
  auto backend = make_backend(o.tagger);
  auto result = run_self_training(labeled, pool, cfg, *backend);
  if (result.resumed_iterations > 0)
    log::info("loop: reused ", result.resumed_iterations, " completed iterations");
  json iterations = json::array();
  for (const auto& a : result.artifacts)
    iterations.push_back({{"iteration", a.iteration},
                          {"model", a.model_path.lexically_relative(o.out).string()},
                          {"weak_target", a.weak_target},
                          {"weak_none", a.weak_none},
                          {"dev_token_f1", a.dev_token_f1}});
  json resolved = cfg.to_json();
  resolved["tagger"] = o.tagger.tagger;
  resolved["iterations_run"] = std::move(iterations);
  persist_config(cmd, o.out, true, std::move(resolved));
  return 0;
}

int report_alignment(const AlignmentError& e) {
  std::cerr << "error: " << e.what() << '\n';
  for (const auto& id : e.offenders()) std::cerr << "  " << id << '\n';
  return kMismatch;
}

int cmd_evaluate(const CLI::App& cmd, const Options& o) {
  const auto domains = split_list(o.domain_filter);
  auto gold = filter_domains(read_labeled(o.gold), domains);
  std::vector<fs::path> files;
  if (!o.pred.empty()) files.push_back(o.pred);
  if (!o.seeds_dir.empty())
    for (auto& f : seed_files(o.seeds_dir)) files.push_back(std::move(f));
  if (files.empty()) throw std::invalid_argument("evaluate needs --pred or --seeds");

  std::vector<std::vector<LabeledSentence>> runs;
  std::vector<RunResult> results;
  for (const auto& f : files) {
    runs.push_back(filter_domains(read_labeled(f), domains));
    try {
      results.push_back(evaluate_run(runs.back(), gold));
    } catch (const AlignmentError& e) {
      std::cerr << f.string() << ": ";
      return report_alignment(e);
    }
  }
  EvalReport report = aggregate_seeds(std::move(results), o.dataset);
  auto curve = pr_curve(runs, gold, parse_thresholds(o.thresholds));
  fs::create_directories(o.out);
  json j = report.to_json();
  j["prediction_files"] = json::array();
  for (const auto& f : files) j["prediction_files"].push_back(f.string());
  write_text(fs::path(o.out) / "report.json", j.dump(2) + "\n");
  write_text(fs::path(o.out) / "report.txt", report.table());
  write_text(fs::path(o.out) / "pr_curve.csv", curve.csv());
  std::cerr << report.table();
  persist_config(cmd, o.out, true);
  return 0;
}

int cmd_sample_errors(const CLI::App& cmd, const Options& o) {
  auto gold = read_labeled(o.gold);
  auto pred = read_labeled(o.pred);
  std::vector<ErrorRecord> errors;
  try {
    errors = sample_errors(pred, gold, o.n, o.seed);
  } catch (const AlignmentError& e) {
    return report_alignment(e);
  }
  write_error_sample(o.out, errors);
  log::info("sample-errors: ", errors.size(), " false positives written to ", o.out);
  persist_config(cmd, o.out, false);
  return 0;
}

std::string pct(const json& m) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f±%.1f", 100.0 * m.at("mean").get<double>(),
                100.0 * m.at("std").get<double>());
  return buf;
}

// Side-by-side comparison of evaluate outputs (one row per report, F1 per
// domain plus macro P/R/F1), optionally followed by a loop summary.
int cmd_report(const CLI::App& cmd, const Options& o) {
  std::vector<json> reports;
  std::vector<std::string> names;
  std::set<std::string> domain_set;
  for (std::size_t i = 0; i < o.eval_dirs.size(); ++i) {
    std::ifstream in(fs::path(o.eval_dirs[i]) / "report.json");
    if (!in) throw std::runtime_error("no report.json in " + o.eval_dirs[i]);
    reports.push_back(json::parse(in));
    names.push_back(i < o.labels.size() ? o.labels[i] : fs::path(o.eval_dirs[i]).filename().string());
    for (const auto& [d, _] : reports.back().at("per_domain").items()) domain_set.insert(d);
  }
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header = {"system"};
  for (const auto& d : domain_set) header.push_back(d);
  for (const char* h : {"macro P", "macro R", "macro F1"}) header.push_back(h);
  rows.push_back(header);
  for (std::size_t i = 0; i < reports.size(); ++i) {
    std::vector<std::string> row = {names[i]};
    const auto& per_domain = reports[i].at("per_domain");
    for (const auto& d : domain_set)
      row.push_back(per_domain.contains(d) ? pct(per_domain[d].at("f1")) : "-");
    const auto& macro = reports[i].at("macro");
    for (const char* m : {"precision", "recall", "f1"}) row.push_back(pct(macro.at(m)));
    rows.push_back(std::move(row));
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& row : rows)
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  std::ostringstream os;
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) os << "  ";
      os << row[c] << std::string(width[c] - row[c].size(), ' ');
    }
    os << '\n';
  }
  if (!o.loop_dir.empty()) {
    os << "\niteration  train  dev  weak-target  weak-none  dev-token-F1\n";
    for (std::size_t k = 0; k < completed_iterations(o.loop_dir); ++k) {
      std::ifstream in(fs::path(o.loop_dir) / ("iter_" + std::to_string(k)) / "summary.json");
      json s = json::parse(in);
      char buf[128];
      std::snprintf(buf, sizeof buf, "%9zu  %5zu  %3zu  %11zu  %9zu  %12.3f\n", k,
                    s.at("train_size").get<std::size_t>(), s.at("dev_size").get<std::size_t>(),
                    s.at("weak_target").get<std::size_t>(), s.at("weak_none").get<std::size_t>(),
                    s.at("dev_token_f1").get<double>());
      os << buf;
    }
  }
  write_text(o.out, os.str());
  persist_config(cmd, o.out, false);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weak-label self-training for multi-domain targeted sentiment analysis"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.add_flag("-q,--quiet", "only warnings and errors");

  Options o;
  using Handler = int (*)(const CLI::App&, const Options&);
  std::vector<std::pair<CLI::App*, Handler>> commands;
  auto sub = [&](const char* name, const char* help, Handler h) {
    CLI::App* cmd = app.add_subcommand(name, help);
    cmd->add_option("--config", "re-run with options from a persisted run config");
    commands.emplace_back(cmd, h);
    return cmd;
  };

  auto* ingest_cmd = sub("ingest", "filter, split and sample a review dump into a sentence pool",
                         cmd_ingest);
  ingest_cmd->add_option("--reviews", o.reviews, "JSON-lines reviews")->required()->check(CLI::ExistingFile);
  ingest_cmd->add_option("--business", o.business, "JSON-lines businesses (categories join)")
      ->check(CLI::ExistingFile);
  ingest_cmd->add_option("--lexicon", o.tagger.lexicon, "sentiment lexicon TSV")->required()->check(CLI::ExistingFile);
  ingest_cmd->add_option("--lexicon-threshold", o.tagger.threshold)->capture_default_str();
  ingest_cmd->add_option("--domains", o.domains, "ordered domain list, one per line")
      ->check(CLI::ExistingFile);
  ingest_cmd->add_option("--max-sentences", o.max_sentences, "sentence cap (0: no cap)")
      ->capture_default_str();
  add_seed(ingest_cmd, o);
  ingest_cmd->add_option("--out", o.out, "output sentence pool")->required();

  auto* synth_cmd = sub("synth", "generate a synthetic multi-domain corpus", cmd_synth);
  synth_cmd->add_option("--spec", o.spec, "generator spec (JSON); default spec if omitted")
      ->check(CLI::ExistingFile);
  add_seed(synth_cmd, o);
  synth_cmd->add_option("--out", o.out, "output directory")->required();

  auto* train_cmd = sub("train", "train a tagger on labeled data (loop iteration 0)", cmd_train);
  train_cmd->add_option("--labeled", o.labeled)->required()->check(CLI::ExistingFile);
  add_tagger(train_cmd, o);
  add_train(train_cmd, o.train);
  add_seed(train_cmd, o);
  train_cmd->add_option("--out", o.out, "output directory")->required();

  auto* predict_cmd = sub("predict", "tag sentences with a trained model", cmd_predict);
  predict_cmd->add_option("--model", o.model, "model.json from train or loop")->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("--input", o.input, "sentence pool or labeled file")->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("--endpoint", o.tagger.endpoint, "external tagger endpoint");
  add_workers(predict_cmd, o);
  predict_cmd->add_option("--out", o.out, "output predictions")->required();

  auto* select_cmd = sub("select", "pick weak-labeled sentences from predictions", cmd_select);
  select_cmd->add_option("--predictions", o.predictions)->required()->check(CLI::ExistingFile);
  add_selection(select_cmd, o.selection);
  add_seed(select_cmd, o);
  select_cmd->add_option("--out", o.out, "output weak set")->required();

  auto* loop_cmd = sub("loop", "run the self-training loop", cmd_loop);
  loop_cmd->add_option("--labeled", o.labeled)->required()->check(CLI::ExistingFile);
  loop_cmd->add_option("--pool", o.pool)->required()->check(CLI::ExistingFile);
  loop_cmd->add_option("--iterations", o.iterations)->capture_default_str();
  loop_cmd->add_flag("--dev-labeled-only", o.dev_labeled_only, "draw dev from labeled data only");
  add_tagger(loop_cmd, o);
  add_train(loop_cmd, o.train);
  add_selection(loop_cmd, o.selection);
  add_seed(loop_cmd, o);
  add_workers(loop_cmd, o);
  loop_cmd->add_option("--out", o.out, "artifact directory (resumes if present)")->required();

  auto* eval_cmd = sub("evaluate", "exact-match evaluation against gold", cmd_evaluate);
  eval_cmd->add_option("--pred", o.pred, "predictions of one run")->check(CLI::ExistingFile);
  eval_cmd->add_option("--seeds", o.seeds_dir, "directory of per-seed prediction files")
      ->check(CLI::ExistingDirectory);
  eval_cmd->add_option("--gold", o.gold)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--dataset", o.dataset, "name shown in the report")->capture_default_str();
  eval_cmd->add_option("--domains", o.domain_filter, "comma-separated domains to keep");
  eval_cmd->add_option("--thresholds", o.thresholds, "PR thresholds: lo:hi:step or a,b,c")
      ->capture_default_str();
  eval_cmd->add_option("--out", o.out, "output directory")->required();

  auto* errors_cmd = sub("sample-errors", "sample false positives for manual review",
                         cmd_sample_errors);
  errors_cmd->add_option("--pred", o.pred)->required()->check(CLI::ExistingFile);
  errors_cmd->add_option("--gold", o.gold)->required()->check(CLI::ExistingFile);
  errors_cmd->add_option("--n", o.n, "errors per domain")->capture_default_str();
  add_seed(errors_cmd, o);
  errors_cmd->add_option("--out", o.out)->required();

  auto* report_cmd = sub("report", "compare evaluation reports side by side", cmd_report);
  report_cmd->add_option("--eval", o.eval_dirs, "evaluate output directories")->required();
  report_cmd->add_option("--label", o.labels, "row label per --eval");
  report_cmd->add_option("--loop", o.loop_dir, "loop artifact directory to summarize");
  report_cmd->add_option("--out", o.out)->required();

  std::vector<std::string> args(argv, argv + argc);
  try {
    args = expand_config(std::move(args));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  std::vector<const char*> cargs;
  for (const auto& a : args) cargs.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(cargs.size()), const_cast<char**>(cargs.data()));
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (app.count("--quiet")) log::level() = log::Level::kWarning;

  for (const auto& [cmd, handler] : commands) {
    if (!cmd->parsed()) continue;
    try {
      return handler(*cmd, o);
    } catch (const AlignmentError& e) {
      return report_alignment(e);
    } catch (const std::exception& e) {
      std::cerr << "error: " << cmd->get_name() << ": " << e.what() << '\n';
      return kFailure;
    }
  }
  return kFailure;
}
