#include <algorithm>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "evtab/corpus.hpp"
#include "evtab/errors.hpp"
#include "evtab/eval.hpp"
#include "evtab/evidence.hpp"
#include "evtab/ingest.hpp"
#include "evtab/pipeline.hpp"
#include "evtab/synthetic.hpp"

namespace {

using namespace evtab;

struct Globals {
  std::string log_level = "info";
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  std::string include_ids;
  std::string abbreviations;
};

struct TrainFlags {
  double l2 = 1.0;
  int max_iterations = 500;
  double tolerance = 1e-6;
  std::uint64_t seed = 0;

  TrainConfig config() const {
    TrainConfig c;
    c.l2 = l2;
    c.max_iterations = max_iterations;
    c.tolerance = tolerance;
    c.seed = seed;
    return c;
  }
};

struct InferenceFlags {
  double delta_a = kDefaultDelta;
  double delta_r = kDefaultDelta;
  bool strict_same_sentence = false;
  bool no_fallback = false;

  InferenceOptions options() const {
    InferenceOptions o;
    o.delta_a = delta_a;
    o.delta_r = delta_r;
    o.strict_same_sentence = strict_same_sentence;
    o.fallback_to_vanilla = !no_fallback;
    return o;
  }
};

void add_train_flags(CLI::App* cmd, TrainFlags& f) {
  cmd->add_option("--l2", f.l2, "L2 penalty on weights and biases")->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--max-iterations", f.max_iterations, "Optimizer iteration cap")
      ->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--tolerance", f.tolerance, "Stop when the gradient norm falls below this")
      ->capture_default_str();
  cmd->add_option("--train-seed", f.seed, "Seed recorded with the model")->capture_default_str();
}

void add_inference_flags(CLI::App* cmd, InferenceFlags& f) {
  cmd->add_option("--delta-a", f.delta_a, "Arm distance penalty")->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--delta-r", f.delta_r, "Result distance penalty")->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  cmd->add_flag("--strict-same-sentence", f.strict_same_sentence,
                "Require both results in the outcome's sentence");
  cmd->add_flag("--no-fallback", f.no_fallback,
                "Do not retry infeasible full-mode problems in vanilla mode");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::set<std::string> read_id_list(const std::string& path) {
  std::set<std::string> ids;
  std::istringstream in(read_file(path));
  for (std::string line; std::getline(in, line);) {
    line = trim_copy(line);
    if (!line.empty() && line[0] != '#') ids.insert(line);
  }
  return ids;
}

Resources make_resources(const Globals& g) {
  Resources r;
  if (!g.abbreviations.empty()) {
    for (auto& [k, v] : parse_abbreviations(read_file(g.abbreviations))) r.abbreviations[k] = v;
    spdlog::info("abbreviation dictionary extended from {}", g.abbreviations);
  }
  return r;
}

template <typename T, typename IdOf>
void apply_allowlist(const Globals& g, std::vector<T>& items, IdOf id_of) {
  if (g.include_ids.empty()) return;
  const auto allowed = read_id_list(g.include_ids);
  const std::size_t before = items.size();
  std::erase_if(items, [&](const T& x) { return !allowed.contains(id_of(x)); });
  spdlog::info("allowlist kept {} of {} records", items.size(), before);
}

std::vector<Abstract> load(const Globals& g, const std::string& path, bool prepare) {
  auto corpus = load_corpus(path);
  apply_allowlist(g, corpus, [](const Abstract& a) { return a.id; });
  spdlog::info("loaded {} abstracts from {}", corpus.size(), path);
  if (prepare) {
    const Resources resources = make_resources(g);
    for (Abstract& a : corpus) {
      preprocess(a, resources);
      for (const auto& w : audit_filtered_gold(a)) spdlog::warn("{}", w);
    }
  }
  return corpus;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("evtab"));
  spdlog::set_pattern("[%l] %v");

  CLI::App app{"Evidence-table extraction from clinical trial abstracts"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML configuration file; command-line flags take precedence");
  Globals g;
  app.add_option("--log-level", g.log_level, "trace, debug, info, warn, error or off")
      ->capture_default_str()
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "critical", "off"}));
  app.add_option("--workers", g.workers, "Worker threads for prediction")->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--include-ids", g.include_ids,
                 "File of record ids, one per line; other records are dropped")
      ->check(CLI::ExistingFile);
  app.add_option("--abbreviations", g.abbreviations,
                 "TSV of extra abbreviation expansions, merged over the built-in dictionary")
      ->check(CLI::ExistingFile);

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Retrieve abstracts for a search strategy");
  std::string strategy = "glaucoma", ingest_out, fixture_dir, endpoint;
  FetchConfig fetch_config;
  std::size_t limit = 0;
  long delay_ms = 340;
  ingest->add_option("--strategy", strategy, "glaucoma, drugs or surgical")->capture_default_str()
      ->check(CLI::IsMember({"glaucoma", "drugs", "prescription-drugs", "surgical",
                             "surgical-interventions"}));
  std::string custom_query;
  ingest->add_option("--query", custom_query, "Search this query instead of the strategy's");
  ingest->add_option("-o,--out", ingest_out, "Output corpus file");
  ingest->add_option("--fixtures", fixture_dir, "Replay recorded responses from this directory")
      ->check(CLI::ExistingDirectory);
  ingest->add_option("--endpoint", endpoint,
                     "API base URL (default: $EVTAB_EUTILS_URL or the public endpoint)");
  ingest->add_option("--page-size", fetch_config.page_size, "Ids per request")
      ->capture_default_str()->check(CLI::PositiveNumber);
  ingest->add_option("--delay-ms", delay_ms, "Pause between requests")->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  ingest->add_option("--retries", fetch_config.rate_limit_retries,
                     "Retries after a rate-limit response")->capture_default_str();
  ingest->add_option("--limit", limit, "Stop after this many records (0: no limit)")
      ->capture_default_str();
  bool print_query = false;
  ingest->add_flag("--print-query", print_query, "Print the query and exit");

  // preprocess
  auto* prep = app.add_subcommand("preprocess", "Normalize, tag and chunk a corpus");
  std::string prep_in, prep_out;
  prep->add_option("-i,--in", prep_in, "Input corpus")->required()->check(CLI::ExistingFile);
  prep->add_option("-o,--out", prep_out, "Output corpus")->required();

  // train
  auto* train_cmd = app.add_subcommand("train", "Fit the token classifier");
  std::string train_corpus, model_out;
  TrainFlags train_flags;
  train_cmd->add_option("-c,--corpus", train_corpus, "Annotated corpus")->required()
      ->check(CLI::ExistingFile);
  train_cmd->add_option("-m,--model", model_out, "Output model file")->required();
  add_train_flags(train_cmd, train_flags);

  // predict
  auto* predict_cmd = app.add_subcommand("predict", "Decode abstracts into an evidence table");
  std::string model_in, predict_corpus_path, table_out, mode_name = "full", format_name = "tsv";
  InferenceFlags predict_flags;
  predict_cmd->add_option("-m,--model", model_in, "Model file")->required()
      ->check(CLI::ExistingFile);
  predict_cmd->add_option("-c,--corpus", predict_corpus_path, "Corpus to label")->required()
      ->check(CLI::ExistingFile);
  predict_cmd->add_option("--mode", mode_name, "zero, vanilla or full")->capture_default_str()
      ->check(CLI::IsMember({"zero", "vanilla", "full"}));
  predict_cmd->add_option("--format", format_name, "tsv or csv")->capture_default_str()
      ->check(CLI::IsMember({"tsv", "csv"}));
  predict_cmd->add_option("-o,--out", table_out, "Output table (default: stdout)");
  add_inference_flags(predict_cmd, predict_flags);

  // evaluate
  auto* eval_cmd = app.add_subcommand("evaluate", "Cross-validated or held-out evaluation");
  std::string eval_corpus, test_corpus, protocol = "cv", json_out;
  std::size_t k = 10;
  std::uint64_t eval_seed = 1;
  EvalConfig eval_config;
  TrainFlags eval_train;
  InferenceFlags eval_inference;
  eval_cmd->add_option("-c,--corpus", eval_corpus, "Annotated corpus")->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--protocol", protocol, "cv or holdout")->capture_default_str()
      ->check(CLI::IsMember({"cv", "holdout"}));
  eval_cmd->add_option("-k,--folds", k, "Folds (cv), or 1/k of the corpus held out")
      ->capture_default_str()->check(CLI::Range(2, 1000));
  eval_cmd->add_option("--seed", eval_seed, "Fold assignment seed")->capture_default_str();
  eval_cmd->add_option("--test-corpus", test_corpus, "Held-out corpus (holdout protocol)")
      ->check(CLI::ExistingFile);
  eval_cmd->add_flag("--fold-average", eval_config.fold_average,
                     "Average per-fold metrics instead of pooling counts");
  eval_cmd->add_option("--ci-level", eval_config.ci_level, "Bootstrap interval level")
      ->capture_default_str()->check(CLI::Range(0.5, 0.999));
  eval_cmd->add_option("--resamples", eval_config.resamples, "Bootstrap resamples")
      ->capture_default_str()->check(CLI::Range(1000, 1000000));
  eval_cmd->add_option("--bootstrap-seed", eval_config.bootstrap_seed, "Bootstrap seed")
      ->capture_default_str();
  eval_cmd->add_option("--json", json_out, "Also write the full report as JSON");
  add_train_flags(eval_cmd, eval_train);
  add_inference_flags(eval_cmd, eval_inference);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate an annotated synthetic corpus");
  std::size_t synth_n = 100;
  std::uint64_t synth_seed = 1;
  std::string noise_name = "medium", synth_out;
  synth->add_option("-n,--count", synth_n, "Number of abstracts")->capture_default_str()
      ->check(CLI::PositiveNumber);
  synth->add_option("--seed", synth_seed, "Generator seed")->capture_default_str();
  synth->add_option("--noise", noise_name, "zero, low, medium or high")->capture_default_str()
      ->check(CLI::IsMember({"zero", "low", "medium", "high"}));
  synth->add_option("-o,--out", synth_out, "Output corpus")->required();

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::from_str(g.log_level));

  try {
    if (*ingest) {
      const SearchStrategy s = *strategy_from_string(strategy);
      const std::string query = custom_query.empty() ? build_query(s) : custom_query;
      if (print_query) {
        std::cout << query << '\n';
        return 0;
      }
      if (ingest_out.empty()) throw Error("ingest: --out is required");
      fetch_config.politeness_delay = std::chrono::milliseconds(delay_ms);
      if (limit > 0) fetch_config.limit = limit;
      std::unique_ptr<Transport> transport;
      if (!fixture_dir.empty()) {
        transport = std::make_unique<FixtureTransport>(fixture_dir);
        fetch_config.politeness_delay = std::chrono::milliseconds(0);
      } else {
        HttpConfig http = http_config_from_env();
        if (!endpoint.empty()) http.base_url = endpoint;
        transport = std::make_unique<HttpTransport>(http);
      }
      spdlog::info("strategy {}: {}", to_string(s), query);
      auto records = fetch(query, *transport, fetch_config);
      spdlog::info("retrieved {} records", records.size());
      apply_allowlist(g, records, [](const RawRecord& r) { return r.id; });
      std::vector<Abstract> corpus;
      for (const RawRecord& r : records) {
        try {
          corpus.push_back(to_abstract(r));
        } catch (const EmptyBody& e) {
          spdlog::warn("skipping: {}", e.what());
        }
      }
      save_corpus(ingest_out, corpus);
      spdlog::info("wrote {} abstracts to {}", corpus.size(), ingest_out);
    } else if (*prep) {
      const auto corpus = load(g, prep_in, true);
      save_corpus(prep_out, corpus);
      spdlog::info("wrote {} preprocessed abstracts to {}", corpus.size(), prep_out);
    } else if (*train_cmd) {
      const auto corpus = load(g, train_corpus, true);
      FitTrace trace;
      const MaxEntModel model = train(corpus, train_flags.config(), &trace);
      spdlog::info("trained on {} abstracts: {} features, {} iterations, |g| = {:.3g}{}",
                   corpus.size(), model.dim(), trace.iterations, trace.gradient_norm,
                   trace.converged ? "" : " (not converged)");
      save_model(model_out, model);
    } else if (*predict_cmd) {
      const MaxEntModel model = load_model(model_in);
      const auto corpus = load(g, predict_corpus_path, true);
      const Mode mode = *mode_from_string(mode_name);
      if (mode == Mode::Zero) {
        throw ModeUnsupported("zero mode has no unique heads to put in an evidence table");
      }
      const auto predictions =
          predict_corpus(model, corpus, mode, predict_flags.options(), g.workers);
      std::vector<EvidenceRow> rows;
      for (std::size_t i = 0; i < corpus.size(); ++i) {
        if (!predictions[i].warning.empty()) spdlog::warn("{}", predictions[i].warning);
        rows.push_back(emit_evidence_table(corpus[i], predictions[i].solution));
      }
      write_text(table_out, format_evidence_table(
                                rows, format_name == "csv" ? TableFormat::Csv : TableFormat::Tsv));
    } else if (*eval_cmd) {
      eval_config.train = eval_train.config();
      eval_config.inference = eval_inference.options();
      eval_config.workers = g.workers;
      auto corpus = load(g, eval_corpus, true);
      EvalReport report;
      if (protocol == "cv") {
        report = kfold(corpus, k, eval_seed, eval_config);
      } else {
        std::vector<Abstract> train_set, test_set;
        if (!test_corpus.empty()) {
          train_set = std::move(corpus);
          test_set = load(g, test_corpus, true);
        } else {
          const auto folds = fold_assignment(corpus.size(), k, eval_seed);
          for (std::size_t i = 0; i < corpus.size(); ++i) {
            (folds[i] == 0 ? test_set : train_set).push_back(std::move(corpus[i]));
          }
        }
        report = holdout(train_set, test_set, eval_config);
      }
      for (const auto& w : report.warnings) spdlog::warn("{}", w);
      std::cout << render_table(report);
      if (!json_out.empty()) write_text(json_out, report_json(report));
    } else if (*synth) {
      const auto corpus =
          generate_synthetic(synth_n, synth_seed, NoiseConfig::preset(*noise_from_string(noise_name)));
      save_corpus(synth_out, corpus);
      spdlog::info("wrote {} synthetic abstracts to {}", corpus.size(), synth_out);
    }
  } catch (const RateLimited& e) {
    spdlog::error("{} (retry after {} s)", e.what(), e.retry_after());
    return 1;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
