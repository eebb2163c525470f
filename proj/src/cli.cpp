#include "mtscore/cli.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "mtscore/ablation.hpp"
#include "mtscore/checkpoint.hpp"
#include "mtscore/config.hpp"
#include "mtscore/error.hpp"
#include "mtscore/human_scores.hpp"
#include "mtscore/metrics.hpp"
#include "mtscore/tsv.hpp"

namespace mtscore {

namespace {

// Raised for argument combinations CLI11 cannot express.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::size_t threads = 1;
  std::string log_level = "info";

  std::string config;
  std::string data;
  std::string out;
  std::string model;
  bool reference_only = false;
  bool no_shifts = false;
  double threshold = kDarrThreshold;
  std::string scores;
  std::string metric;
  std::string darr;
  std::string da;
  std::string top_n;
  std::string train;
  std::string test;
};

RunConfig load_config(const std::string& path) {
  if (path.empty()) return RunConfig();
  return RunConfig::load(path);
}

std::vector<RankQuadruple> darr_to_quads(std::span<const DarrPair> pairs) {
  std::vector<RankQuadruple> quads;
  quads.reserve(pairs.size());
  std::size_t skipped = 0;
  for (const auto& p : pairs) {
    if (p.quad.better == p.quad.worse) {
      ++skipped;
      continue;
    }
    quads.push_back(p.quad);
  }
  if (skipped > 0) {
    spdlog::warn("skipped {} pairs with identical hypotheses", skipped);
  }
  return quads;
}

void log_training(const TrainingLog& log) {
  for (std::size_t e = 0; e < log.epoch_loss.size(); ++e) {
    spdlog::info("epoch {} loss {:.6f}", e + 1, log.epoch_loss[e]);
  }
}

std::vector<std::size_t> parse_top_n(const std::string& text) {
  std::vector<std::size_t> out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t n = 0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), n);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size() || n < 2) {
      throw UsageError("--top-n expects a comma-separated list of integers >= 2");
    }
    out.push_back(n);
  }
  return out;
}

int cmd_train_estimator(const Options& o) {
  const RunConfig cfg = load_config(o.config);
  const auto tuples = io::parse_eval_tuples(io::read_table(o.data));
  if (tuples.empty()) throw DataError(o.data + ": no training rows");
  EstimatorModel model(cfg.estimator());
  spdlog::info("training estimator on {} tuples (seed {})", tuples.size(), cfg.seed());
  log_training(model.train(tuples));
  save_checkpoint(std::filesystem::path(o.out), model);
  return kExitOk;
}

int cmd_train_ranker(const Options& o) {
  const RunConfig cfg = load_config(o.config);
  const auto quads = darr_to_quads(io::parse_darr(io::read_table(o.data)));
  if (quads.empty()) throw DataError(o.data + ": no usable training pairs");
  RankerModel model(cfg.ranker());
  spdlog::info("training ranker on {} quadruples (seed {})", quads.size(), cfg.seed());
  log_training(model.train(quads));
  save_checkpoint(std::filesystem::path(o.out), model);
  return kExitOk;
}

int cmd_score(const Options& o) {
  LoadedModel loaded = load_checkpoint(std::filesystem::path(o.model));
  const io::Table input = io::read_table(o.data);
  const auto triples = io::parse_scoring_input(input);
  std::vector<double> scores;
  if (auto* est = std::get_if<std::unique_ptr<EstimatorModel>>(&loaded)) {
    if (o.reference_only) throw UsageError("--reference-only applies to ranker checkpoints");
    std::vector<EvalTuple> tuples;
    tuples.reserve(triples.size());
    for (const auto& t : triples) tuples.push_back({t.source, t.hypothesis, t.reference, 0.0});
    scores = (*est)->predict(tuples, o.threads);
  } else {
    auto& ranker = *std::get<std::unique_ptr<RankerModel>>(loaded);
    if (o.reference_only) {
      scores.resize(triples.size());
      for (std::size_t i = 0; i < triples.size(); ++i) {
        scores[i] = ranker.score_reference_only(triples[i]);
      }
    } else {
      scores = ranker.score(triples, o.threads);
    }
  }
  io::write_table(std::filesystem::path(o.out), io::append_metric_column(input, scores));
  spdlog::info("scored {} rows", scores.size());
  return kExitOk;
}

int cmd_hter(const Options& o) {
  const auto pe = io::parse_post_edits(io::read_table(o.data));
  const auto tuples = hter_dataset(pe, !o.no_shifts);
  io::write_table(std::filesystem::path(o.out), io::eval_tuples_table(tuples));
  spdlog::info("wrote {} HTER targets", tuples.size());
  return kExitOk;
}

int cmd_mqm(const Options& o) {
  const auto rows = io::parse_mqm(io::read_table(o.data));
  std::vector<EvalTuple> tuples;
  tuples.reserve(rows.size());
  std::size_t implicit = 0;
  for (const auto& r : rows) {
    if (!r.explicit_length) ++implicit;
    tuples.push_back(
        {r.source, r.hypothesis, r.reference, normalize_mqm(mqm_score(r.annotation))});
  }
  if (implicit > 0) {
    spdlog::info("{} rows use the hypothesis word count as sentence length", implicit);
  }
  io::write_table(std::filesystem::path(o.out), io::eval_tuples_table(tuples));
  return kExitOk;
}

int cmd_darr(const Options& o) {
  const auto segments = io::parse_da(io::read_table(o.data));
  const auto pairs = darr_convert(segments, o.threshold);
  io::write_table(std::filesystem::path(o.out), io::darr_table(pairs));
  spdlog::info("{} DA rows -> {} relative-ranking pairs", segments.size(), pairs.size());
  return kExitOk;
}

BatchScorer lookup_scorer(const io::ScoreLookup& lookup, const std::string& source) {
  using Key = std::tuple<std::string, std::string, std::string>;
  auto table = std::make_shared<std::map<Key, double>>();
  for (std::size_t i = 0; i < lookup.keys.size(); ++i) {
    const auto& k = lookup.keys[i];
    auto [it, inserted] =
        table->try_emplace(Key{k.source, k.hypothesis, k.reference}, lookup.scores[i]);
    if (!inserted && it->second != lookup.scores[i]) {
      throw DataError(source + ":" + std::to_string(i + 2) +
                      ": conflicting score for a repeated (src, hyp, ref)");
    }
  }
  return [table, source](std::span<const ScoringTriple> triples) {
    std::vector<double> out;
    out.reserve(triples.size());
    for (const auto& t : triples) {
      auto it = table->find(Key{t.source, t.hypothesis, t.reference});
      if (it == table->end()) {
        throw DataError(source + ": no score for hypothesis '" + t.hypothesis + "'");
      }
      out.push_back(it->second);
    }
    return out;
  };
}

int cmd_evaluate(const Options& o) {
  if (o.scores.empty() == o.metric.empty()) {
    throw UsageError("evaluate needs exactly one of --scores or --metric");
  }
  const auto pairs = io::parse_darr(io::read_table(o.darr));
  if (pairs.empty()) throw DataError(o.darr + ": no pairs to evaluate");
  const auto topn = parse_top_n(o.top_n);

  BatchScorer scorer;
  if (!o.scores.empty()) {
    scorer = lookup_scorer(io::parse_scores(io::read_table(o.scores)), o.scores);
  } else if (o.metric == "bleu") {
    scorer = bleu_scorer();
  } else {
    scorer = chrf_scorer();
  }

  SystemRanking ranking;
  if (!topn.empty()) {
    if (!o.da.empty()) {
      ranking = rank_systems_by_mean_da(io::parse_da(io::read_table(o.da)));
    } else {
      spdlog::info("no --da given; ranking systems by net relative-ranking wins");
      ranking = rank_systems_by_wins(pairs);
    }
  }
  const EvalReport report =
      evaluate_metric(scorer, pairs, topn.empty() ? nullptr : &ranking, topn);
  io::write_table(std::filesystem::path(o.out), io::report_table(report));
  for (const auto& r : report.rows) {
    spdlog::info("{} {} tau {:.4f} (C={}, D={})", r.lang_pair, r.subset, r.tau, r.concordant,
                 r.discordant);
  }
  return kExitOk;
}

int cmd_ablate(const Options& o) {
  const RunConfig cfg = load_config(o.config);
  const auto train = darr_to_quads(io::parse_darr(io::read_table(o.train)));
  if (train.empty()) throw DataError(o.train + ": no usable training pairs");
  const auto test = io::parse_darr(io::read_table(o.test));
  if (test.empty()) throw DataError(o.test + ": no test pairs");
  SourceAblationOptions opts;
  opts.threads = o.threads;
  const auto result = run_source_ablation(train, test, cfg.ranker(), opts);
  io::write_table(std::filesystem::path(o.out), io::ablation_table(result.rows));
  for (const auto& r : result.rows) {
    spdlog::info("{} ref-only {:.4f} src+ref {:.4f} delta {:+.4f}", r.lang_pair,
                 r.reference_only.tau, r.full.tau, r.delta_tau);
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  Options o;
  CLI::App app{"Learned MT evaluation: train, score, and evaluate.", "mtscore"};
  app.require_subcommand(1);
  app.add_option("--threads", o.threads, "Scoring threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--log-level", o.log_level, "trace|debug|info|warn|error|off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "critical", "off"}))
      ->capture_default_str();

  auto* te = app.add_subcommand("train-estimator", "Train the regression model");
  te->add_option("--config", o.config, "key = value settings");
  te->add_option("--data", o.data, "Eval tuples (src hyp ref score)")->required();
  te->add_option("--out", o.out, "Checkpoint path")->required();

  auto* tr = app.add_subcommand("train-ranker", "Train the translation ranking model");
  tr->add_option("--config", o.config, "key = value settings");
  tr->add_option("--data", o.data, "Relative-ranking pairs")->required();
  tr->add_option("--out", o.out, "Checkpoint path")->required();

  auto* sc = app.add_subcommand("score", "Score hypotheses with a trained model");
  sc->add_option("--model", o.model, "Checkpoint")->required();
  sc->add_option("--data", o.data, "src hyp ref [score]")->required();
  sc->add_option("--out", o.out, "Input rows plus a metric column")->required();
  sc->add_flag("--reference-only", o.reference_only, "Ranker: distance to reference only");

  auto* ht = app.add_subcommand("hter", "HTER targets from post-edits");
  ht->add_option("--data", o.data, "src hyp ref pe")->required();
  ht->add_option("--out", o.out, "Eval tuples")->required();
  ht->add_flag("--no-shifts", o.no_shifts, "Plain word edit distance");

  auto* mq = app.add_subcommand("mqm-score", "Normalized MQM targets from error counts");
  mq->add_option("--data", o.data, "src hyp ref minor major critical [length]")->required();
  mq->add_option("--out", o.out, "Eval tuples")->required();

  auto* dc = app.add_subcommand("darr-convert", "Direct assessments to relative ranking pairs");
  dc->add_option("--data", o.data, "DA table")->required();
  dc->add_option("--threshold", o.threshold, "Minimum score gap (strict)")->capture_default_str();
  dc->add_option("--out", o.out, "Relative-ranking pairs")->required();

  auto* ev = app.add_subcommand("evaluate", "Kendall tau-like agreement with human rankings");
  ev->add_option("--scores", o.scores, "Scored rows with a metric column");
  ev->add_option("--metric", o.metric, "Built-in baseline instead of --scores")
      ->check(CLI::IsMember({"bleu", "chrf"}));
  ev->add_option("--darr", o.darr, "Relative-ranking pairs")->required();
  ev->add_option("--top-n", o.top_n, "Comma-separated system counts, e.g. 10,8,6,4");
  ev->add_option("--da", o.da, "DA table for ranking systems (top-N)");
  ev->add_option("--out", o.out, "Report")->required();

  auto* ab = app.add_subcommand("ablate-source", "Reference-only vs source+reference rankers");
  ab->add_option("--config", o.config, "key = value settings");
  ab->add_option("--train", o.train, "Training pairs")->required();
  ab->add_option("--test", o.test, "Test pairs")->required();
  ab->add_option("--out", o.out, "Ablation report")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  auto logger = spdlog::get("mtscore");
  if (!logger) logger = spdlog::stderr_color_mt("mtscore");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::from_str(o.log_level));

  try {
    if (te->parsed()) return cmd_train_estimator(o);
    if (tr->parsed()) return cmd_train_ranker(o);
    if (sc->parsed()) return cmd_score(o);
    if (ht->parsed()) return cmd_hter(o);
    if (mq->parsed()) return cmd_mqm(o);
    if (dc->parsed()) return cmd_darr(o);
    if (ev->parsed()) return cmd_evaluate(o);
    if (ab->parsed()) return cmd_ablate(o);
  } catch (const UsageError& e) {
    spdlog::error("{}", e.what());
    return kExitUsage;
  } catch (const DataError& e) {
    spdlog::error("{}", e.what());
    return kExitDataError;
  } catch (const ContractError& e) {
    // Contract violations reached through valid-looking input are data problems.
    spdlog::error("{}", e.what());
    return kExitDataError;
  }
  return kExitUsage;
}

}  // namespace mtscore
