#include "tracelens/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "tracelens/dag.hpp"
#include "tracelens/enumeration.hpp"
#include "tracelens/error.hpp"
#include "tracelens/error_model.hpp"
#include "tracelens/events.hpp"
#include "tracelens/path_counting.hpp"
#include "tracelens/synth.hpp"

namespace tracelens::cli {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void usage(const std::string& message) {
  throw Error(ErrorCode::invalid_argument, message);
}

bool needs_input(const std::string& sub) {
  return sub != "stats" && sub != "synth";
}

bool needs_seed(const std::string& sub) {
  return sub == "sample" || sub == "mine" || sub == "top-k" || sub == "bench";
}

bool needs_length(const std::string& sub) {
  return sub == "count" || sub == "enumerate" || sub == "sample" || sub == "mine" ||
         sub == "top-k" || sub == "bench";
}

std::string resolved_format(const RunConfig& config) {
  if (config.input_format != "auto") return config.input_format;
  const std::string& path = config.input;
  if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0) return "csv";
  return "dag";
}

std::string sampler_name(SamplerKind kind) { return kind == SamplerKind::paper ? "paper" : "exact"; }
std::string mode_name(SecondPassMode mode) {
  return mode == SecondPassMode::fresh ? "fresh" : "regenerate";
}

std::string hex_key(TraceKey key) {
  std::ostringstream text;
  text << std::hex << std::setw(16) << std::setfill('0') << key.value;
  return text.str();
}

Plant parse_plant(const std::string& text) {
  const std::size_t x = text.rfind('x');
  if (x == std::string::npos || x == 0 || x + 1 == text.size()) {
    usage("plant '" + text + "' must look like <label-label-...>x<multiplicity>");
  }
  Plant plant;
  plant.labels = parse_trace(text.substr(0, x));
  try {
    plant.multiplicity = std::stoull(text.substr(x + 1));
  } catch (const std::exception&) {
    usage("bad multiplicity in plant '" + text + "'");
  }
  return plant;
}

LabeledDag load_dag(const RunConfig& config, std::ostream& err) {
  std::ifstream file;
  std::istream* in = &std::cin;
  if (config.input != "-") {
    file.open(config.input);
    if (!file) throw Error(ErrorCode::malformed_dag, "cannot open '" + config.input + "'");
    in = &file;
  }
  if (resolved_format(config) == "csv") {
    IngestResult ingested = ingest_events(*in, *config.delta);
    for (const LabelCollision& c : ingested.collisions) {
      err << "warning: overlap-label-collision for zones " << c.x << "," << c.y << " ("
          << c.reason << "); using " << c.assigned << " instead of " << c.natural << '\n';
    }
    return std::move(ingested.dag);
  }
  return read_dag(*in);
}

json trace_json(const FrequentTrace& t) {
  json item;
  item["trace"] = format_trace(t.labels);
  item["sample_count"] = t.sample_count;
  item["est_frequency"] = t.estimated_frequency;
  return item;
}

json mining_json(const RunConfig& config, const MiningReport& report) {
  json params;
  params["m"] = report.max_length;
  params["epsilon"] = report.epsilon;
  params["C"] = report.oversampling;
  params["seed"] = *config.seed;
  params["mode"] = mode_name(config.mode);
  params["sampler"] = sampler_name(config.sampler);
  json doc;
  doc["params"] = params;
  doc["vertices"] = report.vertex_count;
  doc["edges"] = report.edge_count;
  doc["total_traces"] = report.total_traces;
  doc["p"] = report.p;
  doc["k"] = report.capacity;
  doc["first_pass_samples"] = report.first_pass_samples;
  doc["second_pass_samples"] = report.second_pass_samples;
  doc["report_threshold"] = report.report_threshold;
  json candidates = json::array();
  for (const FrequentTrace& t : report.reported) candidates.push_back(trace_json(t));
  doc["candidates"] = candidates;
  return doc;
}

MineOptions mine_options(const RunConfig& config) {
  MineOptions options;
  options.mode = config.mode;
  options.sampler = config.sampler;
  options.threads = config.threads;
  return options;
}

int run_top_k(const RunConfig& config, const LabeledDag& dag, std::ostream& out) {
  const TopKReport result = top_k(dag, config.max_length, *config.top_k, *config.oversampling,
                                  *config.seed, mine_options(config));
  json doc = mining_json(config, result.last);
  doc["params"]["top_k"] = *config.top_k;
  doc["rounds"] = result.rounds;
  json traces = json::array();
  for (const FrequentTrace& t : result.traces) traces.push_back(trace_json(t));
  doc["top_k"] = traces;
  out << doc.dump(2) << '\n';
  return ok;
}

int run_stats(const RunConfig& config, std::ostream& out) {
  const auto rows = error_table(config.oversampling_list);
  if (config.format == "json") {
    json doc = json::array();
    for (const ErrorTableRow& row : rows) {
      json item;
      item["C"] = row.oversampling;
      item["false_negative"] = row.fn_prob;
      item["sig_false_positive"] = row.sfp_prob;
      item["sig_false_positive_inclusive"] = row.sfp_prob_inclusive;
      doc.push_back(item);
    }
    out << doc.dump(2) << '\n';
    return ok;
  }
  out << std::left << std::setw(8) << "C" << std::setw(14) << "false_neg" << std::setw(14)
      << "sig_false_pos" << "sig_false_pos(>=C/2)" << '\n';
  for (const ErrorTableRow& row : rows) {
    out << std::left << std::setw(8) << row.oversampling << std::setprecision(3)
        << std::setw(14) << row.fn_prob << std::setw(14) << row.sfp_prob
        << row.sfp_prob_inclusive << '\n';
  }
  return ok;
}

int run_synth(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const std::uint64_t seed = config.seed.value_or(0);
  if (config.kind == "skip") {
    write_dag(out, skip_graph(config.n, config.skips, config.label_period));
  } else if (config.kind == "random") {
    write_dag(out, random_dag(config.n, config.edge_prob, seed, config.alphabet));
  } else {
    PlantedSpec spec;
    for (const std::string& text : config.plants) spec.plants.push_back(parse_plant(text));
    spec.background_vertices = config.background;
    spec.alphabet_size = config.alphabet ? config.alphabet : 16;
    spec.zipf_exponent = config.zipf;
    spec.window = config.window;
    spec.edge_prob = config.edge_prob;
    spec.seed = seed;
    const PlantedDag planted = planted_dag(spec);
    for (std::size_t k = 0; k < spec.plants.size(); ++k) {
      err << "plant " << format_trace(spec.plants[k].labels) << ": multiplicity "
          << planted.multiplicities[k] << '\n';
    }
    write_dag(out, planted.dag);
  }
  return ok;
}

template <class Key>
void write_counts(std::ostream& out, const std::map<Key, std::uint64_t>& counts) {
  for (const auto& [key, count] : counts) {
    if constexpr (std::is_same_v<Key, TraceKey>) {
      out << hex_key(key) << '\t' << count << '\n';
    } else {
      out << format_trace(key) << '\t' << count << '\n';
    }
  }
}

int run_on_dag(const RunConfig& config, const LabeledDag& dag, std::ostream& out,
               std::ostream& err) {
  const std::string& sub = config.subcommand;
  if (sub == "ingest") {
    write_dag(out, dag);
    return ok;
  }
  const PathCounts counts = count_traces(dag, config.max_length);
  const std::uint64_t total = total_traces(counts);

  if (sub == "count") {
    json doc;
    doc["vertices"] = dag.vertex_count();
    doc["edges"] = dag.edge_count();
    doc["m"] = config.max_length;
    doc["total_traces"] = total;
    out << doc.dump(2) << '\n';
    return ok;
  }
  if (sub == "enumerate") {
    if (config.hashed) {
      const auto keyed = exact_key_frequencies(dag, config.max_length, TraceHasher{}, config.limit);
      write_counts(out, std::map<TraceKey, std::uint64_t>(keyed.begin(), keyed.end()));
    } else {
      write_counts(out, exact_frequencies(dag, config.max_length, config.limit));
    }
    return ok;
  }

  double epsilon = config.epsilon.value_or(0.0);
  if (config.relative) epsilon *= static_cast<double>(total);

  if (sub == "sample") {
    const double p = config.p ? *config.p : choose_p(epsilon, *config.oversampling, config.clamp);
    const SamplingPlan plan = prepare_plan(dag, counts, p);
    SampleOptions options{config.sampler, config.threads, TraceHasher{}};
    std::map<Trace, std::uint64_t> by_trace;
    std::map<TraceKey, std::uint64_t> by_key;
    const SampleStats stats = sample_traces(
        dag, counts, plan, *config.seed,
        [&](std::span<const Label> labels, TraceKey key) {
          if (config.hashed) {
            ++by_key[key];
          } else {
            ++by_trace[Trace(labels.begin(), labels.end())];
          }
        },
        options);
    if (config.hashed) {
      write_counts(out, by_key);
    } else {
      write_counts(out, by_trace);
    }
    err << "sampled " << stats.emitted << " traces with p = " << p << " (expected "
        << p * static_cast<double>(total) << ")\n";
    return ok;
  }
  if (sub == "mine" || sub == "top-k") {
    if (config.top_k) return run_top_k(config, dag, out);
    const MiningReport report =
        mine_frequent(dag, counts, epsilon, *config.oversampling, *config.seed,
                      mine_options(config));
    out << mining_json(config, report).dump(2) << '\n';
    return ok;
  }
  if (sub == "bench") {
    const BenchReport report = bench_compare(dag, config.max_length, epsilon,
                                             *config.oversampling, *config.seed,
                                             mine_options(config), config.limit);
    json doc;
    doc["total_traces"] = report.total_traces;
    doc["enumerated"] = report.enumerated;
    doc["enumeration_seconds"] = report.enumeration_seconds;
    doc["p"] = report.p;
    doc["expected_samples"] = report.expected_samples;
    doc["first_pass_samples"] = report.first_pass_samples;
    doc["second_pass_samples"] = report.second_pass_samples;
    doc["mining_seconds"] = report.mining_seconds;
    doc["ratio"] = report.ratio;
    doc["touched_ratio"] = report.touched_ratio;
    doc["reported"] = report.reported;
    out << doc.dump(2) << '\n';
    return ok;
  }
  usage("unknown subcommand '" + sub + "'");
}

int exit_code_for(ErrorCode code) { return is_usage_error(code) ? usage_error : data_error; }

}  // namespace

void validate(RunConfig& config) {
  const std::string& sub = config.subcommand;
  if (!config.seed) {
    if (const char* env = std::getenv("TRACELENS_SEED")) {
      try {
        config.seed = std::stoull(env);
      } catch (const std::exception&) {
        usage("TRACELENS_SEED must be an unsigned integer");
      }
    }
  }
  if (needs_input(sub) && config.input.empty()) usage(sub + " requires --input");
  if (config.input_format != "auto" && config.input_format != "dag" &&
      config.input_format != "csv") {
    usage("--input-format must be auto, dag or csv");
  }
  if (needs_input(sub) && resolved_format(config) == "csv") {
    if (!config.delta) usage("CSV input requires --delta");
  }
  if (sub == "ingest" && !config.delta) usage("ingest requires --delta");
  if (config.delta && !(*config.delta > 0.0)) {
    throw Error(ErrorCode::nonpositive_delta, "--delta must be positive");
  }
  if (needs_length(sub) && config.max_length < 1) usage(sub + " requires -m >= 1");
  if (needs_seed(sub) && !config.seed) {
    usage(sub + " requires --seed (or TRACELENS_SEED)");
  }
  if (config.threads < 1) usage("--threads must be at least 1");

  if (sub == "sample") {
    const bool has_p = config.p.has_value();
    const bool has_eps = config.epsilon.has_value() || config.oversampling.has_value();
    if (has_p == has_eps) usage("sample needs exactly one of --p or --epsilon with --C");
    if (has_p && !(*config.p > 0.0 && *config.p <= 1.0)) usage("--p must lie in (0, 1]");
    if (has_eps && !(config.epsilon && config.oversampling)) {
      usage("--epsilon and --C must be given together");
    }
  }
  if (sub == "mine" || sub == "bench") {
    if (config.p) usage(sub + " takes --epsilon and --C, not --p");
    if (!config.oversampling) usage(sub + " requires --C");
    if (!config.epsilon && !config.top_k) usage(sub + " requires --epsilon");
  }
  if (sub == "top-k") {
    if (!config.top_k) usage("top-k requires --k");
    if (!config.oversampling) usage("top-k requires --C");
  }
  if (config.top_k && *config.top_k < 1) usage("--k/--top-k must be at least 1");
  if (config.oversampling && !(*config.oversampling >= 1.0)) usage("--C must be at least 1");
  if (config.epsilon && !(*config.epsilon > 0.0)) usage("--epsilon must be positive");
  if (config.relative && config.epsilon && *config.epsilon > 1.0) {
    usage("--relative expects --epsilon as a fraction in (0, 1]");
  }
  if (sub == "stats") {
    if (config.format != "text" && config.format != "json") usage("--format must be text or json");
    if (config.oversampling_list.empty()) usage("stats needs at least one C value");
    for (double c : config.oversampling_list) {
      if (!(c >= 1.0)) usage("every C must be at least 1");
    }
  }
  if (sub == "synth") {
    if (config.kind != "skip" && config.kind != "random" && config.kind != "planted") {
      usage("--kind must be skip, random or planted");
    }
    if (config.kind == "planted" && config.plants.empty()) usage("planted synth needs --plant");
    if (config.kind == "random" && !(config.edge_prob >= 0.0 && config.edge_prob <= 1.0)) {
      usage("--edge-prob must lie in [0, 1]");
    }
  }
}

int run_command(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    std::ofstream file;
    if (!config.output.empty()) {
      file.open(config.output);
      if (!file) throw Error(ErrorCode::invalid_argument, "cannot write '" + config.output + "'");
    }
    std::ostream& sink = config.output.empty() ? out : file;
    if (config.subcommand == "stats") return run_stats(config, sink);
    if (config.subcommand == "synth") return run_synth(config, sink, err);
    const LabeledDag dag = load_dag(config, err);
    return run_on_dag(config, dag, sink, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig config;
  CLI::App app{"Frequent trace mining over labeled DAGs built from event logs", "tracelens"};
  app.require_subcommand(1);

  auto add_input = [&config](CLI::App* sub) {
    sub->add_option("-i,--input", config.input, "DAG text file or CSV event log ('-' for stdin)");
    sub->add_option("--input-format", config.input_format, "auto | dag | csv");
    sub->add_option("--delta", config.delta, "edge window in minutes (CSV input)");
    sub->add_option("-o,--output", config.output, "write results here instead of stdout");
  };
  auto add_length = [&config](CLI::App* sub) {
    sub->add_option("-m,--max-length", config.max_length, "maximum trace length in vertices");
  };
  auto add_sampling = [&config](CLI::App* sub) {
    sub->add_option("--epsilon", config.epsilon, "frequency threshold (absolute count)");
    sub->add_option("--C", config.oversampling, "oversampling parameter, p = C/epsilon");
    sub->add_flag("--relative", config.relative, "--epsilon is a fraction of |S_m|");
    sub->add_option("--seed", config.seed, "random seed (falls back to TRACELENS_SEED)");
    sub->add_option("--threads", config.threads, "sampling worker threads");
    sub->add_option("--sampler", config.sampler, "exact | paper")
        ->transform(CLI::CheckedTransformer(
            std::map<std::string, SamplerKind>{{"exact", SamplerKind::exact},
                                               {"paper", SamplerKind::paper}}));
  };
  auto add_mode = [&config](CLI::App* sub) {
    sub->add_option("--mode", config.mode, "second pass: regenerate | fresh")
        ->transform(CLI::CheckedTransformer(std::map<std::string, SecondPassMode>{
            {"regenerate", SecondPassMode::regenerate}, {"fresh", SecondPassMode::fresh}}));
  };

  CLI::App* ingest = app.add_subcommand("ingest", "CSV event log to DAG text");
  add_input(ingest);

  CLI::App* count = app.add_subcommand("count", "count traces of length <= m");
  add_input(count);
  add_length(count);

  CLI::App* enumerate = app.add_subcommand("enumerate", "exact trace frequencies (TSV)");
  add_input(enumerate);
  add_length(enumerate);
  enumerate->add_flag("--hashed", config.hashed, "print fingerprints instead of labels");
  enumerate->add_option("--limit", config.limit, "refuse to enumerate more traces than this");

  CLI::App* sample = app.add_subcommand("sample", "sample traces independently with prob. p");
  add_input(sample);
  add_length(sample);
  add_sampling(sample);
  sample->add_option("--p", config.p, "sampling probability");
  sample->add_flag("--clamp", config.clamp, "cap p at 1 when epsilon < C");
  sample->add_flag("--hashed", config.hashed, "print fingerprints instead of labels");

  CLI::App* mine = app.add_subcommand("mine", "report traces with frequency >= epsilon");
  add_input(mine);
  add_length(mine);
  add_sampling(mine);
  add_mode(mine);
  mine->add_option("--top-k", config.top_k, "switch to the top-k threshold search");

  CLI::App* topk = app.add_subcommand("top-k", "k most frequent traces by threshold search");
  add_input(topk);
  add_length(topk);
  add_sampling(topk);
  add_mode(topk);
  topk->add_option("-k,--k", config.top_k, "number of traces");

  CLI::App* stats = app.add_subcommand("stats", "false negative / false positive table");
  stats->add_option("--C", config.oversampling_list, "comma-separated C values")->delimiter(',');
  stats->add_option("--format", config.format, "text | json");
  stats->add_option("-o,--output", config.output, "write the table here instead of stdout");

  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic DAG");
  synth->add_option("--kind", config.kind, "skip | random | planted");
  synth->add_option("-n", config.n, "vertex count (skip, random)");
  synth->add_option("--skips", config.skips, "skip offsets")->delimiter(',');
  synth->add_option("--label-period", config.label_period, "skip labels = index % period");
  synth->add_option("--edge-prob", config.edge_prob, "edge probability");
  synth->add_option("--alphabet", config.alphabet, "label alphabet size");
  synth->add_option("--plant", config.plants, "planted trace, e.g. 5-9-2x100 (repeatable)");
  synth->add_option("--background", config.background, "background vertices (planted)");
  synth->add_option("--zipf", config.zipf, "Zipf exponent of background labels");
  synth->add_option("--window", config.window, "background edge reach");
  synth->add_option("--seed", config.seed, "random seed");
  synth->add_option("-o,--output", config.output, "write the DAG here instead of stdout");

  CLI::App* bench = app.add_subcommand("bench", "enumeration vs sampling comparison");
  add_input(bench);
  add_length(bench);
  add_sampling(bench);
  add_mode(bench);
  bench->add_option("--limit", config.limit, "refuse to enumerate more traces than this");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return usage_error;
  }
  config.subcommand = app.get_subcommands().front()->get_name();

  try {
    validate(config);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  }
  return run_command(config, out, err);
}

}  // namespace tracelens::cli
