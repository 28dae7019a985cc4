#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "plcpcomp/codec.hpp"
#include "plcpcomp/corpus.hpp"
#include "plcpcomp/decompressor.hpp"
#include "plcpcomp/errors.hpp"
#include "plcpcomp/factorizer.hpp"
#include "plcpcomp/text_index.hpp"

using namespace plcpcomp;
using json = nlohmann::ordered_json;

namespace {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kBadInput = 3,
  kIo = 4,
  kBadCoding = 5,
  kCorrupt = 6,
};

struct JobConfig {
  std::string input = "-";
  std::string output = "-";
  std::uint64_t theta = 2;
  std::string mem = "64M";
  std::string tmp;
  std::string strategy = "pj";
  std::uint64_t seed = 1;
  std::string metrics;
  std::string index;
  // gen-corpus
  std::string kind;
  std::uint64_t n = 1 << 20;
  std::uint64_t m = 100;
  unsigned alphabet = 4;
  // theta-sweep
  std::uint64_t theta_from = 2;
  std::uint64_t theta_to = 8;
};

std::uint64_t parse_size(const std::string& text) {
  if (text == "unbounded" || text == "0") return stream::MemoryBudget::kUnlimited;
  std::size_t used = 0;
  std::uint64_t value = 0;
  try {
    value = std::stoull(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("bad memory size '" + text + "'");
  }
  const std::string suffix = text.substr(used);
  if (suffix.empty() || suffix == "B") return value;
  if (suffix == "K" || suffix == "KiB") return value << 10;
  if (suffix == "M" || suffix == "MiB") return value << 20;
  if (suffix == "G" || suffix == "GiB") return value << 30;
  throw ConfigError("bad memory size suffix '" + suffix + "'");
}

stream::MemoryBudget budget_of(const JobConfig& c) {
  const std::uint64_t bytes = parse_size(c.mem);
  stream::MemoryBudget b = bytes == stream::MemoryBudget::kUnlimited
                               ? stream::MemoryBudget::unbounded()
                               : stream::MemoryBudget::of_bytes(bytes);
  if (!c.tmp.empty()) b.tmp_dir = c.tmp;
  b.validate();
  return b;
}

std::vector<std::uint8_t> read_all(const std::string& path) {
  if (path == "-") {
    std::cin.tie(nullptr);
    return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::uint8_t> data{std::istreambuf_iterator<char>(in),
                                 std::istreambuf_iterator<char>()};
  if (in.bad()) throw IoError("read failed on " + path);
  return data;
}

class Output {
 public:
  explicit Output(const std::string& path) : path_(path) {
    if (path != "-") {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw IoError("cannot open " + path + " for writing");
    }
  }

  std::ostream& stream() { return path_ == "-" ? std::cout : file_; }

  void write(std::span<const std::uint8_t> bytes) {
    stream().write(reinterpret_cast<const char*>(bytes.data()),
                   static_cast<std::streamsize>(bytes.size()));
  }

  void close() {
    stream().flush();
    if (!stream()) throw IoError("write failed on " + path_);
  }

 private:
  std::string path_;
  std::ofstream file_;
};

json io_json(const stream::IoStats& io) {
  return {{"items_written", io.items_written},
          {"items_read", io.items_read},
          {"blocks_written", io.blocks_written},
          {"blocks_read", io.blocks_read},
          {"spill_files", io.spill_files}};
}

void emit_metrics(const JobConfig& c, const json& record) {
  if (c.metrics.empty()) return;
  std::ofstream out(c.metrics, std::ios::app);
  if (!out) throw IoError("cannot open metrics file " + c.metrics);
  out << record.dump() << '\n';
}

json compression_json(const CompressionMetrics& m) {
  json stages = json::array();
  for (const StageStats& s : m.stages) stages.push_back({{"name", s.name}, {"io", io_json(s.io)}});
  return {{"n", m.n},
          {"theta", m.theta},
          {"factors", m.factors},
          {"references", m.references},
          {"max_list_size", m.max_list_size},
          {"bwt_runs", m.bwt_runs},
          {"spilled", m.spilled()},
          {"stages", stages}};
}

Factorization compress_text(const JobConfig& c, const Text& text, CompressionMetrics& metrics) {
  const stream::MemoryBudget budget = budget_of(c);
  if (!c.index.empty()) {
    const IndexBundle bundle = load_index(c.index);
    if (bundle.size() != text.size()) throw InputError("index does not match the input length");
    return pipeline_compress(text, bundle, c.theta, budget, &metrics);
  }
  StreamIndex index = build_stream_index(text, budget);
  return pipeline_compress(text, index, c.theta, budget, &metrics);
}

int run_compress(const JobConfig& c) {
  const Text text = Text::from_bytes(read_all(c.input));
  CompressionMetrics metrics;
  const Factorization f = compress_text(c, text, metrics);
  Output out(c.output);
  const std::uint64_t size = encode(f, out.stream());
  out.close();
  json record = {{"command", "compress"}, {"coded_bytes", size}};
  record.update(compression_json(metrics));
  emit_metrics(c, record);
  return kOk;
}

int run_decompress(const JobConfig& c) {
  const std::vector<std::uint8_t> coded = read_all(c.input);
  const Factorization f = decode(coded);
  const stream::MemoryBudget budget = budget_of(c);
  Output out(c.output);
  std::uint64_t written = 0;
  const std::uint64_t body = f.text_length() - 1;
  // The trailing sentinel is not part of the original file.
  auto sink = [&](std::span<const std::uint8_t> chunk) {
    const std::uint64_t keep = std::min<std::uint64_t>(chunk.size(), body - std::min(body, written));
    out.write(chunk.first(keep));
    written += chunk.size();
  };
  json record = {{"command", "decompress"}, {"strategy", c.strategy}, {"n", f.text_length()}};
  if (c.strategy == "oracle") {
    std::uint64_t rounds = 0;
    sink(decompress_oracle(f, SweepMode::gauss_seidel, &rounds));
    record["rounds"] = rounds;
  } else if (c.strategy == "pj" || c.strategy == "compact-pj") {
    Factorization input = f;
    if (c.strategy == "compact-pj") {
      CompactionMetrics cm;
      input = compact_em(f, budget, &cm);
      record["compaction"] = {{"rewritten", cm.rewritten},
                              {"tree_depth", cm.tree_depth},
                              {"ranking_rounds", cm.ranking_rounds},
                              {"pq_peak", cm.pq_peak},
                              {"io", io_json(cm.io)}};
    }
    PjMetrics pm;
    decompress_pj(input, budget, sink, &pm);
    record["iterations"] = pm.iterations.size();
    record["spilled"] = pm.spilled();
    record["io"] = io_json(pm.total_io());
  } else {
    throw ConfigError("unknown strategy '" + c.strategy + "'");
  }
  out.close();
  if (written != f.text_length()) {
    throw CodingError("decoded " + std::to_string(written) + " bytes, header says " +
                      std::to_string(f.text_length()));
  }
  emit_metrics(c, record);
  return kOk;
}

bool is_coded(const std::vector<std::uint8_t>& data) {
  return data.size() >= 8 && std::equal(kCodedMagic, kCodedMagic + 8, data.begin());
}

int run_stats(const JobConfig& c) {
  const std::vector<std::uint8_t> data = read_all(c.input);
  json record = {{"command", "stats"}};
  Factorization f;
  if (is_coded(data)) {
    f = decode(data);
    record["source"] = "coded";
  } else {
    const Text text = Text::from_bytes(data);
    CompressionMetrics metrics;
    f = compress_text(c, text, metrics);
    record["source"] = "text";
    record["max_list_size"] = metrics.max_list_size;
    record["bwt_runs"] = metrics.bwt_runs;
  }
  const DepGraphStats g = graph_stats(f);
  record["n"] = f.text_length();
  record["theta"] = f.theta();
  record["factors"] = f.factors().size();
  record["references"] = f.reference_count();
  record["literal_factors"] = f.literal_count();
  record["factors_single_literals"] = f.factor_count_single_literals();
  record["multi_dependent"] = g.multi_dependent_count;
  record["max_out_degree"] = g.max_out_degree;
  record["depth"] = g.depth;
  Output out(c.output);
  out.stream() << record.dump(2) << '\n';
  out.close();
  emit_metrics(c, record);
  return kOk;
}

int run_gen_corpus(const JobConfig& c) {
  std::vector<std::uint8_t> body;
  if (c.kind == "lower-bound") {
    const Text t = lower_bound_text(c.m);
    body.assign(t.body().begin(), t.body().end());
  } else {
    body = corpus::by_name(c.kind, c.seed, c.n, c.alphabet);
  }
  Output out(c.output);
  out.write(body);
  out.close();
  emit_metrics(c, {{"command", "gen-corpus"}, {"kind", c.kind}, {"bytes", body.size()}});
  return kOk;
}

int run_index(const JobConfig& c) {
  if (c.output == "-") throw ConfigError("index needs an output path");
  const IndexBundle b = build_index(Text::from_bytes(read_all(c.input)));
  save_index(b, c.output);
  emit_metrics(c, {{"command", "index"}, {"n", b.size()}, {"bwt_runs", b.bwt_runs}});
  return kOk;
}

int run_theta_sweep(const JobConfig& c) {
  if (c.theta_from < 2 || c.theta_from > c.theta_to) throw ConfigError("bad theta range");
  const Text text = Text::from_bytes(read_all(c.input));
  const IndexBundle index = c.index.empty() ? build_index(text) : load_index(c.index);
  const stream::MemoryBudget budget = budget_of(c);
  Output out(c.output);
  for (std::uint64_t theta = c.theta_from; theta <= c.theta_to; ++theta) {
    CompressionMetrics metrics;
    const Factorization f = pipeline_compress(text, index, theta, budget, &metrics);
    const json record = {{"command", "theta-sweep"},
                         {"n", text.size()},
                         {"theta", theta},
                         {"references", f.reference_count()},
                         {"factors", f.factor_count_single_literals()},
                         {"max_list_size", metrics.max_list_size}};
    out.stream() << record.dump() << '\n';
    emit_metrics(c, record);
  }
  out.close();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);
  JobConfig c;
  CLI::App app{"plcpcomp: bidirectional compression over PLCP streams"};
  app.require_subcommand(1);

  auto common = [&](CLI::App* sub) {
    sub->add_option("--mem", c.mem, "in-core memory budget (e.g. 512M, unbounded)")
        ->envname("PLCPCOMP_MEM")
        ->capture_default_str();
    sub->add_option("--tmp", c.tmp, "directory for spill files")->envname("PLCPCOMP_TMP");
    sub->add_option("--metrics", c.metrics, "append JSON-lines metrics to this file")
        ->envname("PLCPCOMP_METRICS");
  };
  auto theta = [&](CLI::App* sub) {
    sub->add_option("--theta", c.theta, "minimum reference length")
        ->envname("PLCPCOMP_THETA")
        ->check(CLI::Range(std::uint64_t{2}, std::numeric_limits<std::uint64_t>::max()))
        ->capture_default_str();
  };
  auto io = [&](CLI::App* sub) {
    sub->add_option("input", c.input, "input path or - for stdin")->capture_default_str();
    sub->add_option("output", c.output, "output path or - for stdout")->capture_default_str();
  };

  CLI::App* compress = app.add_subcommand("compress", "compress a file");
  io(compress);
  common(compress);
  theta(compress);
  compress->add_option("--index", c.index, "precomputed index from the index command");

  CLI::App* decompress = app.add_subcommand("decompress", "restore a compressed file");
  io(decompress);
  common(decompress);
  decompress->add_option("--strategy", c.strategy, "oracle, pj or compact-pj")
      ->envname("PLCPCOMP_STRATEGY")
      ->check(CLI::IsMember({"oracle", "pj", "compact-pj"}))
      ->capture_default_str();

  CLI::App* stats = app.add_subcommand("stats", "factor census of a text or compressed file");
  io(stats);
  common(stats);
  theta(stats);
  stats->add_option("--index", c.index, "precomputed index for a text input");

  CLI::App* gen = app.add_subcommand("gen-corpus", "write a generated text");
  gen->add_option("kind", c.kind, "lower-bound, random, repetitive or fibonacci")
      ->required()
      ->check(CLI::IsMember({"lower-bound", "random", "repetitive", "fibonacci"}));
  gen->add_option("output", c.output, "output path or - for stdout")->capture_default_str();
  gen->add_option("--n", c.n, "length")->capture_default_str();
  gen->add_option("--m", c.m, "symbol count for lower-bound")->capture_default_str();
  gen->add_option("--alphabet", c.alphabet, "alphabet size")->capture_default_str();
  gen->add_option("--seed", c.seed, "random seed")->envname("PLCPCOMP_SEED")->capture_default_str();
  gen->add_option("--metrics", c.metrics, "append JSON-lines metrics to this file")
      ->envname("PLCPCOMP_METRICS");

  CLI::App* index = app.add_subcommand("index", "build and save SA, ISA, Phi and PLCP");
  index->add_option("input", c.input, "input path or - for stdin")->required();
  index->add_option("output", c.output, "index path")->required();
  index->add_option("--metrics", c.metrics, "append JSON-lines metrics to this file")
      ->envname("PLCPCOMP_METRICS");

  CLI::App* sweep = app.add_subcommand("theta-sweep", "factor counts over a range of theta");
  io(sweep);
  common(sweep);
  sweep->add_option("--from", c.theta_from, "first theta")->capture_default_str();
  sweep->add_option("--to", c.theta_to, "last theta")->capture_default_str();
  sweep->add_option("--index", c.index, "precomputed index");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*compress) return run_compress(c);
    if (*decompress) return run_decompress(c);
    if (*stats) return run_stats(c);
    if (*gen) return run_gen_corpus(c);
    if (*index) return run_index(c);
    if (*sweep) return run_theta_sweep(c);
  } catch (const FormatError& e) {
    std::cerr << "plcpcomp: corrupt input: " << e.what() << '\n';
    return kCorrupt;
  } catch (const CodingError& e) {
    std::cerr << "plcpcomp: invalid coding: " << e.what() << '\n';
    return kBadCoding;
  } catch (const ConfigError& e) {
    std::cerr << "plcpcomp: configuration: " << e.what() << '\n';
    return kUsage;
  } catch (const InputError& e) {
    std::cerr << "plcpcomp: input: " << e.what() << '\n';
    return kBadInput;
  } catch (const IoError& e) {
    std::cerr << "plcpcomp: i/o: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "plcpcomp: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}
