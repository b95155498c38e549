// otmerge: apply, transform, verify and serve collaborative text edits.
//
// Exit codes: 0 ok, 1 property violation, 2 parse error, 3 inapplicable
// diff, 4 environment (bind failure, unreadable file).

#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "CLI11.hpp"
#include "otmerge/codec.hpp"
#include "otmerge/sim.hpp"
#include "otmerge/ws_server.hpp"
#include "otmerge/xform.hpp"

namespace {

using namespace otm;
using nlohmann::json;

constexpr int kOk = 0;
constexpr int kViolation = 1;
constexpr int kParse = 2;
constexpr int kInapplicable = 3;
constexpr int kEnvironment = 4;

struct EnvironmentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string slurp(std::istream& in) { return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()}; }

std::string read_file(const std::string& path) {
  if (path == "-") return slurp(std::cin);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw EnvironmentError("cannot read " + path);
  return slurp(in);
}

// Inline JSON, or @path to read it from a file.
std::string json_arg(const std::string& value) { return value.rfind('@', 0) == 0 ? read_file(value.substr(1)) : value; }

SplitStrategy parse_split(const std::string& s) {
  return s == "leftmost" ? SplitStrategy::leftmost : SplitStrategy::midpoint;
}

struct ApplyArgs {
  std::string doc_path = "-";
  std::string text;
  bool have_text = false;
  std::string diffs = "[]";
};

int cmd_apply(const ApplyArgs& args) {
  const DiffSeq diffs = parse_seq(json_arg(args.diffs));
  Doc doc;
  try {
    doc = from_utf8(args.have_text ? args.text : read_file(args.doc_path));
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("document: ") + e.what());
  }
  try {
    std::cout << to_utf8(apply_seq(std::move(doc), diffs));
  } catch (const ApplyError& e) {
    std::cerr << "otmerge: " << e.what() << "\n";
    return kInapplicable;
  }
  return kOk;
}

struct XformArgs {
  std::string a = "[]";
  std::string b = "[]";
  std::string split = "midpoint";
};

int cmd_xform(const XformArgs& args) {
  const DiffSeq a = parse_seq(json_arg(args.a));
  const DiffSeq b = parse_seq(json_arg(args.b));
  XformOptions opts;
  opts.split = parse_split(args.split);
  const SeqTransformPair p = transform_seq(a, b, opts);
  std::cout << json{{"b_after_a", seq_to_json(p.b_after_a)}, {"a_after_b", seq_to_json(p.a_after_b)}}.dump()
            << "\n";
  return kOk;
}

struct FuzzArgs {
  std::string mode = "exhaustive";
  std::size_t max_doc_len = 6;
  std::size_t max_text_len = 2;
  std::string alphabet = "ab";
  std::uint64_t trials = 10000;
  std::uint64_t seed = 1;
  std::size_t max_seq_len = 5;
  bool literal_equal_deletes = false;
  bool force_split = false;
};

int cmd_fuzz(const FuzzArgs& args) {
  const Text alphabet = from_utf8(args.alphabet);
  if (alphabet.empty()) throw ParseError("alphabet must be non-empty");
  if (args.mode == "exhaustive") {
    const EnumBounds bounds{args.max_doc_len, args.max_text_len, alphabet};
    const Tp1Report r = check_tp1_exhaustive(
        bounds, args.literal_equal_deletes ? EqualDeletesRule::literal : EqualDeletesRule::both_empty);
    std::cout << to_json(r).dump(2) << "\n";
    return r.counterexample_count == 0 ? kOk : kViolation;
  }
  SeqCheckConfig cfg;
  cfg.trials = args.trials;
  cfg.seed = args.seed;
  cfg.max_seq_len = args.max_seq_len;
  cfg.max_doc_len = args.max_doc_len;
  cfg.gen.alphabet = alphabet;
  cfg.gen.max_insert_len = args.max_text_len;
  cfg.force_split = args.force_split;
  if (args.mode == "sequence") {
    const SeqCheckReport r = check_seq_identity(cfg);
    std::cout << to_json(r).dump(2) << "\n";
    return r.passes == r.trials ? kOk : kViolation;
  }
  if (args.mode == "epsilon") {
    const EpsilonReport r = check_epsilon_absorption(cfg);
    std::cout << to_json(r).dump(2) << "\n";
    return r.passes == r.trials ? kOk : kViolation;
  }
  throw ParseError("unknown fuzz mode \"" + args.mode + "\"");
}

struct SimulateArgs {
  std::string config;
  std::optional<std::size_t> clients;
  std::optional<std::size_t> steps;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> alphabet;
  std::optional<std::string> split;
  std::optional<std::string> mode;
};

int cmd_simulate(const SimulateArgs& args) {
  SimConfig cfg;
  if (!args.config.empty()) {
    json j;
    try {
      j = json::parse(json_arg(args.config.rfind('{', 0) == 0 ? args.config : "@" + args.config));
    } catch (const json::parse_error& e) {
      throw ParseError(e.what());
    }
    cfg = sim_config_from_json(j);
  }
  if (args.clients) cfg.clients = *args.clients;
  if (args.steps) cfg.steps = *args.steps;
  if (args.seed) cfg.seed = *args.seed;
  if (args.alphabet) cfg.alphabet = from_utf8(*args.alphabet);
  if (args.split) cfg.split = parse_split(*args.split);
  if (args.mode) cfg.mode = *args.mode == "live" ? ReceiveMode::live : ReceiveMode::faithful;
  try {
    validate(cfg);
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
  const SimReport r = run_sim(cfg);
  std::cout << to_json(r).dump(2) << "\n";
  return r.converged && r.invariant_violations == 0 ? kOk : kViolation;
}

struct ServeArgs {
  long port = 8080;
  std::string host = "0.0.0.0";
  std::string doc_path;
  bool push = false;
};

int cmd_serve(const ServeArgs& args) {
  if (args.port < 0 || args.port > 65535) throw EnvironmentError("invalid port " + std::to_string(args.port));
  Doc initial;
  if (!args.doc_path.empty()) {
    try {
      initial = from_utf8(read_file(args.doc_path));
    } catch (const std::invalid_argument& e) {
      throw ParseError(std::string("document: ") + e.what());
    }
  }
  std::unique_ptr<WsServer> server;
  try {
    server = std::make_unique<WsServer>(Hub(std::move(initial), args.push ? Delivery::push : Delivery::pull),
                                        static_cast<std::uint16_t>(args.port), args.host);
  } catch (const std::exception& e) {
    throw EnvironmentError(std::string("cannot listen on ") + args.host + ":" + std::to_string(args.port) + ": " +
                           e.what());
  }
  std::cerr << "otmerge: serving " << (args.push ? "push" : "pull") << " mode on ws://" << args.host << ":"
            << server->port() << "/ws\n";
  server->run_until_interrupted();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Merge concurrent insert/delete edits to shared text"};
  app.require_subcommand(1);

  ApplyArgs apply_args;
  auto* apply = app.add_subcommand("apply", "Apply a diff sequence to a document");
  apply->add_option("--doc", apply_args.doc_path, "Document file, - for stdin");
  apply->add_option("--text", apply_args.text, "Document given inline")->each([&](const std::string&) {
    apply_args.have_text = true;
  });
  apply->add_option("--diffs", apply_args.diffs, "JSON diff array, or @file")->required();

  XformArgs xform_args;
  auto* xform = app.add_subcommand("xform", "Transform two concurrent diff sequences");
  xform->add_option("--a", xform_args.a, "JSON diff array, or @file")->required();
  xform->add_option("--b", xform_args.b, "JSON diff array, or @file")->required();
  xform->add_option("--split", xform_args.split)->check(CLI::IsMember({"midpoint", "leftmost"}));

  FuzzArgs fuzz_args;
  auto* fuzz = app.add_subcommand("fuzz", "Check the convergence identity exhaustively or by random trials");
  fuzz->add_option("--mode", fuzz_args.mode)->check(CLI::IsMember({"exhaustive", "sequence", "epsilon"}));
  fuzz->add_option("--max-doc-len", fuzz_args.max_doc_len);
  fuzz->add_option("--max-text-len", fuzz_args.max_text_len);
  fuzz->add_option("--alphabet", fuzz_args.alphabet);
  fuzz->add_option("--trials", fuzz_args.trials);
  fuzz->add_option("--seed", fuzz_args.seed);
  fuzz->add_option("--max-seq-len", fuzz_args.max_seq_len);
  fuzz->add_flag("--literal-equal-deletes", fuzz_args.literal_equal_deletes,
                 "Use the broken equal-deletes rule (negative control)");
  fuzz->add_flag("--force-split", fuzz_args.force_split, "Start every trial with an insert inside a delete");

  SimulateArgs sim_args;
  auto* simulate = app.add_subcommand("simulate", "Run the seeded multi-client protocol simulator");
  simulate->add_option("--config", sim_args.config, "SimConfig JSON file (or inline object)");
  simulate->add_option("--clients", sim_args.clients);
  simulate->add_option("--steps", sim_args.steps);
  simulate->add_option("--seed", sim_args.seed);
  simulate->add_option("--alphabet", sim_args.alphabet);
  simulate->add_option("--split", sim_args.split)->check(CLI::IsMember({"midpoint", "leftmost"}));
  simulate->add_option("--mode", sim_args.mode)->check(CLI::IsMember({"faithful", "live"}));

  ServeArgs serve_args;
  auto* serve = app.add_subcommand("serve", "Serve the collaboration protocol over WebSocket at /ws");
  serve->add_option("--port", serve_args.port);
  serve->add_option("--host", serve_args.host);
  serve->add_option("--doc", serve_args.doc_path, "Initial document file");
  auto* push = serve->add_flag("--push", serve_args.push, "Send foreign diffs as soon as they are applied");
  serve->add_flag("--pull", "Clients fetch diffs with get (default)")->excludes(push);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kParse;
  }

  try {
    if (*apply) return cmd_apply(apply_args);
    if (*xform) return cmd_xform(xform_args);
    if (*fuzz) return cmd_fuzz(fuzz_args);
    if (*simulate) return cmd_simulate(sim_args);
    if (*serve) return cmd_serve(serve_args);
  } catch (const ParseError& e) {
    std::cerr << "otmerge: " << e.what() << "\n";
    return kParse;
  } catch (const EnvironmentError& e) {
    std::cerr << "otmerge: " << e.what() << "\n";
    return kEnvironment;
  } catch (const std::exception& e) {
    std::cerr << "otmerge: " << e.what() << "\n";
    return kViolation;
  }
  return kOk;
}
