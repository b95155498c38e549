#include "otmerge/sim.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

#include "otmerge/codec.hpp"

namespace otm {

using nlohmann::json;

namespace {

std::size_t uniform(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

Text random_text(std::size_t len, const Text& alphabet, std::mt19937_64& rng) {
  Text t(len, U'\0');
  for (auto& c : t) c = alphabet[uniform(rng, 0, alphabet.size() - 1)];
  return t;
}

// All strings over `alphabet` with length in [1, max_len], shorter first.
std::vector<Text> enumerate_texts(std::size_t max_len, const Text& alphabet) {
  std::vector<Text> out;
  for (std::size_t len = 1; len <= max_len; ++len) {
    auto docs = enumerate_docs(len, alphabet);
    out.insert(out.end(), docs.begin(), docs.end());
  }
  return out;
}

// Left and right results of applying a transform pair, or an explanation of
// why one side could not be applied.
struct Outcome {
  std::optional<Doc> left;
  std::optional<Doc> right;
  std::string error;

  bool agrees() const { return left && right && *left == *right; }
};

Outcome run_both_orders(const Doc& s, const DiffSeq& a, const DiffSeq& b, const SeqTransformPair& p) {
  Outcome out;
  try {
    out.left = apply_seq(apply_seq(s, a), p.b_after_a);
  } catch (const ApplyError& e) {
    out.error = std::string("first order: ") + e.what();
  }
  try {
    out.right = apply_seq(apply_seq(s, b), p.a_after_b);
  } catch (const ApplyError& e) {
    out.error += std::string(out.error.empty() ? "" : "; ") + "second order: " + e.what();
  }
  return out;
}

std::string describe_trial(const Doc& s, const DiffSeq& a, const DiffSeq& b, const std::string& what) {
  return what + " on \"" + to_utf8(s) + "\" with A=" + to_string(a) + " B=" + to_string(b);
}

void keep_failure(std::vector<std::string>& into, std::string msg) {
  if (into.size() < 20) into.push_back(std::move(msg));
}

Doc random_doc_upto(std::size_t max_len, const Text& alphabet, std::mt19937_64& rng) {
  return random_doc(uniform(rng, 0, max_len), alphabet, rng);
}

// Insert strictly inside a delete, both at the head of their sequences.
std::pair<DiffSeq, DiffSeq> forced_split_heads(const Doc& s, const GenParams& gen, std::mt19937_64& rng) {
  const std::size_t len = uniform(rng, 2, s.size());
  const std::size_t pos = uniform(rng, 0, s.size() - len);
  const std::size_t cut = uniform(rng, pos + 1, pos + len - 1);
  Insert ins{cut, random_text(uniform(rng, 1, gen.max_insert_len), gen.alphabet, rng)};
  Delete del{pos, len};
  if (uniform(rng, 0, 1) == 0) return {{ins}, {del}};
  return {{del}, {ins}};
}

DiffSeq extend(const Doc& s, DiffSeq head, std::size_t total, const GenParams& gen, std::mt19937_64& rng) {
  if (head.size() >= total) return head;
  DiffSeq tail = random_seq(apply_seq(s, head), total - head.size(), gen, rng);
  head.insert(head.end(), tail.begin(), tail.end());
  return head;
}

json doc_json(const Doc& d) { return to_utf8(d); }

}  // namespace

// ---------------------------------------------------------------------------

Diff random_diff(std::size_t doc_len, const GenParams& params, std::mt19937_64& rng) {
  std::bernoulli_distribution want_insert(params.insert_prob);
  if (doc_len == 0 || want_insert(rng)) {
    const std::size_t pos = uniform(rng, 0, doc_len);
    return Insert{pos, random_text(uniform(rng, 1, std::max<std::size_t>(1, params.max_insert_len)),
                                   params.alphabet, rng)};
  }
  const std::size_t pos = uniform(rng, 0, doc_len - 1);
  const std::size_t cap = std::min(std::max<std::size_t>(1, params.max_delete_len), doc_len - pos);
  return Delete{pos, uniform(rng, 1, cap)};
}

DiffSeq random_seq(const Doc& doc, std::size_t count, const GenParams& params, std::mt19937_64& rng) {
  DiffSeq out;
  Doc cur = doc;
  for (std::size_t i = 0; i < count; ++i) {
    Diff d = random_diff(cur.size(), params, rng);
    cur = otm::apply(cur, d);
    out.push_back(std::move(d));
  }
  return out;
}

Doc random_doc(std::size_t len, const Text& alphabet, std::mt19937_64& rng) {
  return random_text(len, alphabet, rng);
}

std::vector<Doc> enumerate_docs(std::size_t len, const Text& alphabet) {
  std::vector<Doc> out;
  if (alphabet.empty()) return out;
  std::vector<std::size_t> digits(len, 0);
  while (true) {
    Doc d(len, U'\0');
    for (std::size_t i = 0; i < len; ++i) d[i] = alphabet[digits[i]];
    out.push_back(std::move(d));
    std::size_t i = len;
    while (i > 0 && ++digits[i - 1] == alphabet.size()) {
      digits[i - 1] = 0;
      --i;
    }
    if (i == 0) break;
  }
  return out;
}

std::vector<Diff> enumerate_diffs(std::size_t doc_len, const EnumBounds& bounds) {
  std::vector<Diff> out;
  const auto texts = enumerate_texts(bounds.max_text_len, bounds.alphabet);
  for (std::size_t pos = 0; pos <= doc_len; ++pos) {
    for (const auto& t : texts) out.push_back(Insert{pos, t});
  }
  for (std::size_t pos = 0; pos < doc_len; ++pos) {
    for (std::size_t len = 1; pos + len <= doc_len; ++len) out.push_back(Delete{pos, len});
  }
  return out;
}

Tp1Report check_tp1_exhaustive(const EnumBounds& bounds, EqualDeletesRule rule, std::size_t keep) {
  const auto start = std::chrono::steady_clock::now();
  Tp1Report report;
  XformOptions opts;
  opts.equal_deletes = rule;
  opts.tally = &report.tally;

  for (std::size_t len = 0; len <= bounds.max_doc_len; ++len) {
    const auto diffs = enumerate_diffs(len, bounds);
    for (const Doc& s : enumerate_docs(len, bounds.alphabet)) {
      ++report.docs;
      for (const Diff& first : diffs) {
        for (const Diff& second : diffs) {
          ++report.pairs;
          TransformPair p = transform_single(first, second, opts);
          Outcome o = run_both_orders(s, {first}, {second}, {p.second_after_first, p.first_after_second});
          if (o.agrees()) continue;
          ++report.counterexample_count;
          if (report.counterexamples.size() < keep) {
            std::string detail = o.error;
            if (detail.empty()) detail = "\"" + to_utf8(*o.left) + "\" != \"" + to_utf8(*o.right) + "\"";
            report.counterexamples.push_back({s, first, second, std::move(p), std::move(detail)});
          }
        }
      }
    }
  }
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::uint64_t single_call_budget(std::size_t a_len, std::size_t b_len) {
  return static_cast<std::uint64_t>(a_len + 1) * (b_len + 1) * 4;
}

SeqCheckReport check_seq_identity(const SeqCheckConfig& cfg) {
  SeqCheckReport report;
  std::mt19937_64 rng(cfg.seed);

  for (std::uint64_t trial = 0; trial < cfg.trials; ++trial) {
    ++report.trials;
    const Doc s = cfg.force_split ? random_doc(uniform(rng, 2, std::max<std::size_t>(2, cfg.max_doc_len)),
                                               cfg.gen.alphabet, rng)
                                  : random_doc_upto(cfg.max_doc_len, cfg.gen.alphabet, rng);
    DiffSeq a;
    DiffSeq b;
    const std::size_t a_len = uniform(rng, 0, cfg.max_seq_len);
    const std::size_t b_len = uniform(rng, 0, cfg.max_seq_len);
    if (cfg.force_split) {
      auto heads = forced_split_heads(s, cfg.gen, rng);
      a = extend(s, std::move(heads.first), std::max<std::size_t>(a_len, 1), cfg.gen, rng);
      b = extend(s, std::move(heads.second), std::max<std::size_t>(b_len, 1), cfg.gen, rng);
    } else {
      a = random_seq(s, a_len, cfg.gen, rng);
      b = random_seq(s, b_len, cfg.gen, rng);
    }

    std::uint64_t calls = 0;
    XformOptions mid;
    mid.tally = &report.tally;
    mid.single_calls = &calls;
    const SeqTransformPair p = transform_seq(a, b, mid);

    XformOptions left_opts;
    left_opts.split = SplitStrategy::leftmost;
    const SeqTransformPair q = transform_seq(a, b, left_opts);

    bool ok = true;
    const Outcome om = run_both_orders(s, a, b, p);
    if (!om.agrees()) {
      ok = false;
      ++report.identity_failures;
      keep_failure(report.failures, describe_trial(s, a, b, "identity failed (" + om.error + ")"));
    }
    const Outcome ol = run_both_orders(s, a, b, q);
    if (!ol.agrees() || (om.left && ol.left && *om.left != *ol.left)) {
      ok = false;
      ++report.split_dependence;
      keep_failure(report.failures, describe_trial(s, a, b, "midpoint and leftmost splits disagree"));
    }
    if (p.b_after_a.size() > b.size() * (a.size() + 1) || p.a_after_b.size() > a.size() * (b.size() + 1)) {
      ok = false;
      ++report.fragmentation_violations;
      keep_failure(report.failures, describe_trial(s, a, b, "fragmentation bound exceeded"));
    }
    report.max_single_calls = std::max(report.max_single_calls, calls);
    if (calls > single_call_budget(a.size(), b.size())) {
      ok = false;
      ++report.budget_violations;
      keep_failure(report.failures, describe_trial(s, a, b, "step budget exceeded: " + std::to_string(calls)));
    }
    if (p.b_after_a.size() > b.size() || p.a_after_b.size() > a.size()) ++report.two_fragment_outputs;
    if (ok) ++report.passes;
  }
  return report;
}

EpsilonReport check_epsilon_absorption(const SeqCheckConfig& cfg) {
  EpsilonReport report;
  std::mt19937_64 rng(cfg.seed);
  auto sprinkle = [&](DiffSeq seq) {
    const std::size_t markers = uniform(rng, 1, 3);
    for (std::size_t i = 0; i < markers; ++i) {
      seq.insert(seq.begin() + static_cast<std::ptrdiff_t>(uniform(rng, 0, seq.size())), Empty{});
    }
    return seq;
  };

  for (std::uint64_t trial = 0; trial < cfg.trials; ++trial) {
    ++report.trials;
    const Doc s = random_doc_upto(cfg.max_doc_len, cfg.gen.alphabet, rng);
    const DiffSeq a = random_seq(s, uniform(rng, 0, cfg.max_seq_len), cfg.gen, rng);
    const DiffSeq b = random_seq(s, uniform(rng, 0, cfg.max_seq_len), cfg.gen, rng);
    const DiffSeq a_marked = sprinkle(a);
    const DiffSeq b_marked = sprinkle(b);

    const SeqTransformPair plain = transform_seq(a, b);
    const Outcome base = run_both_orders(s, a, b, plain);
    bool ok = base.agrees();
    for (const auto& [x, y] : {std::pair{a_marked, b}, std::pair{a, b_marked}, std::pair{a_marked, b_marked}}) {
      const SeqTransformPair marked = transform_seq(x, y);
      const Outcome o = run_both_orders(s, x, y, marked);
      if (!o.agrees() || !base.left || *o.left != *base.left) ok = false;
    }
    if (ok) {
      ++report.passes;
    } else {
      keep_failure(report.failures, describe_trial(s, a_marked, b_marked, "placeholder changed the result"));
    }
  }
  return report;
}

// ---------------------------------------------------------------------------

void validate(const SimConfig& cfg) {
  if (cfg.clients < 2) throw std::invalid_argument("clients must be at least 2");
  if (cfg.alphabet.empty()) throw std::invalid_argument("alphabet must be non-empty");
  if (cfg.insert_prob < 0 || cfg.insert_prob > 1) throw std::invalid_argument("insert_prob must be in [0,1]");
  if (cfg.max_insert_len == 0 || cfg.max_delete_len == 0) {
    throw std::invalid_argument("maximum insert and delete lengths must be positive");
  }
  const ScheduleMix& m = cfg.mix;
  if (m.edit < 0 || m.flush < 0 || m.get < 0 || m.edit > 1 || m.flush > 1 || m.get > 1) {
    throw std::invalid_argument("schedule probabilities must be in [0,1]");
  }
  if (m.edit + m.flush + m.get <= 0) throw std::invalid_argument("schedule probabilities must not all be zero");
}

SimReport run_sim(const SimConfig& cfg) {
  validate(cfg);
  SimReport report;
  std::mt19937_64 rng(cfg.seed);
  XformOptions opts;
  opts.split = cfg.split;
  opts.single_calls = &report.counts.transform_calls;

  const GenParams gen{cfg.insert_prob, cfg.max_insert_len, cfg.max_delete_len, cfg.alphabet};
  ServerState server(cfg.initial);
  std::vector<ClientState> clients;
  // What the server last knew each client to hold; pending[c] applied to it
  // must give the server document.
  std::vector<Doc> known;
  for (std::size_t i = 0; i < cfg.clients; ++i) {
    ClientId id = "c" + std::to_string(i);
    Doc start = server_join(server, id);
    known.push_back(start);
    clients.push_back(make_client(std::move(id), std::move(start)));
  }

  auto check_invariant = [&] {
    for (std::size_t i = 0; i < clients.size(); ++i) {
      bool ok = false;
      try {
        ok = apply_seq(known[i], server.pending.at(clients[i].id)) == server.doc;
      } catch (const ApplyError&) {
      }
      if (!ok) ++report.invariant_violations;
    }
  };
  auto put = [&](std::size_t i) {
    ClientState& c = clients[i];
    server_put(server, c.id, client_flush(c), opts);
    known[i] = c.doc;
    ++report.counts.puts;
    for (const auto& [id, q] : server.pending) report.max_pending_len = std::max(report.max_pending_len, q.size());
  };
  auto get = [&](std::size_t i) {
    ClientState& c = clients[i];
    if (cfg.mode == ReceiveMode::faithful && !c.outbox.empty()) put(i);
    client_receive(c, server_get(server, c.id), cfg.mode, opts);
    known[i] = server.doc;
    ++report.counts.gets;
  };

  std::discrete_distribution<int> action({cfg.mix.edit, cfg.mix.flush, cfg.mix.get});
  for (std::size_t step = 0; step < cfg.steps; ++step) {
    const std::size_t i = uniform(rng, 0, clients.size() - 1);
    switch (action(rng)) {
      case 0:
        client_edit(clients[i], random_diff(clients[i].doc.size(), gen, rng));
        ++report.counts.edits;
        break;
      case 1:
        put(i);
        break;
      default:
        get(i);
        break;
    }
    check_invariant();
  }

  auto quiet = [&] {
    return std::all_of(clients.begin(), clients.end(), [](const ClientState& c) { return c.outbox.empty(); }) &&
           std::all_of(server.pending.begin(), server.pending.end(), [](const auto& kv) { return kv.second.empty(); });
  };
  while (!quiet()) {
    for (std::size_t i = 0; i < clients.size(); ++i) put(i);
    for (std::size_t i = 0; i < clients.size(); ++i) get(i);
    check_invariant();
  }

  report.server_doc = server.doc;
  report.converged = true;
  for (const ClientState& c : clients) {
    report.final_docs[c.id] = c.doc;
    if (c.doc != server.doc) report.converged = false;
  }
  return report;
}

// ---------------------------------------------------------------------------

SimConfig sim_config_from_json(const json& j) {
  SimConfig cfg;
  try {
    cfg.clients = j.value("clients", cfg.clients);
    cfg.steps = j.value("steps", cfg.steps);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.insert_prob = j.value("insert_prob", cfg.insert_prob);
    cfg.max_insert_len = j.value("max_insert_len", cfg.max_insert_len);
    cfg.max_delete_len = j.value("max_delete_len", cfg.max_delete_len);
    if (j.contains("alphabet")) cfg.alphabet = from_utf8(j.at("alphabet").get<std::string>());
    if (j.contains("initial")) cfg.initial = from_utf8(j.at("initial").get<std::string>());
    if (j.contains("schedule_mix")) {
      const json& m = j.at("schedule_mix");
      cfg.mix.edit = m.value("edit", cfg.mix.edit);
      cfg.mix.flush = m.value("flush", cfg.mix.flush);
      cfg.mix.get = m.value("get", cfg.mix.get);
    }
    if (j.contains("mode")) {
      const auto mode = j.at("mode").get<std::string>();
      if (mode == "faithful") cfg.mode = ReceiveMode::faithful;
      else if (mode == "live") cfg.mode = ReceiveMode::live;
      else throw ParseError("mode must be \"faithful\" or \"live\"");
    }
    if (j.contains("split")) {
      const auto split = j.at("split").get<std::string>();
      if (split == "midpoint") cfg.split = SplitStrategy::midpoint;
      else if (split == "leftmost") cfg.split = SplitStrategy::leftmost;
      else throw ParseError("split must be \"midpoint\" or \"leftmost\"");
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad simulation config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("bad simulation config: ") + e.what());
  }
  return cfg;
}

json to_json(const SimConfig& cfg) {
  return json{{"clients", cfg.clients},
              {"steps", cfg.steps},
              {"seed", cfg.seed},
              {"insert_prob", cfg.insert_prob},
              {"max_insert_len", cfg.max_insert_len},
              {"max_delete_len", cfg.max_delete_len},
              {"alphabet", to_utf8(cfg.alphabet)},
              {"initial", to_utf8(cfg.initial)},
              {"schedule_mix", {{"edit", cfg.mix.edit}, {"flush", cfg.mix.flush}, {"get", cfg.mix.get}}},
              {"mode", cfg.mode == ReceiveMode::faithful ? "faithful" : "live"},
              {"split", cfg.split == SplitStrategy::midpoint ? "midpoint" : "leftmost"}};
}

json to_json(const SimReport& report) {
  json docs = json::object();
  for (const auto& [id, d] : report.final_docs) docs[id] = doc_json(d);
  return json{{"converged", report.converged},
              {"final_docs", docs},
              {"server_doc", doc_json(report.server_doc)},
              {"counts",
               {{"edits", report.counts.edits},
                {"puts", report.counts.puts},
                {"gets", report.counts.gets},
                {"transform_calls", report.counts.transform_calls}}},
              {"max_pending_len", report.max_pending_len},
              {"invariant_violations", report.invariant_violations}};
}

namespace {

json tally_json(const BranchTally& tally) {
  json out = json::object();
  for (std::size_t i = 0; i < kBranchCount; ++i) {
    out[std::string(branch_name(static_cast<Branch>(i)))] = tally.hits[i];
  }
  return out;
}

}  // namespace

json to_json(const Tp1Report& report) {
  json ces = json::array();
  for (const auto& ce : report.counterexamples) {
    ces.push_back({{"doc", doc_json(ce.doc)},
                   {"first", diff_to_json(ce.first)},
                   {"second", diff_to_json(ce.second)},
                   {"second_after_first", seq_to_json(ce.pair.second_after_first)},
                   {"first_after_second", seq_to_json(ce.pair.first_after_second)},
                   {"detail", ce.detail}});
  }
  return json{{"mode", "exhaustive"},
              {"docs", report.docs},
              {"pairs", report.pairs},
              {"counterexample_count", report.counterexample_count},
              {"counterexamples", ces},
              {"branches_covered", report.tally.table_branches_covered()},
              {"branches_total", kTableBranchCount},
              {"branch_hits", tally_json(report.tally)}};
}

json to_json(const SeqCheckReport& report) {
  return json{{"mode", "sequence"},
              {"trials", report.trials},
              {"passes", report.passes},
              {"identity_failures", report.identity_failures},
              {"split_dependence", report.split_dependence},
              {"fragmentation_violations", report.fragmentation_violations},
              {"budget_violations", report.budget_violations},
              {"two_fragment_outputs", report.two_fragment_outputs},
              {"max_single_calls", report.max_single_calls},
              {"failures", report.failures},
              {"branch_hits", tally_json(report.tally)}};
}

json to_json(const EpsilonReport& report) {
  return json{{"mode", "epsilon"}, {"trials", report.trials}, {"passes", report.passes}, {"failures", report.failures}};
}

}  // namespace otm
