#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "otmerge/diff.hpp"
#include "otmerge/session.hpp"
#include "otmerge/xform.hpp"

namespace otm {

// ---------------------------------------------------------------------------
// Random generation

struct GenParams {
  double insert_prob = 0.5;
  std::size_t max_insert_len = 3;
  std::size_t max_delete_len = 3;
  Text alphabet = U"ab";
};

// A diff applicable to a document of length `doc_len`. Always an insert when
// the document is empty.
Diff random_diff(std::size_t doc_len, const GenParams& params, std::mt19937_64& rng);

// `count` diffs, each applicable to the result of the ones before it.
DiffSeq random_seq(const Doc& doc, std::size_t count, const GenParams& params, std::mt19937_64& rng);

Doc random_doc(std::size_t len, const Text& alphabet, std::mt19937_64& rng);

// ---------------------------------------------------------------------------
// Exhaustive single-diff check

struct EnumBounds {
  std::size_t max_doc_len = 6;
  std::size_t max_text_len = 2;
  Text alphabet = U"ab";
};

// Every insert and delete applicable to a document of length `doc_len`, in a
// fixed order: inserts by position then text (shorter first), then deletes by
// position then length.
std::vector<Diff> enumerate_diffs(std::size_t doc_len, const EnumBounds& bounds);

// Every string over the alphabet of exactly `len` characters, in
// lexicographic order.
std::vector<Doc> enumerate_docs(std::size_t len, const Text& alphabet);

struct Counterexample {
  Doc doc;
  Diff first;
  Diff second;
  TransformPair pair;
  std::string detail;
};

struct Tp1Report {
  std::uint64_t docs = 0;
  std::uint64_t pairs = 0;
  std::uint64_t counterexample_count = 0;
  std::vector<Counterexample> counterexamples;  // first few only
  BranchTally tally;
  double seconds = 0;

  bool full_coverage() const { return tally.table_branches_covered() == kTableBranchCount; }
};

Tp1Report check_tp1_exhaustive(const EnumBounds& bounds, EqualDeletesRule rule = EqualDeletesRule::both_empty,
                               std::size_t keep = 20);

// ---------------------------------------------------------------------------
// Sequence transform fuzzing

struct SeqCheckConfig {
  std::uint64_t trials = 10000;
  std::uint64_t seed = 1;
  std::size_t max_seq_len = 5;
  std::size_t max_doc_len = 12;
  GenParams gen;
  // Seeds each trial with an insert landing strictly inside a delete.
  bool force_split = false;
};

struct SeqCheckReport {
  std::uint64_t trials = 0;
  std::uint64_t passes = 0;  // identity, split independence, bound and budget all held
  std::uint64_t identity_failures = 0;
  std::uint64_t split_dependence = 0;
  std::uint64_t fragmentation_violations = 0;
  std::uint64_t budget_violations = 0;
  std::uint64_t two_fragment_outputs = 0;
  std::uint64_t max_single_calls = 0;
  std::vector<std::string> failures;  // first few only
  BranchTally tally;
};

SeqCheckReport check_seq_identity(const SeqCheckConfig& cfg);

// Upper bound on transform_single calls a sequence transform may make.
std::uint64_t single_call_budget(std::size_t a_len, std::size_t b_len);

struct EpsilonReport {
  std::uint64_t trials = 0;
  std::uint64_t passes = 0;
  std::vector<std::string> failures;
};

// Sprinkles identity placeholders through both inputs and checks the
// transform stays apply-equal to the placeholder-free one.
EpsilonReport check_epsilon_absorption(const SeqCheckConfig& cfg);

// ---------------------------------------------------------------------------
// Protocol simulation

struct ScheduleMix {
  double edit = 0.6;
  double flush = 0.2;
  double get = 0.2;
};

struct SimConfig {
  std::size_t clients = 2;
  std::size_t steps = 200;
  std::uint64_t seed = 1;
  double insert_prob = 0.6;
  std::size_t max_insert_len = 3;
  std::size_t max_delete_len = 3;
  Text alphabet = U"abc";
  ScheduleMix mix;
  Doc initial;
  ReceiveMode mode = ReceiveMode::faithful;
  SplitStrategy split = SplitStrategy::midpoint;
};

// Throws std::invalid_argument.
void validate(const SimConfig& cfg);

struct SimCounts {
  std::uint64_t edits = 0;
  std::uint64_t puts = 0;
  std::uint64_t gets = 0;
  std::uint64_t transform_calls = 0;
};

struct SimReport {
  bool converged = false;
  std::map<ClientId, Doc> final_docs;
  Doc server_doc;
  SimCounts counts;
  std::size_t max_pending_len = 0;
  // Times the server's view of a client plus its pending queue failed to
  // reproduce the server document.
  std::uint64_t invariant_violations = 0;
};

SimReport run_sim(const SimConfig& cfg);

// ---------------------------------------------------------------------------
// JSON

SimConfig sim_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SimConfig& cfg);
nlohmann::json to_json(const SimReport& report);
nlohmann::json to_json(const Tp1Report& report);
nlohmann::json to_json(const SeqCheckReport& report);
nlohmann::json to_json(const EpsilonReport& report);

}  // namespace otm
