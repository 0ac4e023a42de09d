#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "crosslex/client.hpp"
#include "crosslex/protocols.hpp"
#include "crosslex/store.hpp"

namespace crosslex {

// One stored document that passed the language filter. Every field sits
// under the joint computing key.
struct ScoredDoc {
  Ciphertext score;
  Ciphertext id;
  Ciphertext keyseed;
  // Store append order. Meaningful only before ranking; oblivious swaps
  // cannot carry plaintext tags along.
  std::size_t position = 0;
};

struct EngineMetrics {
  std::uint64_t round_trips = 0;
  std::uint64_t messages = 0;
  std::size_t documents = 0;  // tuples examined
  std::size_t matched = 0;    // tuples that passed the language filter
  std::size_t skipped = 0;    // tuples dropped by per-document faults
};

// Ranked retrieval over the encrypted store, driven from the platform
// server side. Sees only ciphertexts plus the per-document count of
// matching language blocks.
//
// Scores are compared with a magnitude-bounded protocol; deployments
// must size the comparison bound so that the largest possible score
// (entries x words x max weight x max group score) stays below 2^mu.
class SearchEngine {
 public:
  SearchEngine(CpNode& cp, const JointPublicKey& joint, Rng& rng)
      : cp_(cp), joint_(joint), rng_(rng) {}

  // Relevance of one tuple against the trapdoor: sum over all
  // (index entry, query word) pairs of match-bit x weight x group
  // score, compared in freshly permuted order. Returns nothing when the
  // document's language is outside the query's target set.
  std::optional<ScoredDoc> score_document(const Trapdoor& td,
                                          const OutsourcedTuple& tuple,
                                          std::size_t position);

  // Oblivious partial sort: up to k triples, best first. Equal scores
  // rank by smaller store position.
  std::vector<ScoredDoc> rank_top(std::vector<ScoredDoc> docs, unsigned k);

  // Full pipeline: score every stored tuple, rank, re-key ids and key
  // seeds to the trapdoor's user key. A fault on one document skips it
  // (noted in notes()); a transport fault aborts the query.
  std::vector<EncryptedMatch> search(const Trapdoor& td,
                                     const TupleStore& store);

  const EngineMetrics& metrics() const { return metrics_; }
  const std::vector<std::string>& notes() const { return notes_; }

 private:
  Ciphertext neg(const Ciphertext& ct) const;

  CpNode& cp_;
  JointPublicKey joint_;
  Rng& rng_;
  EngineMetrics metrics_;
  std::vector<std::string> notes_;
};

}  // namespace crosslex
