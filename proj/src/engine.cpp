#include "crosslex/engine.hpp"

#include <algorithm>
#include <utility>

#include "crosslex/errors.hpp"

namespace crosslex {

Ciphertext SearchEngine::neg(const Ciphertext& ct) const {
  const PublicParams& params = cp_.params();
  return hom_scale(params, ct, params.n - BigNum(1));
}

std::optional<ScoredDoc> SearchEngine::score_document(
    const Trapdoor& td, const OutsourcedTuple& tuple, std::size_t position) {
  const PublicParams& params = cp_.params();
  const std::string& joint_id = joint_.pk.id;
  if (tuple.index.empty())
    throw ValidationError("tuple at position " + std::to_string(position) +
                          " has no index entries");

  Ciphertext d_ct;
  bool first = true;
  for (const TrapdoorBlock& block : td.blocks) {
    Ciphertext eq = cp_.equal_bit(block.enc_lang, tuple.enc_lang, joint_id);
    d_ct = first ? eq : hom_add(params, d_ct, eq);
    first = false;
  }
  BigNum d = cp_.reveal(d_ct, kRevealLanguageMatches);
  if (d.is_zero()) return std::nullopt;
  if (!d.is_one())
    throw ValidationError("document language matches " + d.to_dec() +
                          " query blocks; block languages must be distinct");

  struct QueryWord {
    const Ciphertext* word;
    const Ciphertext* eta;
  };
  std::vector<QueryWord> words;
  for (const TrapdoorBlock& block : td.blocks)
    for (const TrapdoorGroup& group : block.groups)
      for (const Ciphertext& word : group.words)
        words.push_back({&word, &group.eta});

  std::vector<std::pair<std::size_t, std::size_t>> order;
  order.reserve(tuple.index.size() * words.size());
  for (std::size_t e = 0; e < tuple.index.size(); ++e)
    for (std::size_t w = 0; w < words.size(); ++w) order.emplace_back(e, w);
  // Fresh comparison order per document, so the helper server cannot
  // read match positions out of the zero/nonzero pattern it observes.
  for (std::size_t i = order.size(); i > 1; --i)
    std::swap(order[i - 1], order[rng_.below(BigNum::from_u64(i)).to_u64()]);

  ScoredDoc out;
  out.position = position;
  out.score = encrypt(params, joint_.pk, BigNum(0), rng_);
  for (const auto& [e, w] : order) {
    const IndexEntry& entry = tuple.index[e];
    Ciphertext eq = cp_.equal_bit(*words[w].word, entry.word, joint_id);
    Ciphertext weighted = cp_.multiply(entry.weight, *words[w].eta, joint_id);
    Ciphertext term = cp_.multiply_joint(eq, weighted);
    out.score = hom_add(params, out.score, term);
  }
  out.id = cp_.to_key(tuple.enc_id, joint_id);
  out.keyseed = cp_.to_key(tuple.enc_keyseed, joint_id);
  return out;
}

std::vector<ScoredDoc> SearchEngine::rank_top(std::vector<ScoredDoc> docs,
                                              unsigned k) {
  if (k == 0) throw ValidationError("result count must be positive");
  if (docs.empty()) return {};
  const PublicParams& params = cp_.params();
  // Feed newest-first: a bubble pass keeps the right element on score
  // ties, so the rightmost duplicate (smallest position) outranks.
  std::sort(docs.begin(), docs.end(),
            [](const ScoredDoc& a, const ScoredDoc& b) {
              return a.position > b.position;
            });
  std::size_t m = docs.size();
  std::size_t passes = std::min<std::size_t>(k, m - 1);
  for (std::size_t p = 1; p <= passes; ++p) {
    for (std::size_t i = 0; i + p < m; ++i) {
      ScoredDoc& left = docs[i];
      ScoredDoc& right = docs[i + 1];
      Ciphertext bit = cp_.less_bit(right.score, left.score);
      auto swap_field = [&](Ciphertext& lf, Ciphertext& rf) {
        Ciphertext sum = hom_add(params, lf, rf);
        Ciphertext new_right = cp_.select(bit, lf, rf);
        lf = hom_add(params, sum, neg(new_right));
        rf = std::move(new_right);
      };
      swap_field(left.score, right.score);
      swap_field(left.id, right.id);
      swap_field(left.keyseed, right.keyseed);
    }
  }
  std::vector<ScoredDoc> top;
  std::size_t take = std::min<std::size_t>(k, m);
  for (std::size_t i = 0; i < take; ++i) {
    top.push_back(std::move(docs[m - 1 - i]));
    top.back().position = 0;
  }
  return top;
}

std::vector<EncryptedMatch> SearchEngine::search(const Trapdoor& td,
                                                 const TupleStore& store) {
  metrics_ = {};
  notes_.clear();
  if (td.k == 0) throw ValidationError("trapdoor has zero result count");
  if (td.blocks.empty()) throw ValidationError("trapdoor has no blocks");
  std::uint64_t start = cp_.round_trips();

  std::vector<ScoredDoc> candidates;
  for (std::size_t j = 0; j < store.size(); ++j) {
    ++metrics_.documents;
    try {
      OutsourcedTuple tuple = store.tuple(j);
      auto scored = score_document(td, tuple, j);
      if (scored) {
        ++metrics_.matched;
        candidates.push_back(std::move(*scored));
      }
    } catch (const TransportError&) {
      throw;
    } catch (const Error& e) {
      ++metrics_.skipped;
      notes_.push_back("document at position " + std::to_string(j) +
                       " skipped: " + e.what());
    }
  }

  std::vector<ScoredDoc> ranked = rank_top(std::move(candidates), td.k);
  std::vector<EncryptedMatch> out;
  for (const ScoredDoc& doc : ranked) {
    EncryptedMatch match;
    match.enc_id = cp_.to_key(doc.id, td.key_id);
    match.enc_keyseed = cp_.to_key(doc.keyseed, td.key_id);
    out.push_back(std::move(match));
  }
  metrics_.round_trips = cp_.round_trips() - start;
  metrics_.messages = 2 * metrics_.round_trips;
  return out;
}

}  // namespace crosslex
