#include "crosslex/client.hpp"

#include <utility>

#include "crosslex/errors.hpp"
#include "crosslex/index.hpp"
#include "crosslex/serial.hpp"

namespace crosslex {

Trapdoor generate_trapdoor(const PublicParams& params, const PublicKey& pk,
                           const ExtendedQuery& query, unsigned k, Rng& rng,
                           std::vector<std::string>* warnings) {
  if (k == 0) throw ValidationError("result count must be positive");
  if (query.blocks.empty()) throw ValidationError("query has no blocks");
  Trapdoor td;
  td.key_id = pk.id;
  td.k = k;
  for (const LanguageBlock& block : query.blocks) {
    TrapdoorBlock tb;
    tb.enc_lang = encrypt(
        params, pk, keyword_to_integer(params, block.language), rng);
    for (const SynonymGroup& group : block.groups) {
      TrapdoorGroup tg;
      for (const std::string& lemma : group.lemmas) {
        try {
          tg.words.push_back(
              encrypt(params, pk, keyword_to_integer(params, lemma), rng));
        } catch (const ValidationError& e) {
          if (warnings)
            warnings->push_back("query word '" + lemma +
                                "' dropped: " + e.what());
        }
      }
      if (tg.words.empty()) continue;
      tg.eta = encrypt(params, pk, BigNum::from_u64(group.eta), rng);
      tb.groups.push_back(std::move(tg));
    }
    if (!tb.groups.empty()) td.blocks.push_back(std::move(tb));
  }
  if (td.blocks.empty())
    throw ValidationError("no query word fits under these parameters");
  return td;
}

void save_trapdoor(const std::filesystem::path& file, const Trapdoor& td) {
  Record rec("crosslex-trapdoor");
  rec.put("key", td.key_id);
  rec.put("k", static_cast<std::uint64_t>(td.k));
  rec.put("blocks", static_cast<std::uint64_t>(td.blocks.size()));
  for (std::size_t b = 0; b < td.blocks.size(); ++b) {
    const TrapdoorBlock& block = td.blocks[b];
    std::string prefix = "b" + std::to_string(b) + ".";
    rec.put(prefix + "lang", ciphertext_text(block.enc_lang));
    rec.put(prefix + "groups", static_cast<std::uint64_t>(block.groups.size()));
    for (std::size_t g = 0; g < block.groups.size(); ++g) {
      const TrapdoorGroup& group = block.groups[g];
      std::string gp = prefix + "g" + std::to_string(g) + ".";
      rec.put(gp + "words", static_cast<std::uint64_t>(group.words.size()));
      for (std::size_t w = 0; w < group.words.size(); ++w)
        rec.put(gp + "w" + std::to_string(w), ciphertext_text(group.words[w]));
      rec.put(gp + "eta", ciphertext_text(group.eta));
    }
  }
  rec.save(file);
}

Trapdoor load_trapdoor(const std::filesystem::path& file) {
  Record rec = Record::load(file, "crosslex-trapdoor");
  Trapdoor td;
  td.key_id = rec.get("key");
  td.k = static_cast<unsigned>(rec.get_u64("k"));
  std::uint64_t blocks = rec.get_u64("blocks");
  for (std::uint64_t b = 0; b < blocks; ++b) {
    std::string prefix = "b" + std::to_string(b) + ".";
    TrapdoorBlock block;
    block.enc_lang = ciphertext_from_text(rec.get(prefix + "lang"));
    std::uint64_t groups = rec.get_u64(prefix + "groups");
    for (std::uint64_t g = 0; g < groups; ++g) {
      std::string gp = prefix + "g" + std::to_string(g) + ".";
      TrapdoorGroup group;
      std::uint64_t words = rec.get_u64(gp + "words");
      for (std::uint64_t w = 0; w < words; ++w)
        group.words.push_back(
            ciphertext_from_text(rec.get(gp + "w" + std::to_string(w))));
      group.eta = ciphertext_from_text(rec.get(gp + "eta"));
      block.groups.push_back(std::move(group));
    }
    td.blocks.push_back(std::move(block));
  }
  if (td.k == 0) throw ValidationError("trapdoor has zero result count");
  if (td.blocks.empty()) throw ValidationError("trapdoor has no blocks");
  return td;
}

std::vector<RankedDoc> decrypt_results(
    const PublicParams& params, const BigNum& sk,
    const std::vector<EncryptedMatch>& matches, const TupleStore& store) {
  std::vector<RankedDoc> out;
  for (const EncryptedMatch& match : matches) {
    RankedDoc doc;
    try {
      doc.id = decrypt_weak(params, sk, match.enc_id).to_u64();
      BigNum keyseed = decrypt_weak(params, sk, match.enc_keyseed);
      doc.body = open_document(derive_symmetric_key(keyseed),
                               store.blob(doc.id));
    } catch (const Error& e) {
      doc.body.clear();
      doc.error = e.what();
    }
    out.push_back(std::move(doc));
  }
  return out;
}

}  // namespace crosslex
