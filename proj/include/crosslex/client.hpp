#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "crosslex/crypto.hpp"
#include "crosslex/lexicon.hpp"
#include "crosslex/store.hpp"

namespace crosslex {

// Encrypted query. Mirrors the expanded query structure: one block per
// target language, one group per synonym set, every word and score
// encrypted under the querying user's key. Only the result count is in
// the clear.
struct TrapdoorGroup {
  std::vector<Ciphertext> words;
  Ciphertext eta;
};

struct TrapdoorBlock {
  Ciphertext enc_lang;
  std::vector<TrapdoorGroup> groups;
};

struct Trapdoor {
  std::string key_id;
  unsigned k = 0;
  std::vector<TrapdoorBlock> blocks;
};

// Words whose encoding exceeds the modulus capacity are dropped with a
// warning; a query with nothing encodable left is rejected.
Trapdoor generate_trapdoor(const PublicParams& params, const PublicKey& pk,
                           const ExtendedQuery& query, unsigned k, Rng& rng,
                           std::vector<std::string>* warnings = nullptr);

void save_trapdoor(const std::filesystem::path& file, const Trapdoor& td);
Trapdoor load_trapdoor(const std::filesystem::path& file);

// One ranked hit as the engine returns it: id and key seed, re-keyed to
// the querying user.
struct EncryptedMatch {
  Ciphertext enc_id;
  Ciphertext enc_keyseed;
};

struct RankedDoc {
  std::uint64_t id = 0;
  std::string body;
  std::string error;  // nonempty when this hit could not be opened
};

// Decrypts each match and opens the referenced stored document. A bad
// hit yields an error entry instead of poisoning the whole result list.
std::vector<RankedDoc> decrypt_results(
    const PublicParams& params, const BigNum& sk,
    const std::vector<EncryptedMatch>& matches, const TupleStore& store);

}  // namespace crosslex
