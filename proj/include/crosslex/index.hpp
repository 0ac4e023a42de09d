#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "crosslex/crypto.hpp"

namespace crosslex {

// How many UTF-16 code units fit under this modulus, with headroom.
std::size_t max_keyword_units(const PublicParams& params);

// UTF-16 code unit count of a word (its encoded length).
std::size_t keyword_units(const std::string& keyword);

// Reads the keyword's UTF-16 code units as a little-endian base-65536
// integer. Injective over NUL-free strings within the length bound.
BigNum keyword_to_integer(const PublicParams& params,
                          const std::string& keyword);

struct WeightedKeyword {
  std::string keyword;
  std::uint64_t weight = 0;  // fixed-point relevance weight
};

struct DocumentRecord {
  std::uint64_t id = 0;  // must be below the modulus
  std::string body;
  std::string lang;  // 3-letter tag
  std::vector<WeightedKeyword> keywords;
};

// Document frequencies over a corpus snapshot.
class CorpusStats {
 public:
  // Call once per document with its de-duplicated keyword set.
  void add_document(const std::vector<std::string>& unique_keywords);
  std::uint64_t documents() const { return docs_; }
  std::uint64_t df(const std::string& keyword) const;

 private:
  std::uint64_t docs_ = 0;
  std::map<std::string, std::uint64_t> df_;
};

// weight = round(scale * (count/len) * ln(M/df)) per distinct token;
// zero weights are dropped. Tokens must be known to the stats.
std::vector<WeightedKeyword> tfidf_weights(
    const CorpusStats& stats, const std::vector<std::string>& doc_tokens,
    std::uint64_t scale = 1000);

struct IndexEntry {
  Ciphertext word;    // encrypted keyword integer
  Ciphertext weight;  // encrypted relevance weight
};

// Encrypts every (keyword, weight) pair under the owner key, in an
// order freshly shuffled per call.
std::vector<IndexEntry> build_secure_index(const PublicParams& params,
                                           const PublicKey& pk,
                                           const DocumentRecord& doc,
                                           Rng& rng);

std::array<std::uint8_t, 32> derive_symmetric_key(const BigNum& key_seed);

// Authenticated encryption of a document body (AES-256-GCM, random
// nonce, self-describing blob).
std::string seal_document(const std::array<std::uint8_t, 32>& key,
                          const std::string& body);
// Throws CryptoError when the blob was tampered with or the key is wrong.
std::string open_document(const std::array<std::uint8_t, 32>& key,
                          const std::string& blob);

// Everything the owner uploads for one document.
struct OutsourcedTuple {
  std::vector<IndexEntry> index;
  Ciphertext enc_id;
  Ciphertext enc_keyseed;
  Ciphertext enc_lang;    // keyword-encoded language tag, encrypted
  std::string doc_blob;
  std::uint64_t doc_id = 0;  // owner-side only; names the stored blob
};

OutsourcedTuple outsource(const PublicParams& params, const PublicKey& pk,
                          const DocumentRecord& doc, Rng& rng);

// Reads manifest.tsv (id TAB lang TAB file [TAB kw=weight;...]) plus the
// referenced files; docs without explicit weights get TF-IDF weights
// computed over whitespace-tokenized, normalization-folded bodies.
// Zero-weight documents are dropped with a warning.
std::vector<DocumentRecord> load_corpus(const std::filesystem::path& dir,
                                        std::vector<std::string>* warnings,
                                        std::uint64_t scale = 1000);

}  // namespace crosslex
