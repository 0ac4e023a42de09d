#include "crosslex/index.hpp"

#include <openssl/evp.h>
#include <openssl/rand.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>

#include "crosslex/errors.hpp"
#include "crosslex/lexicon.hpp"

namespace crosslex {

namespace {

constexpr char kBlobMagic[3] = {'X', 'B', '1'};
constexpr std::size_t kNonceLen = 12;
constexpr std::size_t kTagLen = 16;

struct CtxFree {
  void operator()(EVP_CIPHER_CTX* p) const { EVP_CIPHER_CTX_free(p); }
};
using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, CtxFree>;

[[noreturn]] void crypto_fail(const char* what) { throw CryptoError(what); }

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::uint64_t parse_u64(const std::string& text, const std::string& where) {
  if (text.empty() ||
      !std::all_of(text.begin(), text.end(),
                   [](unsigned char c) { return std::isdigit(c); }))
    throw ParseError(where + ": expected an unsigned integer, got '" + text +
                     "'");
  try {
    return std::stoull(text);
  } catch (const std::out_of_range&) {
    throw ParseError(where + ": integer out of range: '" + text + "'");
  }
}

// Whitespace splitting with ASCII punctuation trimmed off both ends.
std::vector<std::string> tokenize(const std::string& body) {
  std::vector<std::string> tokens;
  std::istringstream in(body);
  std::string word;
  while (in >> word) {
    std::size_t lo = 0, hi = word.size();
    while (lo < hi && std::ispunct(static_cast<unsigned char>(word[lo]))) ++lo;
    while (hi > lo && std::ispunct(static_cast<unsigned char>(word[hi - 1])))
      --hi;
    if (hi > lo) tokens.push_back(fold_lemma(word.substr(lo, hi - lo)));
  }
  return tokens;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

std::size_t max_keyword_units(const PublicParams& params) {
  std::size_t bits = params.n.bit_length();
  return bits < 32 ? 0 : bits / 16 - 1;
}

std::size_t keyword_units(const std::string& keyword) {
  return static_cast<std::size_t>(
      icu::UnicodeString::fromUTF8(keyword).length());
}

BigNum keyword_to_integer(const PublicParams& params,
                          const std::string& keyword) {
  if (keyword.empty()) throw ValidationError("empty keyword");
  icu::UnicodeString units = icu::UnicodeString::fromUTF8(keyword);
  std::size_t len = static_cast<std::size_t>(units.length());
  std::size_t bound = max_keyword_units(params);
  if (len > bound)
    throw ValidationError("keyword '" + keyword + "' needs " +
                          std::to_string(len) + " UTF-16 units but the " +
                          "modulus admits only " + std::to_string(bound));
  BigNum value(0);
  for (std::size_t i = len; i-- > 0;) {
    std::uint16_t unit = static_cast<std::uint16_t>(units.charAt(
        static_cast<std::int32_t>(i)));
    if (unit == 0)
      throw ValidationError("keyword contains a NUL code unit");
    value = value * BigNum(65536) + BigNum::from_u64(unit);
  }
  return value;
}

void CorpusStats::add_document(
    const std::vector<std::string>& unique_keywords) {
  ++docs_;
  for (const std::string& kw : unique_keywords) ++df_[kw];
}

std::uint64_t CorpusStats::df(const std::string& keyword) const {
  auto it = df_.find(keyword);
  return it == df_.end() ? 0 : it->second;
}

std::vector<WeightedKeyword> tfidf_weights(
    const CorpusStats& stats, const std::vector<std::string>& doc_tokens,
    std::uint64_t scale) {
  if (doc_tokens.empty())
    throw ValidationError("document has no tokens to weigh");
  if (scale == 0) throw ValidationError("scale must be positive");
  std::map<std::string, std::uint64_t> counts;
  for (const std::string& tok : doc_tokens) ++counts[tok];
  double len = static_cast<double>(doc_tokens.size());
  double docs = static_cast<double>(stats.documents());
  std::vector<WeightedKeyword> out;
  for (const auto& [tok, count] : counts) {
    std::uint64_t df = stats.df(tok);
    if (df == 0)
      throw ValidationError("no document frequency for keyword '" + tok + "'");
    double tf = static_cast<double>(count) / len;
    double idf = std::log(docs / static_cast<double>(df));
    auto weight = static_cast<std::uint64_t>(
        std::llround(double(scale) * tf * idf));
    if (weight > 0) out.push_back({tok, weight});
  }
  return out;
}

std::vector<IndexEntry> build_secure_index(const PublicParams& params,
                                           const PublicKey& pk,
                                           const DocumentRecord& doc,
                                           Rng& rng) {
  if (doc.keywords.empty())
    throw ValidationError("document " + std::to_string(doc.id) +
                          " has no keywords");
  std::set<std::string> seen;
  std::vector<IndexEntry> entries;
  entries.reserve(doc.keywords.size());
  for (const WeightedKeyword& wk : doc.keywords) {
    if (wk.weight == 0)
      throw ValidationError("keyword '" + wk.keyword +
                            "' has zero weight");
    if (!seen.insert(wk.keyword).second)
      throw ValidationError("duplicate keyword '" + wk.keyword + "'");
    entries.push_back({encrypt(params, pk, keyword_to_integer(params,
                                                              wk.keyword),
                               rng),
                       encrypt(params, pk, BigNum::from_u64(wk.weight), rng)});
  }
  // Fresh order every build so entry position reveals nothing.
  for (std::size_t i = entries.size(); i > 1; --i) {
    std::size_t j = rng.below(BigNum::from_u64(i)).to_u64();
    std::swap(entries[i - 1], entries[j]);
  }
  return entries;
}

std::array<std::uint8_t, 32> derive_symmetric_key(const BigNum& key_seed) {
  std::vector<std::uint8_t> bytes = key_seed.to_bytes();
  std::array<std::uint8_t, 32> out{};
  unsigned out_len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), out.data(), &out_len,
                 EVP_sha256(), nullptr) != 1 ||
      out_len != out.size())
    crypto_fail("key derivation failed");
  return out;
}

std::string seal_document(const std::array<std::uint8_t, 32>& key,
                          const std::string& body) {
  std::uint8_t nonce[kNonceLen];
  if (RAND_bytes(nonce, sizeof nonce) != 1) crypto_fail("nonce generation");
  CipherCtx ctx(EVP_CIPHER_CTX_new());
  if (!ctx) crypto_fail("cipher context allocation");
  if (EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, key.data(),
                         nonce) != 1)
    crypto_fail("cipher init");
  std::string out(kBlobMagic, sizeof kBlobMagic);
  out.append(reinterpret_cast<const char*>(nonce), sizeof nonce);
  out.resize(out.size() + kTagLen);  // tag slot, filled below
  std::string ct(body.size(), '\0');
  int len = 0;
  if (!body.empty() &&
      EVP_EncryptUpdate(ctx.get(),
                        reinterpret_cast<std::uint8_t*>(ct.data()), &len,
                        reinterpret_cast<const std::uint8_t*>(body.data()),
                        static_cast<int>(body.size())) != 1)
    crypto_fail("encryption");
  int fin = 0;
  if (EVP_EncryptFinal_ex(ctx.get(),
                          reinterpret_cast<std::uint8_t*>(ct.data()) + len,
                          &fin) != 1)
    crypto_fail("encryption");
  ct.resize(static_cast<std::size_t>(len + fin));
  std::uint8_t tag[kTagLen];
  if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, kTagLen, tag) != 1)
    crypto_fail("tag extraction");
  std::copy(tag, tag + kTagLen,
            out.begin() + sizeof kBlobMagic + kNonceLen);
  return out + ct;
}

std::string open_document(const std::array<std::uint8_t, 32>& key,
                          const std::string& blob) {
  constexpr std::size_t header = sizeof kBlobMagic + kNonceLen + kTagLen;
  if (blob.size() < header ||
      !std::equal(kBlobMagic, kBlobMagic + sizeof kBlobMagic, blob.begin()))
    throw CryptoError("not a sealed document blob");
  const auto* nonce =
      reinterpret_cast<const std::uint8_t*>(blob.data()) + sizeof kBlobMagic;
  std::uint8_t tag[kTagLen];
  std::copy(blob.begin() + sizeof kBlobMagic + kNonceLen,
            blob.begin() + header, tag);
  CipherCtx ctx(EVP_CIPHER_CTX_new());
  if (!ctx) crypto_fail("cipher context allocation");
  if (EVP_DecryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, key.data(),
                         nonce) != 1)
    crypto_fail("cipher init");
  std::string body(blob.size() - header, '\0');
  int len = 0;
  if (blob.size() > header &&
      EVP_DecryptUpdate(ctx.get(),
                        reinterpret_cast<std::uint8_t*>(body.data()), &len,
                        reinterpret_cast<const std::uint8_t*>(blob.data()) +
                            header,
                        static_cast<int>(blob.size() - header)) != 1)
    crypto_fail("decryption");
  if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, kTagLen, tag) != 1)
    crypto_fail("tag check setup");
  int fin = 0;
  if (EVP_DecryptFinal_ex(ctx.get(),
                          reinterpret_cast<std::uint8_t*>(body.data()) + len,
                          &fin) != 1)
    throw CryptoError("document authentication failed");
  body.resize(static_cast<std::size_t>(len + fin));
  return body;
}

OutsourcedTuple outsource(const PublicParams& params, const PublicKey& pk,
                          const DocumentRecord& doc, Rng& rng) {
  if (!is_language_tag(doc.lang))
    throw ValidationError("bad language tag '" + doc.lang + "'");
  if (BigNum::from_u64(doc.id) >= params.n)
    throw ValidationError("document id exceeds the modulus");
  OutsourcedTuple out;
  out.doc_id = doc.id;
  out.index = build_secure_index(params, pk, doc, rng);
  BigNum keyseed = rng.below(params.n);
  out.enc_id = encrypt(params, pk, BigNum::from_u64(doc.id), rng);
  out.enc_keyseed = encrypt(params, pk, keyseed, rng);
  out.enc_lang = encrypt(params, pk, keyword_to_integer(params, doc.lang),
                         rng);
  out.doc_blob = seal_document(derive_symmetric_key(keyseed), doc.body);
  return out;
}

std::vector<DocumentRecord> load_corpus(const std::filesystem::path& dir,
                                        std::vector<std::string>* warnings,
                                        std::uint64_t scale) {
  std::ifstream manifest(dir / "manifest.tsv");
  if (!manifest)
    throw IoError("cannot read " + (dir / "manifest.tsv").string());
  struct Row {
    DocumentRecord doc;
    std::vector<std::string> tokens;  // empty when weights are explicit
  };
  std::vector<Row> rows;
  std::set<std::uint64_t> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(manifest, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::string where = "manifest.tsv line " + std::to_string(line_no);
    std::vector<std::string> cols = split(line, '\t');
    if (cols.size() != 3 && cols.size() != 4)
      throw ParseError(where + ": expected 3 or 4 tab-separated columns");
    Row row;
    row.doc.id = parse_u64(cols[0], where);
    if (!ids.insert(row.doc.id).second)
      throw ValidationError(where + ": duplicate document id " + cols[0]);
    if (!is_language_tag(cols[1]))
      throw ValidationError(where + ": bad language tag '" + cols[1] + "'");
    row.doc.lang = cols[1];
    row.doc.body = read_file(dir / cols[2]);
    if (cols.size() == 4) {
      for (const std::string& piece : split(cols[3], ';')) {
        std::size_t eq = piece.find('=');
        if (eq == std::string::npos || eq == 0)
          throw ParseError(where + ": keyword override needs kw=weight, got '" +
                           piece + "'");
        WeightedKeyword wk;
        wk.keyword = fold_lemma(piece.substr(0, eq));
        wk.weight = parse_u64(piece.substr(eq + 1), where);
        if (wk.weight == 0)
          throw ValidationError(where + ": explicit zero weight for '" +
                                wk.keyword + "'");
        row.doc.keywords.push_back(wk);
      }
    } else {
      row.tokens = tokenize(row.doc.body);
      if (row.tokens.empty())
        throw ValidationError(where + ": document body has no tokens");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ValidationError("manifest.tsv lists no documents");

  CorpusStats stats;
  for (const Row& row : rows) {
    std::vector<std::string> uniq;
    if (row.tokens.empty())
      for (const WeightedKeyword& wk : row.doc.keywords)
        uniq.push_back(wk.keyword);
    else
      uniq = row.tokens;
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    stats.add_document(uniq);
  }
  bool needs_tfidf = std::any_of(rows.begin(), rows.end(), [](const Row& r) {
    return !r.tokens.empty();
  });
  if (warnings && needs_tfidf && stats.documents() == 1)
    warnings->push_back(
        "single-document corpus: every inverse document frequency is zero");

  std::vector<DocumentRecord> docs;
  for (Row& row : rows) {
    if (!row.tokens.empty())
      row.doc.keywords = tfidf_weights(stats, row.tokens, scale);
    if (row.doc.keywords.empty()) {
      if (warnings)
        warnings->push_back("document " + std::to_string(row.doc.id) +
                            " has no nonzero keyword weights; dropped");
      continue;
    }
    docs.push_back(std::move(row.doc));
  }
  return docs;
}

}  // namespace crosslex
