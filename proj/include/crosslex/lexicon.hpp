#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace crosslex {

// Fixed-point scale for similarity and preference arithmetic.
inline constexpr std::uint64_t kScoreScale = 1000;
// Upper bound on keyword and language preference scores.
inline constexpr unsigned kMaxPreference = 100;

enum class Relation { hypernym, hyponym, meronym, holonym };

const char* relation_name(Relation r);

struct Synset {
  std::string id;   // offset-pos form, e.g. "02084071-n"
  std::string pos;
  std::vector<std::pair<Relation, std::string>> relations;
};

// NFC-normalized, case-folded form used for all lemma matching.
std::string fold_lemma(const std::string& raw);

// Three lowercase ASCII letters, e.g. "eng".
bool is_language_tag(const std::string& tag);

// Immutable multilingual synset graph. Lemmas are stored folded;
// lookups fold their argument, so matching is normalization-insensitive.
class Lexicon {
 public:
  // Directory with synsets.tsv (id TAB pos TAB rel=target;...) and
  // lemmas.tsv (synset-id TAB lang TAB lemma). Inverse relation edges
  // are completed automatically.
  static Lexicon load_fixture(const std::filesystem::path& dir);

  // Same core directory plus per-language files in the tab format
  // "offset-pos TAB lang:lemma TAB value". With strict=false malformed
  // tab lines are skipped (and counted), otherwise they fail the load.
  static Lexicon load_omw_tab(const std::filesystem::path& core_dir,
                              const std::vector<std::filesystem::path>& tabs,
                              bool strict = true);

  std::size_t synset_count() const { return synsets_.size(); }
  bool has_synset(const std::string& id) const;
  const Synset& synset(const std::string& id) const;
  const std::set<std::string>& languages() const { return languages_; }
  std::size_t skipped_lines() const { return skipped_lines_; }

  // All synsets containing the lemma in the given language.
  std::set<std::string> synsets_for(const std::string& lemma,
                                    const std::string& lang) const;
  // Folded lemmas of one synset in one language, sorted; empty if none.
  std::vector<std::string> lemmas(const std::string& synset_id,
                                  const std::string& lang) const;
  std::map<std::string, std::size_t> lemma_counts() const;
  // Every folded lemma of one language, sorted, deduplicated.
  std::vector<std::string> all_lemmas(const std::string& lang) const;

  // 1/(1+d) with d the shortest distance in the undirected
  // hypernym/hyponym graph; 0 when disconnected.
  double path_similarity(const std::string& a, const std::string& b) const;

  // Synsets reachable over any relation edge with similarity >= t,
  // excluding the source, sorted by similarity descending then id.
  std::vector<std::pair<std::string, double>> semantic_neighbors(
      const std::string& id, double t) const;

 private:
  void add_synset(Synset synset);
  void add_lemma(const std::string& synset_id, const std::string& lang,
                 const std::string& lemma);
  void link_and_validate();

  std::map<std::string, Synset> synsets_;
  // (lang, folded lemma) -> synset ids
  std::map<std::pair<std::string, std::string>, std::set<std::string>> lookup_;
  // (synset id, lang) -> sorted folded lemmas
  std::map<std::pair<std::string, std::string>, std::vector<std::string>>
      inverse_;
  std::set<std::string> languages_;
  std::size_t skipped_lines_ = 0;
};

struct QuerySpec {
  std::vector<std::string> keywords;
  std::vector<unsigned> keyword_scores;   // one per keyword, in [1, 100]
  std::vector<std::string> languages;     // target language tags
  std::vector<unsigned> language_scores;  // one per language, in [1, 100]
  double threshold = 1.0;                 // extension cutoff, in (0, 1]
  std::string source_language;

  // Shape, score-range, threshold and duplicate-tag checks.
  void validate() const;
};

enum class Provenance { direct, extended };

struct SynonymGroup {
  // Source synset, or "literal:<keyword>" for unresolvable keywords
  // kept as exact-match groups.
  std::string synset_id;
  std::vector<std::string> lemmas;  // folded, sorted, non-empty
  std::uint64_t eta = 0;            // beta * gamma * round(scale * sim)
  Provenance provenance = Provenance::direct;
};

struct LanguageBlock {
  std::string language;
  unsigned language_score = 0;
  // Sorted by eta descending, synset id ascending; lemma sets pairwise
  // disjoint after reduction. May be empty (the block still filters by
  // language).
  std::vector<SynonymGroup> groups;
};

struct ExtendedQuery {
  std::vector<LanguageBlock> blocks;  // in request order
  std::vector<std::string> warnings;
};

// Four-step construction: resolve each keyword to synsets in the source
// language, extend to semantic neighbors above the threshold, translate
// groups into every requested language, then reduce (deduplicate
// synsets by highest eta, make lemma sets disjoint, drop empties).
ExtendedQuery build_target_query(const Lexicon& lexicon, const QuerySpec& spec,
                                 std::uint64_t scale = kScoreScale);

}  // namespace crosslex
