#include "crosslex/lexicon.hpp"

#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <sstream>
#include <utility>

#include "crosslex/errors.hpp"

namespace crosslex {

namespace {

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

Relation relation_from_name(const std::string& name, const std::string& where) {
  if (name == "hypernym") return Relation::hypernym;
  if (name == "hyponym") return Relation::hyponym;
  if (name == "meronym") return Relation::meronym;
  if (name == "holonym") return Relation::holonym;
  throw LexiconError("unknown relation type '" + name + "' in " + where);
}

Relation inverse_of(Relation r) {
  switch (r) {
    case Relation::hypernym:
      return Relation::hyponym;
    case Relation::hyponym:
      return Relation::hypernym;
    case Relation::meronym:
      return Relation::holonym;
    case Relation::holonym:
      return Relation::meronym;
  }
  throw LexiconError("bad relation value");
}

// Reads a text file into trimmed lines; '#' lines and blanks are kept
// as empty strings so line numbers stay aligned for error reports.
std::vector<std::string> read_lines(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open " + file.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') line.clear();
    lines.push_back(line);
  }
  return lines;
}

}  // namespace

const char* relation_name(Relation r) {
  switch (r) {
    case Relation::hypernym:
      return "hypernym";
    case Relation::hyponym:
      return "hyponym";
    case Relation::meronym:
      return "meronym";
    case Relation::holonym:
      return "holonym";
  }
  return "?";
}

bool is_language_tag(const std::string& tag) {
  return tag.size() == 3 &&
         std::all_of(tag.begin(), tag.end(),
                     [](char c) { return c >= 'a' && c <= 'z'; });
}

std::string fold_lemma(const std::string& raw) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw LexiconError("unicode tables unavailable");
  icu::UnicodeString s = icu::UnicodeString::fromUTF8(raw);
  icu::UnicodeString composed = nfc->normalize(s, status);
  if (U_FAILURE(status)) throw LexiconError("normalization failed");
  composed.foldCase();
  std::string out;
  composed.toUTF8String(out);
  return out;
}

void Lexicon::add_synset(Synset synset) {
  if (synset.id.empty()) throw LexiconError("synset with empty id");
  auto [it, inserted] = synsets_.emplace(synset.id, std::move(synset));
  if (!inserted) throw LexiconError("duplicate synset id " + it->first);
}

void Lexicon::add_lemma(const std::string& synset_id, const std::string& lang,
                        const std::string& lemma) {
  if (!is_language_tag(lang))
    throw LexiconError("unknown language tag '" + lang + "'");
  if (lemma.empty()) throw LexiconError("empty lemma for " + synset_id);
  std::string folded = fold_lemma(lemma);
  lookup_[{lang, folded}].insert(synset_id);
  auto& list = inverse_[{synset_id, lang}];
  if (std::find(list.begin(), list.end(), folded) == list.end())
    list.push_back(folded);
  languages_.insert(lang);
}

void Lexicon::link_and_validate() {
  if (synsets_.empty()) throw LexiconError("empty lexicon");
  for (auto& [id, synset] : synsets_) {
    for (auto& [rel, target] : synset.relations) {
      if (synsets_.find(target) == synsets_.end())
        throw LexiconError("relation from " + id + " to missing synset " +
                           target);
    }
  }
  // Complete inverse edges so the relation graph is symmetric.
  for (auto& [id, synset] : synsets_) {
    for (auto [rel, target] : synset.relations) {
      auto& peer = synsets_.at(target).relations;
      std::pair<Relation, std::string> back{inverse_of(rel), id};
      if (std::find(peer.begin(), peer.end(), back) == peer.end())
        peer.push_back(back);
    }
  }
  for (const auto& [key, ids] : lookup_) {
    for (const auto& id : ids)
      if (synsets_.find(id) == synsets_.end())
        throw LexiconError("lemma attached to missing synset " + id);
  }
  for (auto& [key, list] : inverse_) std::sort(list.begin(), list.end());
}

Lexicon Lexicon::load_fixture(const std::filesystem::path& dir) {
  Lexicon lex;
  auto synset_file = dir / "synsets.tsv";
  auto lemma_file = dir / "lemmas.tsv";

  std::size_t line_no = 0;
  for (const std::string& line : read_lines(synset_file)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cols = split(line, '\t');
    if (cols.size() < 2 || cols.size() > 3 || cols[0].empty())
      throw LexiconError("malformed synset line " + std::to_string(line_no));
    Synset synset;
    synset.id = cols[0];
    synset.pos = cols[1];
    if (cols.size() == 3 && !cols[2].empty()) {
      for (const std::string& edge : split(cols[2], ';')) {
        if (edge.empty()) continue;
        auto eq = edge.find('=');
        if (eq == std::string::npos)
          throw LexiconError("malformed relation '" + edge + "' at line " +
                             std::to_string(line_no));
        synset.relations.emplace_back(
            relation_from_name(edge.substr(0, eq), synset.id),
            edge.substr(eq + 1));
      }
    }
    lex.add_synset(std::move(synset));
  }

  line_no = 0;
  for (const std::string& line : read_lines(lemma_file)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cols = split(line, '\t');
    if (cols.size() != 3)
      throw LexiconError("malformed lemma line " + std::to_string(line_no));
    if (lex.synsets_.find(cols[0]) == lex.synsets_.end())
      throw LexiconError("lemma for missing synset " + cols[0] + " at line " +
                         std::to_string(line_no));
    lex.add_lemma(cols[0], cols[1], cols[2]);
  }

  lex.link_and_validate();
  return lex;
}

Lexicon Lexicon::load_omw_tab(const std::filesystem::path& core_dir,
                              const std::vector<std::filesystem::path>& tabs,
                              bool strict) {
  Lexicon lex = load_fixture(core_dir);
  for (const auto& tab : tabs) {
    std::size_t line_no = 0;
    for (const std::string& line : read_lines(tab)) {
      ++line_no;
      if (line.empty()) continue;
      auto fail = [&](const std::string& why) {
        std::string msg = tab.filename().string() + " line " +
                          std::to_string(line_no) + ": " + why;
        if (strict) throw LexiconError(msg);
        ++lex.skipped_lines_;
      };
      std::vector<std::string> cols = split(line, '\t');
      if (cols.size() != 3) {
        fail("expected 3 tab-separated columns");
        continue;
      }
      auto colon = cols[1].find(':');
      if (colon == std::string::npos || cols[1].substr(colon + 1) != "lemma" ||
          !is_language_tag(cols[1].substr(0, colon))) {
        fail("second column is not '<lang>:lemma'");
        continue;
      }
      if (lex.synsets_.find(cols[0]) == lex.synsets_.end()) {
        fail("unknown synset id " + cols[0]);
        continue;
      }
      if (cols[2].empty()) {
        fail("empty lemma");
        continue;
      }
      lex.add_lemma(cols[0], cols[1].substr(0, colon), cols[2]);
    }
  }
  for (auto& [key, list] : lex.inverse_) std::sort(list.begin(), list.end());
  return lex;
}

bool Lexicon::has_synset(const std::string& id) const {
  return synsets_.find(id) != synsets_.end();
}

const Synset& Lexicon::synset(const std::string& id) const {
  auto it = synsets_.find(id);
  if (it == synsets_.end()) throw LexiconError("unknown synset " + id);
  return it->second;
}

std::set<std::string> Lexicon::synsets_for(const std::string& lemma,
                                           const std::string& lang) const {
  if (languages_.find(lang) == languages_.end())
    throw LexiconError("unknown language tag '" + lang + "'");
  auto it = lookup_.find({lang, fold_lemma(lemma)});
  if (it == lookup_.end()) return {};
  return it->second;
}

std::vector<std::string> Lexicon::lemmas(const std::string& synset_id,
                                         const std::string& lang) const {
  auto it = inverse_.find({synset_id, lang});
  if (it == inverse_.end()) return {};
  return it->second;
}

std::map<std::string, std::size_t> Lexicon::lemma_counts() const {
  std::map<std::string, std::size_t> counts;
  for (const auto& [key, list] : inverse_) counts[key.second] += list.size();
  return counts;
}

std::vector<std::string> Lexicon::all_lemmas(const std::string& lang) const {
  std::set<std::string> unique;
  for (const auto& [key, list] : inverse_)
    if (key.second == lang) unique.insert(list.begin(), list.end());
  return {unique.begin(), unique.end()};
}

double Lexicon::path_similarity(const std::string& a,
                                const std::string& b) const {
  synset(a);
  synset(b);
  if (a == b) return 1.0;
  // Breadth-first over hypernym/hyponym edges in both directions.
  std::map<std::string, unsigned> dist{{a, 0}};
  std::deque<std::string> queue{a};
  while (!queue.empty()) {
    std::string cur = queue.front();
    queue.pop_front();
    unsigned d = dist[cur];
    for (const auto& [rel, target] : synsets_.at(cur).relations) {
      if (rel != Relation::hypernym && rel != Relation::hyponym) continue;
      if (dist.count(target)) continue;
      if (target == b) return 1.0 / (d + 2.0);
      dist[target] = d + 1;
      queue.push_back(target);
    }
  }
  return 0.0;
}

std::vector<std::pair<std::string, double>> Lexicon::semantic_neighbors(
    const std::string& id, double t) const {
  if (!(t > 0.0 && t <= 1.0))
    throw ValidationError("extension threshold must be in (0, 1]");
  synset(id);

  // Reachability runs over every relation type; the similarity filter is
  // what actually bounds the result. One extra level absorbs the
  // floating-point floor of the depth estimate.
  unsigned max_depth = static_cast<unsigned>(
      std::min(1.0 / t + 1.0, static_cast<double>(synsets_.size())));
  std::map<std::string, unsigned> dist{{id, 0}};
  std::deque<std::string> queue{id};
  while (!queue.empty()) {
    std::string cur = queue.front();
    queue.pop_front();
    unsigned d = dist[cur];
    if (d >= max_depth) continue;
    for (const auto& [rel, target] : synsets_.at(cur).relations) {
      if (dist.count(target)) continue;
      dist[target] = d + 1;
      queue.push_back(target);
    }
  }

  std::vector<std::pair<std::string, double>> out;
  for (const auto& [candidate, depth] : dist) {
    if (candidate == id) continue;
    double sim = path_similarity(id, candidate);
    if (sim >= t) out.emplace_back(candidate, sim);
  }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    if (x.second != y.second) return x.second > y.second;
    return x.first < y.first;
  });
  return out;
}

void QuerySpec::validate() const {
  if (keywords.empty()) throw ValidationError("empty query");
  if (keywords.size() != keyword_scores.size())
    throw ValidationError("keyword and score counts differ");
  if (languages.empty()) throw ValidationError("no target languages");
  if (languages.size() != language_scores.size())
    throw ValidationError("language and score counts differ");
  if (!(threshold > 0.0 && threshold <= 1.0))
    throw ValidationError("extension threshold must be in (0, 1]");
  for (const std::string& kw : keywords)
    if (kw.empty()) throw ValidationError("empty keyword");
  auto check_score = [](unsigned s, const char* what) {
    if (s < 1 || s > kMaxPreference)
      throw ValidationError(std::string(what) + " score out of [1, 100]");
  };
  for (unsigned s : keyword_scores) check_score(s, "keyword");
  for (unsigned s : language_scores) check_score(s, "language");
  std::set<std::string> seen;
  for (const std::string& lang : languages) {
    if (!is_language_tag(lang))
      throw ValidationError("bad language tag '" + lang + "'");
    if (!seen.insert(lang).second)
      throw ValidationError("duplicate language tag '" + lang + "'");
  }
  if (!is_language_tag(source_language))
    throw ValidationError("bad source language tag '" + source_language + "'");
}

namespace {

std::uint64_t scaled_similarity(double sim, std::uint64_t scale) {
  return static_cast<std::uint64_t>(std::llround(double(scale) * sim));
}

// Keeps the highest-eta occurrence of each synset, then assigns every
// lemma to its highest-eta group so lemma sets end up disjoint.
std::vector<SynonymGroup> reduce(std::vector<SynonymGroup> groups) {
  std::sort(groups.begin(), groups.end(),
            [](const SynonymGroup& a, const SynonymGroup& b) {
              if (a.eta != b.eta) return a.eta > b.eta;
              return a.synset_id < b.synset_id;
            });
  std::set<std::string> synsets_done;
  std::set<std::string> lemmas_claimed;
  std::vector<SynonymGroup> out;
  for (SynonymGroup& group : groups) {
    if (!synsets_done.insert(group.synset_id).second) continue;
    std::vector<std::string> kept;
    for (std::string& lemma : group.lemmas)
      if (lemmas_claimed.insert(lemma).second) kept.push_back(std::move(lemma));
    if (kept.empty()) continue;
    group.lemmas = std::move(kept);
    out.push_back(std::move(group));
  }
  return out;
}

}  // namespace

ExtendedQuery build_target_query(const Lexicon& lexicon,
                                 const QuerySpec& spec, std::uint64_t scale) {
  spec.validate();
  if (scale == 0) throw ValidationError("scale must be positive");
  for (const std::string& lang : spec.languages)
    if (lexicon.languages().find(lang) == lexicon.languages().end())
      throw ValidationError("language '" + lang + "' not in the lexicon");
  if (lexicon.languages().find(spec.source_language) ==
      lexicon.languages().end())
    throw ValidationError("source language '" + spec.source_language +
                          "' not in the lexicon");

  ExtendedQuery query;

  // Per keyword: the synsets it names directly (sim = 1) plus every
  // neighbor above the threshold, with the scaled similarity attached.
  struct Candidate {
    std::string synset_id;
    std::uint64_t scaled_sim;
    Provenance provenance;
  };
  std::vector<std::vector<Candidate>> per_keyword(spec.keywords.size());
  std::vector<std::string> literal(spec.keywords.size());
  for (std::size_t j = 0; j < spec.keywords.size(); ++j) {
    std::set<std::string> direct =
        lexicon.synsets_for(spec.keywords[j], spec.source_language);
    if (direct.empty()) {
      literal[j] = fold_lemma(spec.keywords[j]);
      bool kept = std::find(spec.languages.begin(), spec.languages.end(),
                            spec.source_language) != spec.languages.end();
      query.warnings.push_back(
          "keyword '" + spec.keywords[j] + "' is not in the lexicon; " +
          (kept ? "kept as an exact-match group" : "dropped"));
      continue;
    }
    for (const std::string& sid : direct) {
      per_keyword[j].push_back({sid, scale, Provenance::direct});
      for (const auto& [nid, sim] :
           lexicon.semantic_neighbors(sid, spec.threshold)) {
        per_keyword[j].push_back(
            {nid, scaled_similarity(sim, scale), Provenance::extended});
      }
    }
  }

  std::size_t total_groups = 0;
  for (std::size_t b = 0; b < spec.languages.size(); ++b) {
    LanguageBlock block;
    block.language = spec.languages[b];
    block.language_score = spec.language_scores[b];

    std::vector<SynonymGroup> groups;
    for (std::size_t j = 0; j < spec.keywords.size(); ++j) {
      std::uint64_t beta_gamma =
          std::uint64_t{spec.keyword_scores[j]} * spec.language_scores[b];
      if (!literal[j].empty()) {
        if (block.language == spec.source_language)
          groups.push_back({"literal:" + literal[j],
                            {literal[j]},
                            beta_gamma * scale,
                            Provenance::direct});
        continue;
      }
      for (const Candidate& cand : per_keyword[j]) {
        std::vector<std::string> lemmas =
            lexicon.lemmas(cand.synset_id, block.language);
        if (lemmas.empty()) continue;
        groups.push_back({cand.synset_id, std::move(lemmas),
                          beta_gamma * cand.scaled_sim, cand.provenance});
      }
    }
    block.groups = reduce(std::move(groups));
    total_groups += block.groups.size();
    query.blocks.push_back(std::move(block));
  }

  if (total_groups == 0)
    throw ValidationError("no query keyword resolves to any target lemma");
  return query;
}

}  // namespace crosslex
