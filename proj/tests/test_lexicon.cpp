#include "crosslex/lexicon.hpp"

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "crosslex/errors.hpp"
#include "doctest.h"

using namespace crosslex;
namespace fs = std::filesystem;

namespace {

const char* kAnimal = "00015388-n";
const char* kMammal = "01861778-n";
const char* kCanine = "02083346-n";
const char* kDog = "02084071-n";
const char* kPuppy = "01322604-n";
const char* kFeline = "02120997-n";
const char* kCat = "02121620-n";
const char* kKitten = "01323000-n";
const char* kPaw = "02441326-n";
const char* kPet = "01317541-n";
const char* kBankMoney = "08420278-n";
const char* kBankRiver = "09213565-n";

fs::path fixture_dir() { return fs::path(CROSSLEX_FIXTURE_DIR) / "lexicon"; }
fs::path omw_dir() { return fs::path(CROSSLEX_FIXTURE_DIR) / "omw"; }

const Lexicon& fixture() {
  static Lexicon lex = Lexicon::load_fixture(fixture_dir());
  return lex;
}

fs::path write_lexicon(const std::string& synsets, const std::string& lemmas) {
  static int counter = 0;
  fs::path dir = fs::temp_directory_path() /
                 ("crosslex-lex-" + std::to_string(::getpid()) + "-" +
                  std::to_string(counter++));
  fs::create_directories(dir);
  std::ofstream(dir / "synsets.tsv") << synsets;
  std::ofstream(dir / "lemmas.tsv") << lemmas;
  return dir;
}

QuerySpec dog_query() {
  QuerySpec spec;
  spec.keywords = {"dog"};
  spec.keyword_scores = {2};
  spec.languages = {"eng", "cmn"};
  spec.language_scores = {3, 1};
  spec.threshold = 1.0;
  spec.source_language = "eng";
  return spec;
}

const SynonymGroup* find_group(const LanguageBlock& block,
                               const std::string& synset_id) {
  for (const SynonymGroup& g : block.groups)
    if (g.synset_id == synset_id) return &g;
  return nullptr;
}

}  // namespace

TEST_CASE("fixture loads with twelve synsets in three languages") {
  const Lexicon& lex = fixture();
  CHECK(lex.synset_count() == 12);
  CHECK(lex.languages() == std::set<std::string>{"cmn", "eng", "spa"});
  CHECK(lex.lemma_counts().at("eng") == 16);
}

TEST_CASE("loading completes inverse relation edges") {
  const Lexicon& lex = fixture();
  bool found = false;
  for (const auto& [rel, target] : lex.synset(kCanine).relations)
    if (rel == Relation::hyponym && target == kDog) found = true;
  CHECK(found);
  found = false;
  for (const auto& [rel, target] : lex.synset(kPaw).relations)
    if (rel == Relation::holonym && target == kDog) found = true;
  CHECK(found);
}

TEST_CASE("load rejects an empty synset file") {
  fs::path dir = write_lexicon("", "");
  CHECK_THROWS_WITH_AS(Lexicon::load_fixture(dir),
                       doctest::Contains("empty lexicon"), LexiconError);
}

TEST_CASE("load rejects a relation to a missing synset") {
  fs::path dir = write_lexicon("0001-n\tn\thypernym=9999-n\n", "");
  CHECK_THROWS_WITH_AS(Lexicon::load_fixture(dir),
                       doctest::Contains("missing synset"), LexiconError);
}

TEST_CASE("load rejects duplicate synset ids and bad language tags") {
  CHECK_THROWS_WITH_AS(
      Lexicon::load_fixture(write_lexicon("0001-n\tn\n0001-n\tn\n", "")),
      doctest::Contains("duplicate synset"), LexiconError);
  CHECK_THROWS_WITH_AS(
      Lexicon::load_fixture(write_lexicon("0001-n\tn\n", "0001-n\tEN\tdog\n")),
      doctest::Contains("language tag"), LexiconError);
}

TEST_CASE("missing fixture directory fails as an i/o error") {
  CHECK_THROWS_AS(Lexicon::load_fixture("/nonexistent/lexicon"), IoError);
}

TEST_CASE("tab-file ingest merges languages onto the core") {
  Lexicon lex = Lexicon::load_omw_tab(
      omw_dir() / "core", {omw_dir() / "cmn.tab", omw_dir() / "spa.tab"},
      /*strict=*/false);
  CHECK(lex.languages() == std::set<std::string>{"cmn", "eng", "spa"});
  CHECK(lex.synsets_for("狗", "cmn") == std::set<std::string>{kDog});
  CHECK(lex.skipped_lines() == 1);
  // the duplicated lemma line collapses to one entry
  CHECK(lex.lemmas(kDog, "cmn") == std::vector<std::string>{"狗"});
}

TEST_CASE("strict tab-file ingest reports the malformed line") {
  CHECK_THROWS_WITH_AS(
      Lexicon::load_omw_tab(omw_dir() / "core", {omw_dir() / "spa.tab"},
                            /*strict=*/true),
      doctest::Contains("spa.tab line 13"), LexiconError);
}

TEST_CASE("core without tab files is English-only") {
  Lexicon lex = Lexicon::load_omw_tab(omw_dir() / "core", {});
  CHECK(lex.languages() == std::set<std::string>{"eng"});
  CHECK(lex.synset_count() == 12);
}

TEST_CASE("lemma lookup is shared across languages of one synset") {
  const Lexicon& lex = fixture();
  CHECK(lex.synsets_for("dog", "eng") == std::set<std::string>{kDog});
  CHECK(lex.synsets_for("狗", "cmn") == std::set<std::string>{kDog});
  CHECK(lex.synsets_for("perro", "spa") == std::set<std::string>{kDog});
  CHECK(lex.synsets_for("unicorn", "eng").empty());
  CHECK_THROWS_WITH_AS(lex.synsets_for("dog", "deu"),
                       doctest::Contains("unknown language"), LexiconError);
}

TEST_CASE("lookup folds case and composes decomposed accents") {
  const Lexicon& lex = fixture();
  CHECK(lex.synsets_for("DOG", "eng") == std::set<std::string>{kDog});
  // "cría" typed with a combining accent instead of the precomposed í
  CHECK(lex.synsets_for("cría", "spa") == std::set<std::string>{kPuppy});
}

TEST_CASE("polysemous lemma maps to both senses") {
  const Lexicon& lex = fixture();
  CHECK(lex.synsets_for("bank", "eng") ==
        std::set<std::string>{kBankMoney, kBankRiver});
}

TEST_CASE("path similarity follows the hypernym graph") {
  const Lexicon& lex = fixture();
  CHECK(lex.path_similarity(kDog, kDog) == 1.0);
  CHECK(lex.path_similarity(kDog, kCanine) == 0.5);
  CHECK(lex.path_similarity(kDog, kMammal) == 1.0 / 3);
  CHECK(lex.path_similarity(kDog, kAnimal) == 0.25);
  CHECK(lex.path_similarity(kDog, kCat) == 0.2);
  CHECK(lex.path_similarity(kDog, kKitten) == 1.0 / 6);
  CHECK(lex.path_similarity(kCat, kDog) == lex.path_similarity(kDog, kCat));
}

TEST_CASE("part-whole edges do not create similarity") {
  const Lexicon& lex = fixture();
  CHECK(lex.path_similarity(kDog, kPaw) == 0.0);
  CHECK(lex.path_similarity(kBankMoney, kBankRiver) == 0.0);
  CHECK(lex.path_similarity(kBankMoney, kDog) == 0.0);
}

TEST_CASE("similarity rejects unknown synsets") {
  CHECK_THROWS_AS(fixture().path_similarity(kDog, "12345678-n"), LexiconError);
}

TEST_CASE("neighbors at threshold one are empty") {
  CHECK(fixture().semantic_neighbors(kDog, 1.0).empty());
}

TEST_CASE("neighbors at one half are exactly the distance-one synsets") {
  auto got = fixture().semantic_neighbors(kDog, 0.5);
  REQUIRE(got.size() == 3);
  // equal similarity orders by id
  CHECK(got[0] == std::pair<std::string, double>{kPet, 0.5});
  CHECK(got[1] == std::pair<std::string, double>{kPuppy, 0.5});
  CHECK(got[2] == std::pair<std::string, double>{kCanine, 0.5});
}

TEST_CASE("lowering the threshold only adds neighbors") {
  const Lexicon& lex = fixture();
  auto tight = lex.semantic_neighbors(kDog, 0.5);
  auto loose = lex.semantic_neighbors(kDog, 0.2);
  REQUIRE(loose.size() == 7);
  CHECK(loose[3].first == kMammal);
  CHECK(loose[6] == std::pair<std::string, double>{kCat, 0.2});
  std::set<std::string> loose_ids;
  for (const auto& [id, sim] : loose) loose_ids.insert(id);
  for (const auto& [id, sim] : tight) CHECK(loose_ids.count(id) == 1);
  // part-whole-only and disconnected synsets never extend
  CHECK(loose_ids.count(kPaw) == 0);
  CHECK(loose_ids.count(kBankMoney) == 0);
}

TEST_CASE("neighbor threshold bounds are enforced") {
  CHECK_THROWS_AS(fixture().semantic_neighbors(kDog, 0.0), ValidationError);
  CHECK_THROWS_AS(fixture().semantic_neighbors(kDog, 1.5), ValidationError);
  CHECK_THROWS_AS(fixture().semantic_neighbors("str-n", 0.5), LexiconError);
}

TEST_CASE("query spec validation catches shape and range errors") {
  QuerySpec good = dog_query();
  good.validate();

  QuerySpec spec = good;
  spec.keywords.clear();
  spec.keyword_scores.clear();
  CHECK_THROWS_AS(spec.validate(), ValidationError);

  spec = good;
  spec.keyword_scores = {2, 9};
  CHECK_THROWS_AS(spec.validate(), ValidationError);

  spec = good;
  spec.threshold = 0.0;
  CHECK_THROWS_AS(spec.validate(), ValidationError);
  spec.threshold = 1.01;
  CHECK_THROWS_AS(spec.validate(), ValidationError);

  spec = good;
  spec.keyword_scores = {0};
  CHECK_THROWS_AS(spec.validate(), ValidationError);
  spec.keyword_scores = {101};
  CHECK_THROWS_AS(spec.validate(), ValidationError);

  spec = good;
  spec.languages = {"eng", "eng"};
  spec.language_scores = {3, 1};
  CHECK_THROWS_WITH_AS(spec.validate(), doctest::Contains("duplicate"),
                       ValidationError);

  spec = good;
  spec.languages = {"ENG", "cmn"};
  CHECK_THROWS_AS(spec.validate(), ValidationError);
}

TEST_CASE("synonym replacement query builds one group per language") {
  ExtendedQuery q = build_target_query(fixture(), dog_query());
  CHECK(q.warnings.empty());
  REQUIRE(q.blocks.size() == 2);

  const LanguageBlock& eng = q.blocks[0];
  CHECK(eng.language == "eng");
  REQUIRE(eng.groups.size() == 1);
  CHECK(eng.groups[0].synset_id == kDog);
  CHECK(eng.groups[0].lemmas == std::vector<std::string>{"dog", "hound"});
  CHECK(eng.groups[0].eta == 6000);
  CHECK(eng.groups[0].provenance == Provenance::direct);

  const LanguageBlock& cmn = q.blocks[1];
  CHECK(cmn.language == "cmn");
  REQUIRE(cmn.groups.size() == 1);
  CHECK(cmn.groups[0].lemmas == std::vector<std::string>{"狗"});
  CHECK(cmn.groups[0].eta == 2000);
}

TEST_CASE("halving the threshold adds the distance-one groups") {
  QuerySpec spec = dog_query();
  spec.threshold = 0.5;
  ExtendedQuery q = build_target_query(fixture(), spec);

  const LanguageBlock& eng = q.blocks[0];
  REQUIRE(eng.groups.size() == 4);
  CHECK(eng.groups[0].synset_id == kDog);
  CHECK(eng.groups[0].eta == 6000);
  // three extended groups at eta 2*3*round(1000*0.5), ordered by id
  for (int i = 1; i < 4; ++i) {
    CHECK(eng.groups[i].eta == 3000);
    CHECK(eng.groups[i].provenance == Provenance::extended);
  }
  CHECK(eng.groups[1].synset_id == kPet);
  CHECK(eng.groups[2].synset_id == kPuppy);
  CHECK(eng.groups[3].synset_id == kCanine);

  CHECK(q.blocks[1].groups.size() == 4);
  CHECK(q.blocks[1].groups[0].eta == 2000);
  CHECK(q.blocks[1].groups[1].eta == 1000);
}

TEST_CASE("extension eta uses the rounded scaled similarity") {
  QuerySpec spec = dog_query();
  spec.threshold = 0.2;
  spec.keyword_scores = {7};
  ExtendedQuery q = build_target_query(fixture(), spec);

  const SynonymGroup* mammal = find_group(q.blocks[0], kMammal);
  REQUIRE(mammal != nullptr);
  CHECK(mammal->eta == 7u * 3 * 333);  // round(1000/3)
  const SynonymGroup* cat = find_group(q.blocks[0], kCat);
  REQUIRE(cat != nullptr);
  CHECK(cat->eta == 7u * 3 * 200);
}

TEST_CASE("two synonyms of one synset reduce to a single group") {
  QuerySpec spec = dog_query();
  spec.keywords = {"dog", "hound"};
  spec.keyword_scores = {2, 5};
  ExtendedQuery q = build_target_query(fixture(), spec);
  REQUIRE(q.blocks[0].groups.size() == 1);
  // the keyword with the higher preference wins the duplicate
  CHECK(q.blocks[0].groups[0].eta == 5u * 3 * 1000);
}

TEST_CASE("polysemous query keeps senses disjoint after reduction") {
  QuerySpec spec = dog_query();
  spec.keywords = {"bank"};
  ExtendedQuery q = build_target_query(fixture(), spec);

  const LanguageBlock& eng = q.blocks[0];
  REQUIRE(eng.groups.size() == 2);
  // equal eta: the lower synset id claims the shared lemma
  CHECK(eng.groups[0].synset_id == kBankMoney);
  CHECK(eng.groups[0].lemmas == std::vector<std::string>{"bank", "lender"});
  CHECK(eng.groups[1].synset_id == kBankRiver);
  CHECK(eng.groups[1].lemmas == std::vector<std::string>{"shore"});

  CHECK(q.blocks[1].groups.size() == 2);
}

TEST_CASE("groups without lemmas in a target language are dropped") {
  QuerySpec spec = dog_query();
  spec.languages = {"spa", "eng"};
  spec.language_scores = {2, 1};
  spec.threshold = 1.0 / 3;
  ExtendedQuery q = build_target_query(fixture(), spec);

  // mammal (distance 2) has no Spanish lemma but does have an English one
  CHECK(find_group(q.blocks[0], kMammal) == nullptr);
  CHECK(find_group(q.blocks[1], kMammal) != nullptr);
  CHECK(find_group(q.blocks[0], kPuppy) != nullptr);
}

TEST_CASE("unresolvable keyword becomes an exact-match group at home") {
  QuerySpec spec = dog_query();
  spec.keywords = {"dog", "Blorp"};
  spec.keyword_scores = {2, 4};
  ExtendedQuery q = build_target_query(fixture(), spec);

  REQUIRE(q.warnings.size() == 1);
  CHECK(q.warnings[0].find("Blorp") != std::string::npos);
  const SynonymGroup* literal = find_group(q.blocks[0], "literal:blorp");
  REQUIRE(literal != nullptr);
  CHECK(literal->lemmas == std::vector<std::string>{"blorp"});
  CHECK(literal->eta == 4u * 3 * 1000);
  // no literal group outside the source language
  CHECK(find_group(q.blocks[1], "literal:blorp") == nullptr);
}

TEST_CASE("unresolvable keyword is dropped when the source language is absent") {
  QuerySpec spec = dog_query();
  spec.keywords = {"blorp"};
  spec.languages = {"cmn"};
  spec.language_scores = {1};
  CHECK_THROWS_WITH_AS(build_target_query(fixture(), spec),
                       doctest::Contains("no query keyword"), ValidationError);
}

TEST_CASE("queries against unknown languages are rejected") {
  QuerySpec spec = dog_query();
  spec.languages = {"eng", "fra"};
  CHECK_THROWS_AS(build_target_query(fixture(), spec), ValidationError);
  spec = dog_query();
  spec.source_language = "fra";
  CHECK_THROWS_AS(build_target_query(fixture(), spec), ValidationError);
}

TEST_CASE("query construction is deterministic") {
  QuerySpec spec = dog_query();
  spec.threshold = 0.25;
  ExtendedQuery a = build_target_query(fixture(), spec);
  ExtendedQuery b = build_target_query(fixture(), spec);
  REQUIRE(a.blocks.size() == b.blocks.size());
  for (std::size_t i = 0; i < a.blocks.size(); ++i) {
    REQUIRE(a.blocks[i].groups.size() == b.blocks[i].groups.size());
    for (std::size_t j = 0; j < a.blocks[i].groups.size(); ++j) {
      CHECK(a.blocks[i].groups[j].synset_id == b.blocks[i].groups[j].synset_id);
      CHECK(a.blocks[i].groups[j].lemmas == b.blocks[i].groups[j].lemmas);
      CHECK(a.blocks[i].groups[j].eta == b.blocks[i].groups[j].eta);
    }
  }
}
