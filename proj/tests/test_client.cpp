#include "crosslex/client.hpp"

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "crosslex/errors.hpp"
#include "crosslex/index.hpp"
#include "crosslex/lexicon.hpp"
#include "crosslex/serial.hpp"
#include "doctest.h"

using namespace crosslex;
namespace fs = std::filesystem;

namespace {

struct Keys {
  PublicParams params;
  StrongKey strong;
  UserKeyPair owner;
  UserKeyPair user;
  Rng rng{31337};

  Keys() {
    Rng setup(801);
    auto [p, s] = keygen(64, setup);
    params = p;
    strong = s;
    owner = user_keygen(params, "owner", setup);
    user = user_keygen(params, "user", setup);
  }
};

Keys& keys() {
  static Keys k;
  return k;
}

BigNum user_dec(const Ciphertext& ct) {
  return decrypt_weak(keys().params, keys().user.sk, ct);
}

const Lexicon& lexicon() {
  static Lexicon lex =
      Lexicon::load_fixture(fs::path(CROSSLEX_FIXTURE_DIR) / "lexicon");
  return lex;
}

ExtendedQuery dog_query(double threshold) {
  QuerySpec spec;
  spec.keywords = {"dog"};
  spec.keyword_scores = {2};
  spec.languages = {"eng", "cmn"};
  spec.language_scores = {3, 1};
  spec.threshold = threshold;
  spec.source_language = "eng";
  return build_target_query(lexicon(), spec);
}

fs::path fresh_dir(const std::string& stem) {
  static int counter = 0;
  fs::path dir = fs::temp_directory_path() /
                 (stem + "-" + std::to_string(::getpid()) + "-" +
                  std::to_string(counter++));
  fs::create_directories(dir);
  return dir;
}

std::set<std::string> cipher_parts(const Trapdoor& td) {
  std::set<std::string> parts;
  auto note = [&](const Ciphertext& ct) {
    parts.insert(ct.c1.to_hex());
    parts.insert(ct.c2.to_hex());
  };
  for (const TrapdoorBlock& block : td.blocks) {
    note(block.enc_lang);
    for (const TrapdoorGroup& group : block.groups) {
      for (const Ciphertext& word : group.words) note(word);
      note(group.eta);
    }
  }
  return parts;
}

}  // namespace

TEST_CASE("trapdoor mirrors the expanded query under the user key") {
  auto& k = keys();
  ExtendedQuery query = dog_query(0.5);
  Trapdoor td = generate_trapdoor(k.params, k.user.pk, query, 3, k.rng);
  CHECK(td.key_id == "user");
  CHECK(td.k == 3);
  REQUIRE(td.blocks.size() == query.blocks.size());
  for (std::size_t b = 0; b < td.blocks.size(); ++b) {
    const LanguageBlock& want = query.blocks[b];
    const TrapdoorBlock& got = td.blocks[b];
    CHECK(user_dec(got.enc_lang) ==
          keyword_to_integer(k.params, want.language));
    REQUIRE(got.groups.size() == want.groups.size());
    for (std::size_t g = 0; g < got.groups.size(); ++g) {
      REQUIRE(got.groups[g].words.size() == want.groups[g].lemmas.size());
      for (std::size_t w = 0; w < got.groups[g].words.size(); ++w)
        CHECK(user_dec(got.groups[g].words[w]) ==
              keyword_to_integer(k.params, want.groups[g].lemmas[w]));
      CHECK(user_dec(got.groups[g].eta) ==
            BigNum::from_u64(want.groups[g].eta));
    }
  }
}

TEST_CASE("two trapdoors for one query share no ciphertext material") {
  auto& k = keys();
  ExtendedQuery query = dog_query(1.0);
  Trapdoor a = generate_trapdoor(k.params, k.user.pk, query, 5, k.rng);
  Trapdoor b = generate_trapdoor(k.params, k.user.pk, query, 5, k.rng);
  std::set<std::string> pa = cipher_parts(a);
  std::set<std::string> pb = cipher_parts(b);
  for (const std::string& part : pa) CHECK(pb.count(part) == 0);
  // Same shape nonetheless.
  REQUIRE(a.blocks.size() == b.blocks.size());
  for (std::size_t i = 0; i < a.blocks.size(); ++i)
    CHECK(a.blocks[i].groups.size() == b.blocks[i].groups.size());
}

TEST_CASE("trapdoors survive a save/load round trip") {
  auto& k = keys();
  ExtendedQuery query = dog_query(0.5);
  Trapdoor td = generate_trapdoor(k.params, k.user.pk, query, 2, k.rng);
  fs::path file = fresh_dir("crosslex-td") / "query.td";
  save_trapdoor(file, td);
  Trapdoor back = load_trapdoor(file);
  CHECK(back.key_id == td.key_id);
  CHECK(back.k == td.k);
  REQUIRE(back.blocks.size() == td.blocks.size());
  for (std::size_t b = 0; b < back.blocks.size(); ++b) {
    CHECK(user_dec(back.blocks[b].enc_lang) ==
          user_dec(td.blocks[b].enc_lang));
    REQUIRE(back.blocks[b].groups.size() == td.blocks[b].groups.size());
    for (std::size_t g = 0; g < back.blocks[b].groups.size(); ++g) {
      CHECK(user_dec(back.blocks[b].groups[g].eta) ==
            user_dec(td.blocks[b].groups[g].eta));
      REQUIRE(back.blocks[b].groups[g].words.size() ==
              td.blocks[b].groups[g].words.size());
    }
  }
}

TEST_CASE("trapdoor files are validated on load") {
  auto& k = keys();
  Trapdoor td = generate_trapdoor(k.params, k.user.pk, dog_query(1.0), 2,
                                  k.rng);
  fs::path dir = fresh_dir("crosslex-td");
  save_trapdoor(dir / "ok.td", td);

  std::ifstream in(dir / "ok.td");
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  in.close();
  std::string zeroed = text;
  auto pos = zeroed.find("k 2");
  REQUIRE(pos != std::string::npos);
  zeroed.replace(pos, 3, "k 0");
  std::ofstream(dir / "zero.td") << zeroed;
  CHECK_THROWS_AS(load_trapdoor(dir / "zero.td"), ValidationError);
  std::ofstream(dir / "junk.td") << "crosslex-params v1\nn 15\n";
  CHECK_THROWS_AS(load_trapdoor(dir / "junk.td"), ParseError);
  CHECK_THROWS_AS(load_trapdoor(dir / "absent.td"), IoError);
}

TEST_CASE("trapdoor generation rejects unusable requests") {
  auto& k = keys();
  ExtendedQuery query = dog_query(1.0);
  CHECK_THROWS_AS(generate_trapdoor(k.params, k.user.pk, query, 0, k.rng),
                  ValidationError);
  ExtendedQuery empty;
  CHECK_THROWS_AS(generate_trapdoor(k.params, k.user.pk, empty, 1, k.rng),
                  ValidationError);
}

TEST_CASE("oversized query words are dropped with a warning") {
  auto& k = keys();
  ExtendedQuery query;
  LanguageBlock block;
  block.language = "eng";
  block.language_score = 1;
  block.groups.push_back({"literal:waytoolongword",
                          {"waytoolongword"},
                          1000,
                          Provenance::direct});
  block.groups.push_back({"literal:ok", {"ok"}, 1000, Provenance::direct});
  query.blocks.push_back(block);
  std::vector<std::string> warnings;
  Trapdoor td =
      generate_trapdoor(k.params, k.user.pk, query, 1, k.rng, &warnings);
  REQUIRE(td.blocks.size() == 1);
  CHECK(td.blocks[0].groups.size() == 1);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("waytoolongword") != std::string::npos);

  ExtendedQuery hopeless;
  LanguageBlock bad;
  bad.language = "eng";
  bad.language_score = 1;
  bad.groups.push_back({"literal:anotherhugeword",
                        {"anotherhugeword"},
                        1000,
                        Provenance::direct});
  hopeless.blocks.push_back(bad);
  CHECK_THROWS_WITH_AS(
      generate_trapdoor(k.params, k.user.pk, hopeless, 1, k.rng),
      doctest::Contains("no query word fits"), ValidationError);
}

TEST_CASE("result decryption opens the ranked documents in order") {
  auto& k = keys();
  fs::path dir = fresh_dir("crosslex-results");
  TupleStore store(dir, /*create=*/true);
  for (std::uint64_t i = 0; i < 3; ++i) {
    DocumentRecord doc;
    doc.id = 200 + i;
    doc.lang = "eng";
    doc.body = "ranked body " + std::to_string(i);
    doc.keywords = {{"dog", 10 + i}};
    store.append(outsource(k.params, k.owner.pk, doc, k.rng));
  }
  // The engine hands back user-key encryptions of id and key seed; make
  // an equivalent list by hand, ranked 202, 200.
  std::vector<EncryptedMatch> matches;
  for (std::uint64_t id : {202, 200}) {
    OutsourcedTuple tuple = store.tuple(id - 200);
    BigNum seed = decrypt_weak(k.params, k.owner.sk, tuple.enc_keyseed);
    matches.push_back(
        {encrypt(k.params, k.user.pk, BigNum::from_u64(id), k.rng),
         encrypt(k.params, k.user.pk, seed, k.rng)});
  }
  auto docs = decrypt_results(k.params, k.user.sk, matches, store);
  REQUIRE(docs.size() == 2);
  CHECK(docs[0].id == 202);
  CHECK(docs[0].body == "ranked body 2");
  CHECK(docs[0].error.empty());
  CHECK(docs[1].id == 200);
  CHECK(docs[1].body == "ranked body 0");
}

TEST_CASE("one bad hit does not poison the result list") {
  auto& k = keys();
  fs::path dir = fresh_dir("crosslex-results");
  TupleStore store(dir, /*create=*/true);
  DocumentRecord doc;
  doc.id = 300;
  doc.lang = "eng";
  doc.body = "good body";
  doc.keywords = {{"dog", 10}};
  store.append(outsource(k.params, k.owner.pk, doc, k.rng));
  BigNum seed =
      decrypt_weak(k.params, k.owner.sk, store.tuple(0).enc_keyseed);

  auto enc_u64 = [&](std::uint64_t v) {
    return encrypt(k.params, k.user.pk, BigNum::from_u64(v), k.rng);
  };
  std::vector<EncryptedMatch> matches;
  matches.push_back({enc_u64(300), encrypt(k.params, k.user.pk, seed, k.rng)});
  matches.push_back({enc_u64(999), encrypt(k.params, k.user.pk, seed, k.rng)});
  matches.push_back({enc_u64(300), enc_u64(4)});  // wrong key seed
  auto docs = decrypt_results(k.params, k.user.sk, matches, store);
  REQUIRE(docs.size() == 3);
  CHECK(docs[0].error.empty());
  CHECK(docs[0].body == "good body");
  CHECK(docs[1].error.find("no stored document") != std::string::npos);
  CHECK(docs[2].error.find("authentication") != std::string::npos);
  CHECK(docs[2].body.empty());
}
