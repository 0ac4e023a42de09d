#include "crosslex/serial.hpp"

#include <fstream>
#include <sstream>

#include "crosslex/errors.hpp"

namespace crosslex {

void Record::put(const std::string& key, const std::string& value) {
  fields_.emplace_back(key, value);
}

void Record::put(const std::string& key, const BigNum& value) {
  fields_.emplace_back(key, value.to_hex());
}

void Record::put(const std::string& key, uint64_t value) {
  fields_.emplace_back(key, std::to_string(value));
}

const std::string& Record::get(const std::string& key) const {
  for (const auto& [k, v] : fields_)
    if (k == key) return v;
  throw ParseError("record field missing: " + key);
}

BigNum Record::get_bignum(const std::string& key) const {
  return BigNum::from_hex(get(key));
}

uint64_t Record::get_u64(const std::string& key) const {
  return std::stoull(get(key));
}

std::optional<std::string> Record::maybe(const std::string& key) const {
  for (const auto& [k, v] : fields_)
    if (k == key) return v;
  return std::nullopt;
}

std::string Record::to_text() const {
  std::ostringstream out;
  out << type_ << " v" << version_ << "\n";
  for (const auto& [k, v] : fields_) out << k << " " << v << "\n";
  return out.str();
}

Record Record::parse(const std::string& text, const std::string& want_type) {
  std::istringstream in(text);
  std::string header;
  if (!std::getline(in, header)) throw ParseError("empty record");
  auto sp = header.rfind(" v");
  if (sp == std::string::npos) throw ParseError("bad record header: " + header);
  std::string type = header.substr(0, sp);
  if (type != want_type)
    throw ParseError("expected record type " + want_type + ", got " + type);
  int version = std::stoi(header.substr(sp + 2));
  Record rec(type, version);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cut = line.find(' ');
    if (cut == std::string::npos)
      throw ParseError("bad record line: " + line);
    rec.put(line.substr(0, cut), line.substr(cut + 1));
  }
  return rec;
}

Record Record::load(const std::filesystem::path& file,
                    const std::string& want_type) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), want_type);
}

void Record::save(const std::filesystem::path& file) const {
  std::ofstream out(file);
  if (!out) throw IoError("cannot write " + file.string());
  out << to_text();
}

void save_params(const std::filesystem::path& file, const PublicParams& p) {
  Record rec("crosslex-params");
  rec.put("bits", static_cast<uint64_t>(p.bits));
  rec.put("n", p.n);
  rec.put("g", p.g);
  rec.save(file);
}

PublicParams load_params(const std::filesystem::path& file) {
  Record rec = Record::load(file, "crosslex-params");
  return PublicParams::make(rec.get_bignum("n"), rec.get_bignum("g"),
                            static_cast<unsigned>(rec.get_u64("bits")));
}

void save_strong_key(const std::filesystem::path& file, const StrongKey& k) {
  Record rec("crosslex-strong-key");
  rec.put("lambda", k.lambda);
  rec.save(file);
}

StrongKey load_strong_key(const std::filesystem::path& file) {
  Record rec = Record::load(file, "crosslex-strong-key");
  return {rec.get_bignum("lambda")};
}

void save_share(const std::filesystem::path& file, const std::string& role,
                const BigNum& share) {
  Record rec("crosslex-key-share");
  rec.put("role", role);
  rec.put("share", share);
  rec.save(file);
}

BigNum load_share(const std::filesystem::path& file, const std::string& role) {
  Record rec = Record::load(file, "crosslex-key-share");
  if (rec.get("role") != role)
    throw ValidationError("share file " + file.string() + " is for role " +
                          rec.get("role") + ", expected " + role);
  return rec.get_bignum("share");
}

void save_user_key(const std::filesystem::path& file, const UserKeyPair& kp) {
  Record rec("crosslex-user-key");
  rec.put("id", kp.pk.id);
  rec.put("sk", kp.sk);
  rec.put("pk", kp.pk.value);
  rec.save(file);
}

UserKeyPair load_user_key(const std::filesystem::path& file) {
  Record rec = Record::load(file, "crosslex-user-key");
  UserKeyPair kp;
  kp.pk = PublicKey{rec.get("id"), rec.get_bignum("pk")};
  kp.sk = rec.get_bignum("sk");
  return kp;
}

std::string ciphertext_text(const Ciphertext& ct) {
  return ct.key_tag + ":" + ct.c1.to_hex() + ":" + ct.c2.to_hex();
}

Ciphertext ciphertext_from_text(const std::string& text) {
  // Split from the right: hex never contains ':' but a key tag might.
  auto second = text.rfind(':');
  if (second == std::string::npos || second == 0)
    throw ParseError("bad ciphertext text");
  auto first = text.rfind(':', second - 1);
  if (first == std::string::npos)
    throw ParseError("bad ciphertext text");
  Ciphertext ct;
  ct.key_tag = text.substr(0, first);
  ct.c1 = BigNum::from_hex(text.substr(first + 1, second - first - 1));
  ct.c2 = BigNum::from_hex(text.substr(second + 1));
  return ct;
}

}  // namespace crosslex
