#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "crosslex/crypto.hpp"

namespace crosslex {

// Structured text records: first line `<type> v1`, then one `key value`
// pair per line. Big integers use the canonical hex encoding.
class Record {
 public:
  Record(std::string type, int version = 1)
      : type_(std::move(type)), version_(version) {}

  void put(const std::string& key, const std::string& value);
  void put(const std::string& key, const BigNum& value);
  void put(const std::string& key, uint64_t value);

  const std::string& get(const std::string& key) const;
  BigNum get_bignum(const std::string& key) const;
  uint64_t get_u64(const std::string& key) const;
  std::optional<std::string> maybe(const std::string& key) const;

  const std::string& type() const { return type_; }
  int version() const { return version_; }

  std::string to_text() const;
  static Record parse(const std::string& text, const std::string& want_type);

  static Record load(const std::filesystem::path& file,
                     const std::string& want_type);
  void save(const std::filesystem::path& file) const;

 private:
  std::string type_;
  int version_;
  std::vector<std::pair<std::string, std::string>> fields_;
};

// Key material files. None of these embed the factorization; the strong
// key record is the key authority's archive and is read only by
// test-mode tooling.
void save_params(const std::filesystem::path& file, const PublicParams& p);
PublicParams load_params(const std::filesystem::path& file);

void save_strong_key(const std::filesystem::path& file, const StrongKey& k);
StrongKey load_strong_key(const std::filesystem::path& file);

void save_share(const std::filesystem::path& file, const std::string& role,
                const BigNum& share);
BigNum load_share(const std::filesystem::path& file, const std::string& role);

void save_user_key(const std::filesystem::path& file, const UserKeyPair& kp);
UserKeyPair load_user_key(const std::filesystem::path& file);

std::string ciphertext_text(const Ciphertext& ct);
Ciphertext ciphertext_from_text(const std::string& text);

}  // namespace crosslex
