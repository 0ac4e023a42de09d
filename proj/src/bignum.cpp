#include "crosslex/bignum.hpp"

#include <cctype>
#include <random>

#include "crosslex/errors.hpp"

namespace crosslex {

BigNum BigNum::from_hex(std::string_view hex) {
  if (hex.empty()) throw ParseError("empty hex integer");
  for (char c : hex) {
    if (!std::isxdigit(static_cast<unsigned char>(c)))
      throw ParseError("bad hex digit in integer: " + std::string(hex));
  }
  BigNum r;
  mpz_set_str(r.v_, std::string(hex).c_str(), 16);
  return r;
}

BigNum BigNum::from_dec(std::string_view dec) {
  BigNum r;
  if (mpz_set_str(r.v_, std::string(dec).c_str(), 10) != 0)
    throw ParseError("bad decimal integer: " + std::string(dec));
  return r;
}

BigNum BigNum::from_bytes(const std::vector<uint8_t>& be) {
  BigNum r;
  if (!be.empty()) mpz_import(r.v_, be.size(), 1, 1, 0, 0, be.data());
  return r;
}

BigNum BigNum::from_u64(uint64_t value) {
  BigNum r;
  mpz_set_ui(r.v_, value);
  return r;
}

BigNum BigNum::pow2(unsigned bits) {
  BigNum r;
  mpz_setbit(r.v_, bits);
  return r;
}

std::string BigNum::to_hex() const {
  if (is_negative()) throw CryptoError("refusing to serialize negative value");
  char* s = mpz_get_str(nullptr, 16, v_);
  std::string out(s);
  void (*freefn)(void*, size_t);
  mp_get_memory_functions(nullptr, nullptr, &freefn);
  freefn(s, out.size() + 1);
  return out;
}

std::string BigNum::to_dec() const {
  char* s = mpz_get_str(nullptr, 10, v_);
  std::string out(s);
  void (*freefn)(void*, size_t);
  mp_get_memory_functions(nullptr, nullptr, &freefn);
  freefn(s, out.size() + 1);
  return out;
}

std::vector<uint8_t> BigNum::to_bytes() const {
  if (is_negative()) throw CryptoError("refusing to serialize negative value");
  if (is_zero()) return {};
  size_t count = 0;
  std::vector<uint8_t> out((bit_length() + 7) / 8);
  mpz_export(out.data(), &count, 1, 1, 0, 0, v_);
  out.resize(count);
  return out;
}

uint64_t BigNum::to_u64() const {
  if (is_negative() || bit_length() > 64) throw CryptoError("value out of u64 range");
  uint64_t lo = mpz_get_ui(v_);
  if (mpz_sizeinbase(v_, 2) > 8 * sizeof(unsigned long)) {
    mpz_t t;
    mpz_init(t);
    mpz_fdiv_q_2exp(t, v_, 32);
    lo |= static_cast<uint64_t>(mpz_get_ui(t)) << 32;
    mpz_clear(t);
  }
  return lo;
}

long BigNum::to_long() const {
  if (!mpz_fits_slong_p(v_)) throw CryptoError("value out of long range");
  return mpz_get_si(v_);
}

BigNum BigNum::operator+(const BigNum& o) const {
  BigNum r;
  mpz_add(r.v_, v_, o.v_);
  return r;
}

BigNum BigNum::operator-(const BigNum& o) const {
  BigNum r;
  mpz_sub(r.v_, v_, o.v_);
  return r;
}

BigNum BigNum::operator*(const BigNum& o) const {
  BigNum r;
  mpz_mul(r.v_, v_, o.v_);
  return r;
}

BigNum BigNum::operator/(const BigNum& o) const {
  if (o.is_zero()) throw CryptoError("division by zero");
  BigNum r;
  mpz_tdiv_q(r.v_, v_, o.v_);
  return r;
}

BigNum BigNum::operator-() const {
  BigNum r;
  mpz_neg(r.v_, v_);
  return r;
}

BigNum BigNum::mod(const BigNum& m) const {
  if (m.sign() <= 0) throw CryptoError("modulus must be positive");
  BigNum r;
  mpz_mod(r.v_, v_, m.v_);
  return r;
}

BigNum BigNum::mul_mod(const BigNum& o, const BigNum& m) const {
  BigNum r;
  mpz_mul(r.v_, v_, o.v_);
  mpz_mod(r.v_, r.v_, m.v_);
  return r;
}

BigNum BigNum::powm(const BigNum& e, const BigNum& m) const {
  if (e.is_negative()) throw CryptoError("negative exponent");
  BigNum r;
  mpz_powm(r.v_, v_, e.v_, m.v_);
  return r;
}

BigNum BigNum::invmod(const BigNum& m) const {
  BigNum r;
  if (mpz_invert(r.v_, v_, m.v_) == 0)
    throw CryptoError("element not invertible modulo " + m.to_hex());
  return r;
}

BigNum BigNum::gcd(const BigNum& o) const {
  BigNum r;
  mpz_gcd(r.v_, v_, o.v_);
  return r;
}

BigNum BigNum::lcm(const BigNum& o) const {
  BigNum r;
  mpz_lcm(r.v_, v_, o.v_);
  return r;
}

Rng::Rng() {
  gmp_randinit_mt(state_);
  std::random_device rd;
  uint64_t seed = (static_cast<uint64_t>(rd()) << 32) ^ rd();
  gmp_randseed_ui(state_, seed);
}

Rng::Rng(uint64_t seed) {
  gmp_randinit_mt(state_);
  gmp_randseed_ui(state_, seed);
}

Rng::~Rng() { gmp_randclear(state_); }

BigNum Rng::below(const BigNum& bound) {
  if (bound.sign() <= 0) throw CryptoError("random bound must be positive");
  BigNum r;
  mpz_urandomm(r.raw(), state_, bound.raw());
  return r;
}

BigNum Rng::one_to(const BigNum& bound) { return below(bound) + BigNum(1); }

BigNum Rng::bits(unsigned n) {
  BigNum r;
  mpz_urandomb(r.raw(), state_, n);
  return r;
}

uint64_t Rng::u64() { return bits(64).to_u64(); }

BigNum Rng::unit_below(const BigNum& bound, const BigNum& modulus) {
  for (;;) {
    BigNum r = one_to(bound - BigNum(1));
    if (r.gcd(modulus).is_one()) return r;
  }
}

Rng& thread_rng() {
  thread_local Rng rng;
  return rng;
}

}  // namespace crosslex
