#pragma once

#include <gmp.h>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace crosslex {

// Arbitrary-precision integer with value semantics over GMP.
//
// Canonical serialization everywhere in the project: lowercase hex,
// big-endian, no leading zeros ("0" for zero). Negative values never
// appear on disk or on the wire; they exist only transiently in signed
// arithmetic.
class BigNum {
 public:
  BigNum() { mpz_init(v_); }
  BigNum(long value) { mpz_init_set_si(v_, value); }  // NOLINT(runtime/explicit)
  BigNum(const BigNum& o) { mpz_init_set(v_, o.v_); }
  BigNum(BigNum&& o) noexcept {
    mpz_init(v_);
    mpz_swap(v_, o.v_);
  }
  BigNum& operator=(const BigNum& o) {
    if (this != &o) mpz_set(v_, o.v_);
    return *this;
  }
  BigNum& operator=(BigNum&& o) noexcept {
    if (this != &o) mpz_swap(v_, o.v_);
    return *this;
  }
  ~BigNum() { mpz_clear(v_); }

  static BigNum from_hex(std::string_view hex);
  static BigNum from_dec(std::string_view dec);
  static BigNum from_bytes(const std::vector<uint8_t>& be);
  static BigNum from_u64(uint64_t value);
  static BigNum pow2(unsigned bits);

  std::string to_hex() const;
  std::string to_dec() const;
  // Big-endian minimal encoding; empty for zero.
  std::vector<uint8_t> to_bytes() const;
  uint64_t to_u64() const;
  long to_long() const;

  size_t bit_length() const { return is_zero() ? 0 : mpz_sizeinbase(v_, 2); }
  bool is_zero() const { return mpz_sgn(v_) == 0; }
  bool is_one() const { return mpz_cmp_ui(v_, 1) == 0; }
  bool is_odd() const { return mpz_odd_p(v_) != 0; }
  bool is_negative() const { return mpz_sgn(v_) < 0; }
  int sign() const { return mpz_sgn(v_); }

  BigNum operator+(const BigNum& o) const;
  BigNum operator-(const BigNum& o) const;
  BigNum operator*(const BigNum& o) const;
  BigNum operator/(const BigNum& o) const;  // truncating
  BigNum operator-() const;

  // Always reduces into [0, m).
  BigNum mod(const BigNum& m) const;
  BigNum mul_mod(const BigNum& o, const BigNum& m) const;
  BigNum powm(const BigNum& e, const BigNum& m) const;
  // Throws CryptoError when no inverse exists.
  BigNum invmod(const BigNum& m) const;
  BigNum gcd(const BigNum& o) const;
  BigNum lcm(const BigNum& o) const;

  bool is_probab_prime(int reps = 30) const {
    return mpz_probab_prime_p(v_, reps) != 0;
  }

  auto operator<=>(const BigNum& o) const {
    int c = mpz_cmp(v_, o.v_);
    return c <=> 0;
  }
  bool operator==(const BigNum& o) const { return mpz_cmp(v_, o.v_) == 0; }

  mpz_srcptr raw() const { return v_; }
  mpz_ptr raw() { return v_; }

 private:
  mpz_t v_;
};

// Random source. Not a hardened CSPRNG; the threat model here is
// honest-but-curious protocol parties, and key/blinding material only
// needs statistical uniformity. Seeded from the OS entropy pool unless
// an explicit seed is given (tests, benchmarks).
class Rng {
 public:
  Rng();
  explicit Rng(uint64_t seed);
  Rng(const Rng&) = delete;
  Rng& operator=(const Rng&) = delete;
  ~Rng();

  // Uniform in [0, bound); bound must be positive.
  BigNum below(const BigNum& bound);
  // Uniform in [1, bound]; bound must be positive.
  BigNum one_to(const BigNum& bound);
  // Uniform in [0, 2^bits).
  BigNum bits(unsigned bits);
  uint64_t u64();
  // Uniform element of [1, bound) coprime to modulus.
  BigNum unit_below(const BigNum& bound, const BigNum& modulus);

 private:
  gmp_randstate_t state_;
};

// Per-thread generator used for encryption nonces and protocol blinding.
Rng& thread_rng();

}  // namespace crosslex
