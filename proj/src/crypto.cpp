#include "crosslex/crypto.hpp"

#include <algorithm>

#include "crosslex/errors.hpp"

namespace crosslex {
namespace {

constexpr int kPrimeReps = 30;
constexpr unsigned kMaxPrimeAttempts = 4'000'000;

// Random safe prime p = 2p'+1 with p' prime, exactly `bits` bits.
BigNum safe_prime(unsigned bits, Rng& rng) {
  for (unsigned i = 0; i < kMaxPrimeAttempts; ++i) {
    // draw p' of bits-1 bits; the two top bits are forced so p has
    // exactly `bits` bits and a product of two such primes has exactly
    // 2*bits (keyword capacity depends on the modulus length)
    BigNum cand = rng.bits(bits - 1);
    mpz_setbit(cand.raw(), bits - 2);
    mpz_setbit(cand.raw(), bits - 3);
    mpz_setbit(cand.raw(), 0);
    if (!cand.is_probab_prime(kPrimeReps)) continue;
    BigNum p = cand + cand + BigNum(1);
    if (p.bit_length() != bits) continue;
    if (p.is_probab_prime(kPrimeReps)) return p;
  }
  throw CryptoError("safe prime generation exceeded attempt budget");
}

BigNum derive_generator(const BigNum& n, const BigNum& n_sq, const BigNum& a) {
  // g = -a^{2n} mod n^2
  BigNum g = (n_sq - a.powm(n + n, n_sq)).mod(n_sq);
  return g;
}

void check_order_property(const BigNum& g, const BigNum& lambda,
                          const BigNum& n_sq) {
  if (!g.powm(lambda, n_sq).is_one())
    throw CryptoError("generator order check failed: g^lambda != 1 mod n^2");
}

BigNum l_function(const BigNum& x, const BigNum& n) {
  BigNum shifted = x - BigNum(1);
  if (!shifted.mod(n).is_zero())
    throw CryptoError("malformed decryption argument (wrong key or corrupt ciphertext)");
  return shifted / n;
}

}  // namespace

PublicParams PublicParams::make(BigNum n, BigNum g, unsigned bits) {
  PublicParams p;
  p.n_sq = n * n;
  p.half_n = n / BigNum(2);
  p.n = std::move(n);
  p.g = std::move(g);
  p.bits = bits;
  return p;
}

std::pair<PublicParams, StrongKey> keygen(unsigned bits, Rng& rng) {
  if (bits < 16) throw ValidationError("security bit length must be >= 16");
  for (;;) {
    BigNum p = safe_prime(bits, rng);
    BigNum q = safe_prime(bits, rng);
    if (p == q) continue;
    BigNum n = p * q;
    BigNum lambda = (p - BigNum(1)).lcm(q - BigNum(1));
    // degenerate overlap between a prime and the other's Sophie Germain
    // half would break the split; redraw
    if (!lambda.gcd(n).is_one()) continue;
    BigNum n_sq = n * n;
    for (int tries = 0; tries < 64; ++tries) {
      BigNum a = rng.below(n_sq);
      if (a.sign() <= 0 || !a.gcd(n).is_one()) continue;
      BigNum g = derive_generator(n, n_sq, a);
      if (g.is_one()) continue;
      if (!g.powm(lambda, n_sq).is_one()) continue;  // regenerate a
      return {PublicParams::make(std::move(n), std::move(g), bits),
              StrongKey{std::move(lambda)}};
    }
  }
}

std::pair<PublicParams, StrongKey> params_from_primes(const BigNum& p,
                                                      const BigNum& q,
                                                      const BigNum& a) {
  if (!p.is_probab_prime() || !q.is_probab_prime() || p == q)
    throw ValidationError("need two distinct primes");
  BigNum n = p * q;
  BigNum lambda = (p - BigNum(1)).lcm(q - BigNum(1));
  if (!lambda.gcd(n).is_one())
    throw CryptoError("corrupt parameters: gcd(lambda, n) != 1");
  BigNum n_sq = n * n;
  BigNum g = derive_generator(n, n_sq, a);
  check_order_property(g, lambda, n_sq);
  unsigned bits = static_cast<unsigned>(std::max(p.bit_length(), q.bit_length()));
  return {PublicParams::make(std::move(n), std::move(g), bits),
          StrongKey{std::move(lambda)}};
}

StrongKeyShares split_strong_key(const PublicParams& params,
                                 const StrongKey& key, Rng& rng) {
  const BigNum& lambda = key.lambda;
  const BigNum& n = params.n;
  if (!lambda.gcd(n).is_one())
    throw CryptoError("corrupt parameters: gcd(lambda, n) != 1");
  // sigma = 0 mod lambda, = 1 mod n, via CRT
  BigNum modulus = lambda * n;
  BigNum sigma = (lambda * lambda.invmod(n)).mod(modulus);
  BigNum share1 = rng.one_to(modulus - BigNum(1));
  BigNum share2 = (sigma - share1).mod(modulus);
  return {std::move(share1), std::move(share2)};
}

UserKeyPair user_keygen(const PublicParams& params, const std::string& id,
                        Rng& rng) {
  BigNum sk = rng.one_to(params.n / BigNum(4));
  return user_key_from_secret(params, id, sk);
}

UserKeyPair user_key_from_secret(const PublicParams& params,
                                 const std::string& id, const BigNum& sk) {
  if (sk.sign() <= 0) throw ValidationError("secret exponent must be positive");
  UserKeyPair kp;
  kp.sk = sk;
  kp.pk = PublicKey{id, params.g.powm(sk, params.n_sq)};
  return kp;
}

std::string joint_key_id(const std::string& a, const std::string& b) {
  return a < b ? a + "+" + b : b + "+" + a;
}

JointPublicKey joint_key(const PublicParams& params, const PublicKey& a,
                         const PublicKey& b) {
  JointPublicKey jk;
  jk.pk = PublicKey{joint_key_id(a.id, b.id), a.value.mul_mod(b.value, params.n_sq)};
  jk.left_id = a.id;
  jk.right_id = b.id;
  return jk;
}

Ciphertext encrypt(const PublicParams& params, const PublicKey& pk,
                   const BigNum& m, Rng& rng) {
  if (m.is_negative() || m >= params.n)
    throw CryptoError("plaintext out of range [0, n)");
  BigNum r = rng.one_to(params.n / BigNum(4));
  Ciphertext ct;
  ct.c1 = pk.value.powm(r, params.n_sq)
              .mul_mod(BigNum(1) + m * params.n, params.n_sq);
  ct.c2 = params.g.powm(r, params.n_sq);
  ct.key_tag = pk.id;
  return ct;
}

BigNum decrypt_weak(const PublicParams& params, const BigNum& sk,
                    const Ciphertext& ct) {
  BigNum denom = ct.c2.powm(sk, params.n_sq).invmod(params.n_sq);
  return l_function(ct.c1.mul_mod(denom, params.n_sq), params.n);
}

BigNum decrypt_strong(const PublicParams& params, const StrongKey& key,
                      const Ciphertext& ct) {
  BigNum arg = ct.c1.powm(key.lambda, params.n_sq);
  BigNum l = l_function(arg, params.n);
  return l.mul_mod(key.lambda.invmod(params.n), params.n);
}

PartialCiphertext partial_decrypt_1(const PublicParams& params,
                                    const BigNum& share1,
                                    const Ciphertext& ct) {
  return {ct.c1.powm(share1, params.n_sq)};
}

BigNum partial_decrypt_2_combine(const PublicParams& params,
                                 const BigNum& share2, const Ciphertext& ct,
                                 const PartialCiphertext& partial) {
  BigNum combined =
      ct.c1.powm(share2, params.n_sq).mul_mod(partial.value, params.n_sq);
  return l_function(combined, params.n);
}

Ciphertext hom_add(const PublicParams& params, const Ciphertext& a,
                   const Ciphertext& b) {
  if (a.key_tag != b.key_tag)
    throw CryptoError("homomorphic add across different keys: " + a.key_tag +
                      " vs " + b.key_tag);
  return {a.c1.mul_mod(b.c1, params.n_sq), a.c2.mul_mod(b.c2, params.n_sq),
          a.key_tag};
}

Ciphertext hom_scale(const PublicParams& params, const Ciphertext& ct,
                     const BigNum& c) {
  if (c.is_negative() || c >= params.n)
    throw CryptoError("scalar out of range [0, n)");
  return {ct.c1.powm(c, params.n_sq), ct.c2.powm(c, params.n_sq), ct.key_tag};
}

Ciphertext rerandomize(const PublicParams& params, const PublicKey& pk,
                       const Ciphertext& ct, Rng& rng) {
  if (pk.id != ct.key_tag) throw CryptoError("rerandomize under wrong key");
  return hom_add(params, ct, encrypt(params, pk, BigNum(0), rng));
}

BigNum to_signed(const PublicParams& params, const BigNum& raw) {
  if (raw.is_negative() || raw >= params.n)
    throw CryptoError("residue out of range [0, n)");
  if (raw > params.half_n) return raw - params.n;
  return raw;
}

BigNum from_signed(const PublicParams& params, const BigNum& value) {
  BigNum mag = value.is_negative() ? -value : value;
  if (mag > params.half_n) throw CryptoError("signed magnitude overflow");
  return value.mod(params.n);
}

}  // namespace crosslex
