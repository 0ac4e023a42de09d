#pragma once

#include <string>
#include <utility>

#include "crosslex/bignum.hpp"

namespace crosslex {

// Additively homomorphic public-key cryptosystem with a double trapdoor:
// every user key decrypts its own ciphertexts, while one master exponent
// decrypts ciphertexts under any registered key and splits into two
// shares for two-server partial decryption.

struct PublicParams {
  BigNum n;        // composite modulus, product of two safe primes
  BigNum g;        // group generator in Z_{n^2}
  unsigned bits;   // bit length of each prime factor
  BigNum n_sq;     // cached n^2
  BigNum half_n;   // cached floor(n/2), signed-encoding threshold

  static PublicParams make(BigNum n, BigNum g, unsigned bits);
};

struct StrongKey {
  BigNum lambda;  // lcm(p-1, q-1)
};

// Additive sharing of the strong key: share1 + share2 = 0 (mod lambda)
// and = 1 (mod n), so the two partial exponentiations compose to a full
// decryption while neither share decrypts alone.
struct StrongKeyShares {
  BigNum share1;  // held by the platform server
  BigNum share2;  // held by the helper server
};

struct PublicKey {
  std::string id;  // key tag carried on every ciphertext
  BigNum value;    // g^sk mod n^2 (or a product of such for joint keys)
};

struct UserKeyPair {
  PublicKey pk;
  BigNum sk;  // uniform in [1, n/4]
};

// Product of two user keys; decryptable only via the strong key path.
struct JointPublicKey {
  PublicKey pk;
  std::string left_id;
  std::string right_id;
};

struct Ciphertext {
  BigNum c1;  // pk^r (1 + m*n) mod n^2
  BigNum c2;  // g^r mod n^2
  std::string key_tag;
};

struct PartialCiphertext {
  BigNum value;  // c1^share mod n^2
};

// Generates fresh parameters from two random safe primes of `bits` bits
// each and returns the strong key; the primes themselves are discarded.
// Requires bits >= 16.
std::pair<PublicParams, StrongKey> keygen(unsigned bits, Rng& rng);

// Builds parameters from fixed primes. Test entry point for tiny
// hand-checkable parameter sets; skips the safe-prime requirement but
// still verifies the generator order property.
std::pair<PublicParams, StrongKey> params_from_primes(const BigNum& p,
                                                      const BigNum& q,
                                                      const BigNum& a);

StrongKeyShares split_strong_key(const PublicParams& params,
                                 const StrongKey& key, Rng& rng);

UserKeyPair user_keygen(const PublicParams& params, const std::string& id,
                        Rng& rng);
// Deterministic variant for tests with a chosen secret exponent.
UserKeyPair user_key_from_secret(const PublicParams& params,
                                 const std::string& id, const BigNum& sk);

JointPublicKey joint_key(const PublicParams& params, const PublicKey& a,
                         const PublicKey& b);
// Canonical id a joint key gets; order of the components is irrelevant.
std::string joint_key_id(const std::string& a, const std::string& b);

Ciphertext encrypt(const PublicParams& params, const PublicKey& pk,
                   const BigNum& m, Rng& rng);

BigNum decrypt_weak(const PublicParams& params, const BigNum& sk,
                    const Ciphertext& ct);
BigNum decrypt_strong(const PublicParams& params, const StrongKey& key,
                      const Ciphertext& ct);

PartialCiphertext partial_decrypt_1(const PublicParams& params,
                                    const BigNum& share1,
                                    const Ciphertext& ct);
BigNum partial_decrypt_2_combine(const PublicParams& params,
                                 const BigNum& share2, const Ciphertext& ct,
                                 const PartialCiphertext& partial);

// Component-wise product; decrypts to the sum mod n. Key tags must match.
Ciphertext hom_add(const PublicParams& params, const Ciphertext& a,
                   const Ciphertext& b);
// Component-wise power; decrypts to c*m mod n. c = n-1 realizes negation.
Ciphertext hom_scale(const PublicParams& params, const Ciphertext& ct,
                     const BigNum& c);
// Fresh-randomness re-encryption of the same plaintext (adds an
// encryption of zero).
Ciphertext rerandomize(const PublicParams& params, const PublicKey& pk,
                       const Ciphertext& ct, Rng& rng);

// Bijection between Z_n and (-n/2, n/2): residues above n/2 read as
// negatives. Comparison protocols rely on it for score differences.
BigNum to_signed(const PublicParams& params, const BigNum& raw);
BigNum from_signed(const PublicParams& params, const BigNum& value);

}  // namespace crosslex
