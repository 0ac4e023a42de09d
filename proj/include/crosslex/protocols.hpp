#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "crosslex/crypto.hpp"
#include "crosslex/transport.hpp"

namespace crosslex {

// Directory of public keys known to both servers, keyed by tag. Joint
// keys are entered under their canonical combined id.
class KeyRegistry {
 public:
  void add(const PublicKey& key);
  void add(const JointPublicKey& key) { add(key.pk); }
  const PublicKey& get(const std::string& id) const;
  bool has(const std::string& id) const;

 private:
  std::map<std::string, PublicKey> keys_;
};

// Reveal purposes the helper server honors. Anything else is refused.
inline constexpr char kRevealLanguageMatches[] = "language-match-count";
// Joint decryption of arbitrary values; only for offline inspection
// tooling, never enabled in a serving deployment.
inline constexpr char kRevealDiagnostic[] = "diagnostic";

// Helper server: holds the second strong-key share, answers one-round
// protocol requests, sees only blinded values plus deliberate reveals.
// handle() is safe to call from several threads at once.
class CspNode : public FrameHandler {
 public:
  CspNode(PublicParams params, BigNum share2, KeyRegistry registry)
      : params_(std::move(params)),
        share2_(std::move(share2)),
        registry_(std::move(registry)) {}

  void allow_diagnostic_reveals(bool allowed) { diagnostic_ok_ = allowed; }
  void set_transcript(Transcript* transcript) { transcript_ = transcript; }

  Frame handle(const Frame& request) override;

 private:
  Frame dispatch(const Frame& request);
  // Finishes a two-share decryption started by the platform server.
  BigNum complete(const Ciphertext& ct, const PartialCiphertext& partial) const;
  void observe(const Frame& rq, const std::string& label,
               const BigNum& value) const;

  PublicParams params_;
  BigNum share2_;
  KeyRegistry registry_;
  bool diagnostic_ok_ = false;
  Transcript* transcript_ = nullptr;
};

// Platform-server endpoint of the protocol suite. Drives every exchange:
// blinds operands, ships partial decryptions, post-processes replies.
// One instance per session; not thread safe (sessions run in parallel by
// giving each its own CpNode over its own transport).
class CpNode {
 public:
  // mu bounds the magnitude (in bits) of signed values fed to
  // comparisons; blinding room requires mu + 2 < params.bits.
  CpNode(const PublicParams& params, BigNum share1, const KeyRegistry& registry,
         Transport& transport, std::uint64_t session_id, unsigned mu);

  void set_transcript(Transcript* transcript) { transcript_ = transcript; }
  // Tests inject a seeded generator; default is the per-thread one.
  void set_rng(Rng* rng) { rng_ = rng; }

  const PublicParams& params() const { return params_; }
  const KeyRegistry& registry() const { return registry_; }
  unsigned mu() const { return mu_; }

  void ping();

  // Re-keys a ciphertext to the target key, plaintext preserved. One
  // round trip. Serves both directions: user key to joint key before
  // computing, joint key back to a user key when handing out results.
  Ciphertext to_key(const Ciphertext& ct, const std::string& target_id);

  // Sum under the joint key; operands are re-keyed as needed.
  Ciphertext add(const Ciphertext& a, const Ciphertext& b,
                 const std::string& joint_id);
  // Product under the joint key; operands are re-keyed as needed.
  Ciphertext multiply(const Ciphertext& a, const Ciphertext& b,
                      const std::string& joint_id);
  // Product when both operands already sit under the same key.
  Ciphertext multiply_joint(const Ciphertext& a, const Ciphertext& b);

  // Equality bit: decrypts to 1 iff the plaintexts are equal. Exact for
  // all inputs. The helper server observes the (blinded) zero/nonzero
  // outcome; callers mask which pair was compared by permuting call
  // order.
  Ciphertext equal_bit(const Ciphertext& a, const Ciphertext& b,
                       const std::string& joint_id);

  // Strict signed comparison: decrypts to 1 iff A < B. Both operands
  // must sit under the same key and be bounded by 2^mu in magnitude.
  Ciphertext less_bit(const Ciphertext& a, const Ciphertext& b);

  // Oblivious select: decrypts to A when bit=1, B when bit=0. A bit
  // plaintext outside {0,1} yields garbage undetected.
  Ciphertext select(const Ciphertext& bit, const Ciphertext& a,
                    const Ciphertext& b);

  // Joint decryption. Both servers learn the value; the helper refuses
  // purposes outside its whitelist.
  BigNum reveal(const Ciphertext& ct, const std::string& purpose);

  std::uint64_t round_trips() const { return round_trips_; }
  std::uint64_t messages() const { return 2 * round_trips_; }

 private:
  Frame exchange(ProtocolId id, std::vector<Item> items);
  Ciphertext encrypt_under(const std::string& key_id, const BigNum& m);
  Ciphertext neg(const Ciphertext& ct) const;
  Ciphertext expect_ciphertext(const Frame& reply, const std::string& want_tag);

  const PublicParams& params_;
  BigNum share1_;
  const KeyRegistry& registry_;
  Transport* transport_;
  Transcript* transcript_ = nullptr;
  Rng* rng_;
  std::uint64_t session_id_;
  std::uint16_t step_ = 0;
  std::uint64_t round_trips_ = 0;
  unsigned mu_;
};

}  // namespace crosslex
