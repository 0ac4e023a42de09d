#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "crosslex/engine.hpp"
#include "crosslex/lexicon.hpp"
#include "crosslex/protocols.hpp"
#include "crosslex/store.hpp"
#include "crosslex/transport.hpp"

namespace crosslex {

// Runtime settings, loadable from a key=value file. Unknown keys fail
// the load so typos do not silently fall back to defaults.
struct Config {
  unsigned bits = 64;           // prime length; modulus is twice that
  std::uint64_t scale = 1000;   // fixed-point score scale
  double threshold = 1.0;       // default query extension cutoff
  unsigned mu = 48;             // signed magnitude bound for comparisons
  std::string mode = "in-process";  // or "two-socket"
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;       // 0 picks an ephemeral port

  void validate() const;
};

Config parse_config(const std::string& text);
Config load_config(const std::filesystem::path& file);

// Forwards to an inner transport until kill() cuts the link.
class FailableTransport : public Transport {
 public:
  explicit FailableTransport(Transport& inner) : inner_(&inner) {}
  void kill() { dead_ = true; }
  bool alive() const { return !dead_; }
  Frame round_trip(const Frame& request) override;

 private:
  Transport* inner_;
  bool dead_ = false;
};

// Key material layout inside a key directory.
struct KeyMaterial {
  PublicParams params;
  StrongKey strong;
  StrongKeyShares shares;
  UserKeyPair owner;
  UserKeyPair user;
};

KeyMaterial generate_key_material(const Config& config, Rng& rng);
void save_key_material(const std::filesystem::path& dir,
                       const KeyMaterial& keys);
KeyMaterial load_key_material(const std::filesystem::path& dir);

// Both servers of the two-party computation plus the platform-side
// protocol node, wired per the configured mode. In two-socket mode the
// helper listens on a loopback TCP port in a background thread and is
// pinged once before use.
class Deployment {
 public:
  Deployment(const Config& config, KeyMaterial keys);
  ~Deployment();
  Deployment(const Deployment&) = delete;
  Deployment& operator=(const Deployment&) = delete;

  const Config& config() const { return config_; }
  const PublicParams& params() const { return keys_.params; }
  const KeyMaterial& keys() const { return keys_; }
  const JointPublicKey& joint() const { return joint_; }
  const KeyRegistry& registry() const { return registry_; }

  CpNode& platform() { return *cp_; }
  CspNode& helper() { return *csp_; }

  // Cuts the platform-to-helper link; in two-socket mode the listener
  // is shut down as well. Queries in flight fail with TransportError.
  void kill_helper();
  bool helper_alive() const { return guard_->alive(); }

 private:
  Config config_;
  KeyMaterial keys_;
  JointPublicKey joint_;
  KeyRegistry registry_;
  std::unique_ptr<CspNode> csp_;
  std::unique_ptr<TcpServer> server_;
  std::thread server_thread_;
  std::unique_ptr<Transport> link_;
  std::unique_ptr<FailableTransport> guard_;
  std::unique_ptr<CpNode> cp_;
};

// Plaintext mirror of one stored document, for reference ranking.
struct OracleDoc {
  std::uint64_t id = 0;
  std::string lang;
  std::vector<WeightedKeyword> keywords;
  std::size_t position = 0;  // store append order
};

struct OracleHit {
  std::uint64_t id = 0;
  std::uint64_t score = 0;
};

// Reference ranking computed entirely on plaintext: language filter,
// exact word matches weighted by document weight times group score,
// score-descending order with earlier positions winning ties, top k.
std::vector<OracleHit> oracle_rank(const std::vector<OracleDoc>& docs,
                                   const ExtendedQuery& query, unsigned k);

// Synthetic corpus: documents cycle through the listed languages, each
// body sampling that language's lexicon lemmas plus per-language filler
// tokens so document frequencies vary.
struct GenSpec {
  std::size_t documents = 32;
  std::vector<std::string> languages = {"eng", "cmn", "spa"};
  std::size_t min_words = 6;
  std::size_t max_words = 18;
  std::size_t max_word_units = 7;  // keep lemmas encodable at 64-bit primes
  std::uint64_t seed = 1;
};

void generate_corpus(const std::filesystem::path& dir, const Lexicon& lexicon,
                     const GenSpec& spec);

struct FitResult {
  double slope = 0;
  double intercept = 0;
  double r2 = 0;
};

// Least-squares line through (x, y) points; r2 is 1 for a perfect fit.
FitResult linear_fit(const std::vector<std::pair<double, double>>& points);

}  // namespace crosslex
