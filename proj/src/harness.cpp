#include "crosslex/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "crosslex/errors.hpp"
#include "crosslex/index.hpp"
#include "crosslex/serial.hpp"

namespace crosslex {

namespace {

std::string trim(const std::string& s) {
  std::size_t lo = 0, hi = s.size();
  while (lo < hi && std::isspace(static_cast<unsigned char>(s[lo]))) ++lo;
  while (hi > lo && std::isspace(static_cast<unsigned char>(s[hi - 1]))) --hi;
  return s.substr(lo, hi - lo);
}

unsigned long parse_unsigned(const std::string& value, const std::string& key) {
  if (value.empty() ||
      !std::all_of(value.begin(), value.end(),
                   [](unsigned char c) { return std::isdigit(c); }))
    throw ParseError("config key '" + key + "' needs an unsigned integer, " +
                     "got '" + value + "'");
  return std::stoul(value);
}

std::uint64_t next_session_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1);
}

}  // namespace

void Config::validate() const {
  if (bits < 16) throw ValidationError("bits must be at least 16");
  if (scale == 0) throw ValidationError("scale must be positive");
  if (!(threshold > 0.0 && threshold <= 1.0))
    throw ValidationError("threshold must be in (0, 1]");
  if (mu == 0 || mu + 2 >= bits)
    throw ValidationError(
        "mu must be positive and leave blinding room: mu + 2 < bits");
  if (mode != "in-process" && mode != "two-socket")
    throw ValidationError("mode must be in-process or two-socket");
  if (host.empty()) throw ValidationError("host must not be empty");
}

Config parse_config(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    std::size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ParseError("config line " + std::to_string(line_no) +
                       ": expected key=value");
    std::string key = trim(stripped.substr(0, eq));
    std::string value = trim(stripped.substr(eq + 1));
    if (key == "bits") {
      cfg.bits = static_cast<unsigned>(parse_unsigned(value, key));
    } else if (key == "scale") {
      cfg.scale = parse_unsigned(value, key);
    } else if (key == "threshold") {
      try {
        std::size_t used = 0;
        cfg.threshold = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
      } catch (const std::exception&) {
        throw ParseError("config key 'threshold' needs a number, got '" +
                         value + "'");
      }
    } else if (key == "mu") {
      cfg.mu = static_cast<unsigned>(parse_unsigned(value, key));
    } else if (key == "mode") {
      cfg.mode = value;
    } else if (key == "host") {
      cfg.host = value;
    } else if (key == "port") {
      unsigned long port = parse_unsigned(value, key);
      if (port > 65535)
        throw ParseError("config key 'port' out of range: " + value);
      cfg.port = static_cast<std::uint16_t>(port);
    } else {
      throw ParseError("unknown config key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

Config load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot read " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

Frame FailableTransport::round_trip(const Frame& request) {
  if (dead_) throw TransportError("helper server is gone");
  return inner_->round_trip(request);
}

KeyMaterial generate_key_material(const Config& config, Rng& rng) {
  config.validate();
  KeyMaterial keys;
  auto [params, strong] = keygen(config.bits, rng);
  keys.params = std::move(params);
  keys.strong = std::move(strong);
  keys.shares = split_strong_key(keys.params, keys.strong, rng);
  keys.owner = user_keygen(keys.params, "owner", rng);
  keys.user = user_keygen(keys.params, "user", rng);
  return keys;
}

void save_key_material(const std::filesystem::path& dir,
                       const KeyMaterial& keys) {
  std::filesystem::create_directories(dir);
  save_params(dir / "params.rec", keys.params);
  save_strong_key(dir / "strong.rec", keys.strong);
  save_share(dir / "share-platform.rec", "platform", keys.shares.share1);
  save_share(dir / "share-helper.rec", "helper", keys.shares.share2);
  save_user_key(dir / "owner.rec", keys.owner);
  save_user_key(dir / "user.rec", keys.user);
}

KeyMaterial load_key_material(const std::filesystem::path& dir) {
  KeyMaterial keys;
  keys.params = load_params(dir / "params.rec");
  keys.strong = load_strong_key(dir / "strong.rec");
  keys.shares.share1 = load_share(dir / "share-platform.rec", "platform");
  keys.shares.share2 = load_share(dir / "share-helper.rec", "helper");
  keys.owner = load_user_key(dir / "owner.rec");
  keys.user = load_user_key(dir / "user.rec");
  return keys;
}

Deployment::Deployment(const Config& config, KeyMaterial keys)
    : config_(config), keys_(std::move(keys)) {
  config_.validate();
  joint_ = joint_key(keys_.params, keys_.owner.pk, keys_.user.pk);
  registry_.add(keys_.owner.pk);
  registry_.add(keys_.user.pk);
  registry_.add(joint_);
  csp_ = std::make_unique<CspNode>(keys_.params, keys_.shares.share2,
                                   registry_);
  if (config_.mode == "two-socket") {
    server_ = std::make_unique<TcpServer>(config_.port, *csp_);
    server_thread_ = std::thread([this] { server_->serve(); });
    link_ = std::make_unique<TcpTransport>(config_.host, server_->port());
  } else {
    link_ = std::make_unique<LocalTransport>(*csp_);
  }
  guard_ = std::make_unique<FailableTransport>(*link_);
  cp_ = std::make_unique<CpNode>(keys_.params, keys_.shares.share1, registry_,
                                 *guard_, next_session_id(), config_.mu);
  cp_->ping();
}

void Deployment::kill_helper() {
  guard_->kill();
  if (server_) {
    server_->stop();
    // Closing the client socket unblocks the connection handler so the
    // serve loop can notice the stop request.
    link_.reset();
    if (server_thread_.joinable()) server_thread_.join();
    server_.reset();
  }
}

Deployment::~Deployment() {
  if (server_) {
    server_->stop();
    link_.reset();
    if (server_thread_.joinable()) server_thread_.join();
  }
}

std::vector<OracleHit> oracle_rank(const std::vector<OracleDoc>& docs,
                                   const ExtendedQuery& query, unsigned k) {
  if (k == 0) throw ValidationError("result count must be positive");
  struct Scored {
    std::uint64_t id;
    std::uint64_t score;
    std::size_t position;
  };
  std::vector<Scored> scored;
  for (const OracleDoc& doc : docs) {
    std::size_t matching_blocks = 0;
    for (const LanguageBlock& block : query.blocks)
      if (block.language == doc.lang) ++matching_blocks;
    if (matching_blocks == 0) continue;
    if (matching_blocks > 1)
      throw ValidationError("query blocks repeat language " + doc.lang);
    std::uint64_t score = 0;
    for (const LanguageBlock& block : query.blocks)
      for (const SynonymGroup& group : block.groups)
        for (const std::string& word : group.lemmas)
          for (const WeightedKeyword& wk : doc.keywords)
            if (wk.keyword == word) score += wk.weight * group.eta;
    scored.push_back({doc.id, score, doc.position});
  }
  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.position < b.position;
  });
  std::vector<OracleHit> hits;
  for (std::size_t i = 0; i < scored.size() && i < k; ++i)
    hits.push_back({scored[i].id, scored[i].score});
  return hits;
}

void generate_corpus(const std::filesystem::path& dir, const Lexicon& lexicon,
                     const GenSpec& spec) {
  if (spec.documents == 0) throw ValidationError("no documents requested");
  if (spec.languages.empty()) throw ValidationError("no languages requested");
  if (spec.min_words == 0 || spec.min_words > spec.max_words)
    throw ValidationError("bad word count range");
  std::filesystem::create_directories(dir);
  Rng rng(spec.seed);

  std::map<std::string, std::vector<std::string>> pools;
  for (const std::string& lang : spec.languages) {
    if (lexicon.languages().find(lang) == lexicon.languages().end())
      throw ValidationError("language '" + lang + "' not in the lexicon");
    std::vector<std::string> pool;
    for (const std::string& lemma : lexicon.all_lemmas(lang))
      if (keyword_units(lemma) <= spec.max_word_units) pool.push_back(lemma);
    // Per-language filler tokens spread the document frequencies out.
    for (int i = 0; i < 10; ++i) pool.push_back(lang + std::to_string(i));
    pools[lang] = std::move(pool);
  }

  std::ofstream manifest(dir / "manifest.tsv");
  if (!manifest) throw IoError("cannot write " + (dir / "manifest.tsv").string());
  manifest << "# generated corpus: id, language, file\n";
  for (std::size_t i = 0; i < spec.documents; ++i) {
    const std::string& lang = spec.languages[i % spec.languages.size()];
    const auto& pool = pools[lang];
    std::size_t count =
        spec.min_words + rng.u64() % (spec.max_words - spec.min_words + 1);
    std::ostringstream body;
    for (std::size_t w = 0; w < count; ++w) {
      if (w) body << ' ';
      body << pool[rng.u64() % pool.size()];
    }
    body << '\n';
    std::string name = "doc" + std::to_string(i + 1) + ".txt";
    std::ofstream doc(dir / name, std::ios::binary);
    if (!doc) throw IoError("cannot write " + (dir / name).string());
    doc << body.str();
    manifest << (i + 1) << '\t' << lang << '\t' << name << '\n';
  }
}

FitResult linear_fit(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2)
    throw ValidationError("need at least two points to fit a line");
  double n = static_cast<double>(points.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : points) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double denom = n * sxx - sx * sx;
  if (denom == 0) throw ValidationError("x values must not be constant");
  FitResult fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  double mean_y = sy / n;
  double ss_res = 0, ss_tot = 0;
  for (const auto& [x, y] : points) {
    double predicted = fit.slope * x + fit.intercept;
    ss_res += (y - predicted) * (y - predicted);
    ss_tot += (y - mean_y) * (y - mean_y);
  }
  fit.r2 = ss_tot == 0 ? (ss_res == 0 ? 1.0 : 0.0) : 1.0 - ss_res / ss_tot;
  return fit;
}

}  // namespace crosslex
