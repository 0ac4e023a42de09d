#include "crosslex/protocols.hpp"

#include <utility>

#include "crosslex/errors.hpp"

namespace crosslex {

void KeyRegistry::add(const PublicKey& key) {
  if (key.id.empty()) throw ValidationError("public key needs a tag");
  keys_[key.id] = key;
}

const PublicKey& KeyRegistry::get(const std::string& id) const {
  auto it = keys_.find(id);
  if (it == keys_.end()) throw ProtocolError("unknown key tag: " + id);
  return it->second;
}

bool KeyRegistry::has(const std::string& id) const {
  return keys_.count(id) != 0;
}

Frame CspNode::handle(const Frame& request) {
  try {
    return dispatch(request);
  } catch (const Error& e) {
    Frame reply;
    reply.session_id = request.session_id;
    reply.protocol_id = request.protocol_id;
    reply.step = request.step;
    reply.items.push_back(Item::error(e.code(), e.what()));
    return reply;
  }
}

BigNum CspNode::complete(const Ciphertext& ct,
                         const PartialCiphertext& partial) const {
  return partial_decrypt_2_combine(params_, share2_, ct, partial);
}

void CspNode::observe(const Frame& rq, const std::string& label,
                      const BigNum& value) const {
  if (transcript_ != nullptr)
    transcript_->add_local(rq.session_id, rq.protocol_id, rq.step, label,
                           value);
}

Frame CspNode::dispatch(const Frame& rq) {
  Frame reply;
  reply.session_id = rq.session_id;
  reply.protocol_id = rq.protocol_id;
  reply.step = rq.step;

  auto need = [&](std::size_t n) {
    if (rq.items.size() != n) throw ProtocolError("wrong item count");
  };

  switch (static_cast<ProtocolId>(rq.protocol_id)) {
    case ProtocolId::ping: {
      need(0);
      reply.items.push_back(Item::bytes("pong"));
      break;
    }
    case ProtocolId::rekey: {
      need(3);
      Ciphertext blinded = rq.items[0].as_ciphertext();
      BigNum v = complete(blinded, rq.items[1].as_partial());
      observe(rq, "blinded", v);
      const PublicKey& target = registry_.get(rq.items[2].as_key_id());
      reply.items.push_back(
          Item::ciphertext(encrypt(params_, target, v, thread_rng())));
      break;
    }
    case ProtocolId::mul: {
      need(5);
      Ciphertext x = rq.items[0].as_ciphertext();
      Ciphertext y = rq.items[2].as_ciphertext();
      BigNum vx = complete(x, rq.items[1].as_partial());
      BigNum vy = complete(y, rq.items[3].as_partial());
      observe(rq, "blinded", vx);
      observe(rq, "blinded", vy);
      const PublicKey& target = registry_.get(rq.items[4].as_key_id());
      reply.items.push_back(Item::ciphertext(
          encrypt(params_, target, vx.mul_mod(vy, params_.n), thread_rng())));
      break;
    }
    case ProtocolId::eqz: {
      need(3);
      Ciphertext masked = rq.items[0].as_ciphertext();
      BigNum v = complete(masked, rq.items[1].as_partial());
      observe(rq, "blinded", v);
      const PublicKey& target = registry_.get(rq.items[2].as_key_id());
      BigNum bit = v.is_zero() ? BigNum(1) : BigNum(0);
      reply.items.push_back(
          Item::ciphertext(encrypt(params_, target, bit, thread_rng())));
      break;
    }
    case ProtocolId::sign: {
      need(3);
      Ciphertext masked = rq.items[0].as_ciphertext();
      BigNum v = complete(masked, rq.items[1].as_partial());
      observe(rq, "blinded", v);
      const PublicKey& target = registry_.get(rq.items[2].as_key_id());
      BigNum bit = v > params_.half_n ? BigNum(1) : BigNum(0);
      reply.items.push_back(
          Item::ciphertext(encrypt(params_, target, bit, thread_rng())));
      break;
    }
    case ProtocolId::reveal: {
      need(3);
      const std::string& purpose = rq.items[2].as_bytes();
      bool allowed = purpose == kRevealLanguageMatches ||
                     (diagnostic_ok_ && purpose == kRevealDiagnostic);
      if (!allowed) throw ProtocolError("reveal refused: " + purpose);
      Ciphertext ct = rq.items[0].as_ciphertext();
      BigNum v = complete(ct, rq.items[1].as_partial());
      observe(rq, "revealed", v);
      reply.items.push_back(Item::plain(v));
      break;
    }
    default:
      throw ProtocolError("unknown protocol id");
  }
  return reply;
}

CpNode::CpNode(const PublicParams& params, BigNum share1,
               const KeyRegistry& registry, Transport& transport,
               std::uint64_t session_id, unsigned mu)
    : params_(params),
      share1_(std::move(share1)),
      registry_(registry),
      transport_(&transport),
      rng_(&thread_rng()),
      session_id_(session_id),
      mu_(mu) {}

Frame CpNode::exchange(ProtocolId id, std::vector<Item> items) {
  Frame request;
  request.session_id = session_id_;
  request.protocol_id = static_cast<std::uint16_t>(id);
  request.step = step_++;
  request.items = std::move(items);
  if (transcript_ != nullptr)
    transcript_->add_frame(Channel::cp_to_csp, request);
  Frame reply = transport_->round_trip(request);
  ++round_trips_;
  if (transcript_ != nullptr) transcript_->add_frame(Channel::csp_to_cp, reply);
  if (reply.session_id != request.session_id ||
      reply.protocol_id != request.protocol_id || reply.step != request.step)
    throw TransportError("response does not match request");
  if (!reply.items.empty() && reply.items[0].kind == ItemKind::error) {
    auto [code, message] = reply.items[0].as_error();
    throw ProtocolError("helper refused (" + code + "): " + message);
  }
  return reply;
}

Ciphertext CpNode::encrypt_under(const std::string& key_id, const BigNum& m) {
  return encrypt(params_, registry_.get(key_id), m, *rng_);
}

Ciphertext CpNode::neg(const Ciphertext& ct) const {
  return hom_scale(params_, ct, params_.n - BigNum(1));
}

Ciphertext CpNode::expect_ciphertext(const Frame& reply,
                                     const std::string& want_tag) {
  if (reply.items.size() != 1) throw ProtocolError("wrong reply item count");
  Ciphertext ct = reply.items[0].as_ciphertext();
  if (ct.key_tag != want_tag)
    throw ProtocolError("reply under unexpected key: " + ct.key_tag);
  return ct;
}

void CpNode::ping() {
  Frame reply = exchange(ProtocolId::ping, {});
  if (reply.items.size() != 1 || reply.items[0].as_bytes() != "pong")
    throw ProtocolError("bad ping reply");
}

Ciphertext CpNode::to_key(const Ciphertext& ct, const std::string& target_id) {
  BigNum rho = rng_->below(params_.n);
  Ciphertext blinded =
      hom_add(params_, ct, encrypt_under(ct.key_tag, rho));
  PartialCiphertext part = partial_decrypt_1(params_, share1_, blinded);
  Frame reply = exchange(ProtocolId::rekey,
                         {Item::ciphertext(blinded), Item::partial(part),
                          Item::key_id(target_id)});
  Ciphertext rekeyed = expect_ciphertext(reply, target_id);
  BigNum neg_rho = (params_.n - rho).mod(params_.n);
  return hom_add(params_, rekeyed, encrypt_under(target_id, neg_rho));
}

Ciphertext CpNode::add(const Ciphertext& a, const Ciphertext& b,
                       const std::string& joint_id) {
  Ciphertext ja = a.key_tag == joint_id ? a : to_key(a, joint_id);
  Ciphertext jb = b.key_tag == joint_id ? b : to_key(b, joint_id);
  return hom_add(params_, ja, jb);
}

Ciphertext CpNode::multiply(const Ciphertext& a, const Ciphertext& b,
                            const std::string& joint_id) {
  Ciphertext ja = a.key_tag == joint_id ? a : to_key(a, joint_id);
  Ciphertext jb = b.key_tag == joint_id ? b : to_key(b, joint_id);
  return multiply_joint(ja, jb);
}

Ciphertext CpNode::multiply_joint(const Ciphertext& a, const Ciphertext& b) {
  if (a.key_tag != b.key_tag)
    throw ProtocolError("product operands under different keys");
  const std::string& tag = a.key_tag;
  BigNum ra = rng_->below(params_.n);
  BigNum rb = rng_->below(params_.n);
  Ciphertext x = hom_add(params_, a, encrypt_under(tag, ra));
  Ciphertext y = hom_add(params_, b, encrypt_under(tag, rb));
  PartialCiphertext px = partial_decrypt_1(params_, share1_, x);
  PartialCiphertext py = partial_decrypt_1(params_, share1_, y);
  Frame reply = exchange(
      ProtocolId::mul, {Item::ciphertext(x), Item::partial(px),
                        Item::ciphertext(y), Item::partial(py),
                        Item::key_id(tag)});
  Ciphertext prod = expect_ciphertext(reply, tag);
  // (A+ra)(B+rb) - rb*A - ra*B - ra*rb = A*B
  prod = hom_add(params_, prod,
                 hom_scale(params_, a, (params_.n - rb).mod(params_.n)));
  prod = hom_add(params_, prod,
                 hom_scale(params_, b, (params_.n - ra).mod(params_.n)));
  BigNum cross = ra.mul_mod(rb, params_.n);
  return hom_add(params_, prod,
                 encrypt_under(tag, (params_.n - cross).mod(params_.n)));
}

Ciphertext CpNode::equal_bit(const Ciphertext& a, const Ciphertext& b,
                             const std::string& joint_id) {
  Ciphertext ja = a.key_tag == joint_id ? a : to_key(a, joint_id);
  Ciphertext jb = b.key_tag == joint_id ? b : to_key(b, joint_id);
  Ciphertext diff = hom_add(params_, ja, neg(jb));
  BigNum r = rng_->unit_below(params_.n, params_.n);
  Ciphertext masked = hom_scale(params_, diff, r);
  PartialCiphertext part = partial_decrypt_1(params_, share1_, masked);
  Frame reply = exchange(ProtocolId::eqz,
                         {Item::ciphertext(masked), Item::partial(part),
                          Item::key_id(joint_id)});
  return expect_ciphertext(reply, joint_id);
}

Ciphertext CpNode::less_bit(const Ciphertext& a, const Ciphertext& b) {
  if (a.key_tag != b.key_tag)
    throw ProtocolError("comparison operands under different keys");
  if (mu_ + 2 >= params_.bits)
    throw ProtocolError("magnitude bound leaves no blinding room");
  const std::string& tag = a.key_tag;
  bool flip = (rng_->u64() & 1) != 0;
  BigNum two(2);
  BigNum minus_two = params_.n - two;
  // 2(A-B)+1 when not flipped, 2(B-A)-1 when flipped: odd either way, so
  // never zero, and its sign encodes the comparison xor the coin.
  Ciphertext diff =
      flip ? hom_add(params_, hom_scale(params_, b, two),
                     hom_scale(params_, a, minus_two))
           : hom_add(params_, hom_scale(params_, a, two),
                     hom_scale(params_, b, minus_two));
  BigNum unit = flip ? params_.n - BigNum(1) : BigNum(1);
  diff = hom_add(params_, diff, encrypt_under(tag, unit));
  BigNum r = rng_->one_to(BigNum::pow2(params_.bits - mu_ - 2));
  Ciphertext masked = hom_scale(params_, diff, r);
  PartialCiphertext part = partial_decrypt_1(params_, share1_, masked);
  Frame reply = exchange(ProtocolId::sign,
                         {Item::ciphertext(masked), Item::partial(part),
                          Item::key_id(tag)});
  Ciphertext negative_bit = expect_ciphertext(reply, tag);
  if (!flip) return rerandomize(params_, registry_.get(tag), negative_bit,
                                *rng_);
  // Flipped coin: the helper reported A >= B, so return 1 - bit.
  return hom_add(params_, encrypt_under(tag, BigNum(1)), neg(negative_bit));
}

Ciphertext CpNode::select(const Ciphertext& bit, const Ciphertext& a,
                          const Ciphertext& b) {
  if (bit.key_tag != a.key_tag || a.key_tag != b.key_tag)
    throw ProtocolError("select operands under different keys");
  Ciphertext diff = hom_add(params_, a, neg(b));
  Ciphertext picked = multiply_joint(bit, diff);
  return hom_add(params_, picked, b);
}

BigNum CpNode::reveal(const Ciphertext& ct, const std::string& purpose) {
  PartialCiphertext part = partial_decrypt_1(params_, share1_, ct);
  Frame reply = exchange(ProtocolId::reveal,
                         {Item::ciphertext(ct), Item::partial(part),
                          Item::bytes(purpose)});
  if (reply.items.size() != 1) throw ProtocolError("wrong reply item count");
  return reply.items[0].as_plain();
}

}  // namespace crosslex
