#include "crosslex/store.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "crosslex/errors.hpp"
#include "crosslex/serial.hpp"

namespace crosslex {

TupleStore::TupleStore(std::filesystem::path root, bool create)
    : root_(std::move(root)) {
  namespace fs = std::filesystem;
  fs::path tuples = root_ / "tuples";
  if (create) {
    fs::create_directories(tuples);
    fs::create_directories(root_ / "blobs");
  } else if (!fs::is_directory(tuples)) {
    throw IoError("no tuple store at " + root_.string());
  }
  std::size_t max_index = 0;
  for (const auto& entry : fs::directory_iterator(tuples)) {
    if (entry.path().extension() != ".rec") continue;
    ++count_;
    std::size_t index = std::stoull(entry.path().stem().string());
    max_index = std::max(max_index, index + 1);
  }
  if (max_index != count_)
    throw IoError("tuple store at " + root_.string() + " has gaps");
}

std::filesystem::path TupleStore::tuple_path(std::size_t position) const {
  std::ostringstream name;
  name << std::setw(5) << std::setfill('0') << position << ".rec";
  return root_ / "tuples" / name.str();
}

std::filesystem::path TupleStore::blob_path(std::uint64_t doc_id) const {
  return root_ / "blobs" / (std::to_string(doc_id) + ".bin");
}

void TupleStore::append(const OutsourcedTuple& tuple) {
  if (has_blob(tuple.doc_id))
    throw ValidationError("store already holds document id " +
                          std::to_string(tuple.doc_id));
  Record rec("crosslex-tuple");
  rec.put("entries", static_cast<std::uint64_t>(tuple.index.size()));
  for (std::size_t i = 0; i < tuple.index.size(); ++i) {
    rec.put("word" + std::to_string(i), ciphertext_text(tuple.index[i].word));
    rec.put("weight" + std::to_string(i),
            ciphertext_text(tuple.index[i].weight));
  }
  rec.put("id", ciphertext_text(tuple.enc_id));
  rec.put("keyseed", ciphertext_text(tuple.enc_keyseed));
  rec.put("lang", ciphertext_text(tuple.enc_lang));
  rec.save(tuple_path(count_));
  std::ofstream blob(blob_path(tuple.doc_id), std::ios::binary);
  if (!blob) throw IoError("cannot write " + blob_path(tuple.doc_id).string());
  blob.write(tuple.doc_blob.data(),
             static_cast<std::streamsize>(tuple.doc_blob.size()));
  ++count_;
}

OutsourcedTuple TupleStore::tuple(std::size_t position) const {
  if (position >= count_)
    throw ValidationError("tuple position " + std::to_string(position) +
                          " out of range");
  Record rec = Record::load(tuple_path(position), "crosslex-tuple");
  OutsourcedTuple out;
  std::uint64_t entries = rec.get_u64("entries");
  for (std::uint64_t i = 0; i < entries; ++i) {
    IndexEntry entry;
    entry.word = ciphertext_from_text(rec.get("word" + std::to_string(i)));
    entry.weight = ciphertext_from_text(rec.get("weight" + std::to_string(i)));
    out.index.push_back(std::move(entry));
  }
  out.enc_id = ciphertext_from_text(rec.get("id"));
  out.enc_keyseed = ciphertext_from_text(rec.get("keyseed"));
  out.enc_lang = ciphertext_from_text(rec.get("lang"));
  return out;
}

std::string TupleStore::blob(std::uint64_t doc_id) const {
  std::ifstream in(blob_path(doc_id), std::ios::binary);
  if (!in)
    throw IoError("no stored document with id " + std::to_string(doc_id));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool TupleStore::has_blob(std::uint64_t doc_id) const {
  return std::filesystem::exists(blob_path(doc_id));
}

}  // namespace crosslex
