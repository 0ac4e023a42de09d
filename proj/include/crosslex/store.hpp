#pragma once

#include <cstdint>
#include <filesystem>

#include "crosslex/index.hpp"

namespace crosslex {

// On-disk document store:
//   root/tuples/00000.rec ...  one record per outsourced document
//   root/blobs/<id>.bin        sealed bodies, named by plaintext id
// Tuple position is the append order; rank ties fall back to it. Blob
// names are not linkable to tuple positions without the decryption keys.
class TupleStore {
 public:
  explicit TupleStore(std::filesystem::path root, bool create = false);

  void append(const OutsourcedTuple& tuple);
  std::size_t size() const { return count_; }

  // Loads one tuple; doc_blob stays empty, bodies are fetched by id.
  OutsourcedTuple tuple(std::size_t position) const;

  std::string blob(std::uint64_t doc_id) const;
  bool has_blob(std::uint64_t doc_id) const;
  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path tuple_path(std::size_t position) const;
  std::filesystem::path blob_path(std::uint64_t doc_id) const;

  std::filesystem::path root_;
  std::size_t count_ = 0;
};

}  // namespace crosslex
