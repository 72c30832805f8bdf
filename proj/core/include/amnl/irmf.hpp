#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "amnl/tensor.hpp"

namespace amnl {

struct NamedTensor {
  std::string name;
  Shape shape;
  std::vector<double> data;
};

struct IrmfRecord {
  std::string tweet_id;
  std::vector<NamedTensor> tensors;  // feature files carry "conv" and "fc"
};

// features.irmf: little-endian, magic "IRMF", u32 version=1, u32 record
// count; per record: u32 id-length, id bytes, u8 tensor-count, then per
// tensor a record of u8 name-length + name, u32 rank, u32 dims[rank], f32
// data row-major. The reader upcasts f32 -> f64.
void write_irmf(const std::string& path, const std::vector<IrmfRecord>& records);
std::vector<IrmfRecord> read_irmf(const std::string& path);

// Low-level tensor records, shared with the checkpoint format. `wide`
// selects f64 payloads (checkpoints) instead of f32 (feature files).
void write_tensor_record(std::ostream& out, const NamedTensor& t, bool wide);
NamedTensor read_tensor_record(std::istream& in, bool wide);

void write_u32(std::ostream& out, std::uint32_t v);
std::uint32_t read_u32(std::istream& in);
void write_u64(std::ostream& out, std::uint64_t v);
std::uint64_t read_u64(std::istream& in);

}  // namespace amnl
