#include "amnl/irmf.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>

static_assert(std::endian::native == std::endian::little,
              "serialization assumes a little-endian host");
static_assert(sizeof(float) == 4 && sizeof(double) == 8);

namespace amnl {

namespace {

constexpr char kFeatureMagic[4] = {'I', 'R', 'M', 'F'};
constexpr std::uint32_t kFeatureVersion = 1;

void write_bytes(std::ostream& out, const void* p, std::size_t n) {
  out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
  if (!out) throw std::runtime_error("irmf: write failed");
}

void read_bytes(std::istream& in, void* p, std::size_t n) {
  in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
  if (in.gcount() != static_cast<std::streamsize>(n)) {
    throw std::runtime_error("irmf: truncated file");
  }
}

void write_u8(std::ostream& out, std::uint8_t v) { write_bytes(out, &v, 1); }

std::uint8_t read_u8(std::istream& in) {
  std::uint8_t v = 0;
  read_bytes(in, &v, 1);
  return v;
}

}  // namespace

void write_u32(std::ostream& out, std::uint32_t v) { write_bytes(out, &v, 4); }

std::uint32_t read_u32(std::istream& in) {
  std::uint32_t v = 0;
  read_bytes(in, &v, 4);
  return v;
}

void write_u64(std::ostream& out, std::uint64_t v) { write_bytes(out, &v, 8); }

std::uint64_t read_u64(std::istream& in) {
  std::uint64_t v = 0;
  read_bytes(in, &v, 8);
  return v;
}

void write_tensor_record(std::ostream& out, const NamedTensor& t, bool wide) {
  if (t.name.size() > 255) throw std::invalid_argument("tensor name too long");
  write_u8(out, static_cast<std::uint8_t>(t.name.size()));
  write_bytes(out, t.name.data(), t.name.size());
  write_u32(out, static_cast<std::uint32_t>(t.shape.size()));
  std::size_t numel = 1;
  for (std::size_t d : t.shape) {
    write_u32(out, static_cast<std::uint32_t>(d));
    numel *= d;
  }
  if (t.data.size() != numel) {
    throw std::invalid_argument("tensor record data does not match its dims");
  }
  if (wide) {
    write_bytes(out, t.data.data(), 8 * t.data.size());
  } else {
    std::vector<float> narrow(t.data.begin(), t.data.end());
    write_bytes(out, narrow.data(), 4 * narrow.size());
  }
}

NamedTensor read_tensor_record(std::istream& in, bool wide) {
  NamedTensor t;
  std::uint8_t name_len = read_u8(in);
  t.name.resize(name_len);
  read_bytes(in, t.name.data(), name_len);
  std::uint32_t rank = read_u32(in);
  if (rank > 8) throw std::runtime_error("irmf: implausible tensor rank");
  std::size_t numel = 1;
  for (std::uint32_t i = 0; i < rank; ++i) {
    std::uint32_t d = read_u32(in);
    t.shape.push_back(d);
    numel *= d;
  }
  if (numel > (1u << 28)) throw std::runtime_error("irmf: implausible tensor size");
  t.data.resize(numel);
  if (wide) {
    read_bytes(in, t.data.data(), 8 * numel);
  } else {
    std::vector<float> narrow(numel);
    read_bytes(in, narrow.data(), 4 * numel);
    for (std::size_t i = 0; i < numel; ++i) t.data[i] = narrow[i];
  }
  return t;
}

void write_irmf(const std::string& path, const std::vector<IrmfRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_bytes(out, kFeatureMagic, 4);
  write_u32(out, kFeatureVersion);
  write_u32(out, static_cast<std::uint32_t>(records.size()));
  for (const IrmfRecord& rec : records) {
    write_u32(out, static_cast<std::uint32_t>(rec.tweet_id.size()));
    write_bytes(out, rec.tweet_id.data(), rec.tweet_id.size());
    if (rec.tensors.size() > 255) {
      throw std::invalid_argument("too many tensors in one record");
    }
    write_u8(out, static_cast<std::uint8_t>(rec.tensors.size()));
    for (const NamedTensor& t : rec.tensors) write_tensor_record(out, t, false);
  }
  out.flush();
  if (!out) throw std::runtime_error("irmf: write failed: " + path);
}

std::vector<IrmfRecord> read_irmf(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  char magic[4];
  read_bytes(in, magic, 4);
  if (std::memcmp(magic, kFeatureMagic, 4) != 0) {
    throw std::runtime_error("not a feature file (bad magic): " + path);
  }
  std::uint32_t version = read_u32(in);
  if (version != kFeatureVersion) {
    throw std::runtime_error("unsupported feature file version " +
                             std::to_string(version));
  }
  std::uint32_t count = read_u32(in);
  std::vector<IrmfRecord> records;
  records.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    IrmfRecord rec;
    std::uint32_t id_len = read_u32(in);
    if (id_len > (1u << 16)) throw std::runtime_error("irmf: implausible id length");
    rec.tweet_id.resize(id_len);
    read_bytes(in, rec.tweet_id.data(), id_len);
    std::uint8_t n_tensors = read_u8(in);
    for (std::uint8_t t = 0; t < n_tensors; ++t) {
      rec.tensors.push_back(read_tensor_record(in, false));
    }
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace amnl
