#include "echoslam/nn/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

#include "echoslam/errors.hpp"

namespace echoslam::nn {

namespace {

constexpr char kMagic[4] = {'E', 'G', 'S', 'T'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kMaxNameLen = 4096;
constexpr std::uint32_t kMaxRank = 8;

void write_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::istream& is, const char* what) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) {
    throw FormatError(std::string("checkpoint truncated while reading ") +
                      what);
  }
  return static_cast<std::uint32_t>(b[0]) |
         (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

void write_f32(std::ostream& os, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  write_u32(os, bits);
}

float read_f32(std::istream& is, const char* what) {
  std::uint32_t bits = read_u32(is, what);
  float v;
  std::memcpy(&v, &bits, 4);
  return v;
}

}  // namespace

void save_checkpoint(const ParameterSet& params, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("cannot open checkpoint for writing: " + path);
  os.write(kMagic, 4);
  write_u32(os, kVersion);
  write_u32(os, static_cast<std::uint32_t>(params.count()));
  for (std::size_t i = 0; i < params.count(); ++i) {
    const std::string& name = params.name_at(i);
    const Tensor& t = params.at(i).tensor();
    write_u32(os, static_cast<std::uint32_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_u32(os, static_cast<std::uint32_t>(t.rank()));
    for (int d = 0; d < t.rank(); ++d) {
      write_u32(os, static_cast<std::uint32_t>(t.dim(d)));
    }
    for (std::size_t j = 0; j < t.size(); ++j) {
      write_f32(os, static_cast<float>(t[j]));
    }
  }
  if (!os) throw FormatError("failed writing checkpoint: " + path);
}

std::vector<std::pair<std::string, Tensor>> read_checkpoint(
    const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open checkpoint: " + path);
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw FormatError("bad checkpoint magic in " + path);
  }
  const std::uint32_t version = read_u32(is, "version");
  if (version != kVersion) {
    throw FormatError("unsupported checkpoint version " +
                      std::to_string(version) + " in " + path);
  }
  const std::uint32_t count = read_u32(is, "tensor count");
  std::vector<std::pair<std::string, Tensor>> out;
  out.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint32_t name_len = read_u32(is, "name length");
    if (name_len == 0 || name_len > kMaxNameLen) {
      throw FormatError("implausible tensor name length in " + path);
    }
    std::string name(name_len, '\0');
    if (!is.read(name.data(), name_len)) {
      throw FormatError("checkpoint truncated while reading a name");
    }
    const std::uint32_t rank = read_u32(is, "rank");
    if (rank == 0 || rank > kMaxRank) {
      throw FormatError("implausible tensor rank in " + path);
    }
    std::vector<int> shape(rank);
    std::size_t numel = 1;
    for (std::uint32_t d = 0; d < rank; ++d) {
      const std::uint32_t dim = read_u32(is, "dimension");
      if (dim == 0 || dim > (1u << 24)) {
        throw FormatError("implausible tensor dimension in " + path);
      }
      shape[d] = static_cast<int>(dim);
      numel *= dim;
    }
    Tensor t = Tensor::zeros(shape);
    for (std::size_t j = 0; j < numel; ++j) {
      t[j] = static_cast<double>(read_f32(is, "payload"));
    }
    out.emplace_back(std::move(name), std::move(t));
  }
  // Any trailing bytes mean the file does not match its own header.
  char extra;
  if (is.read(&extra, 1)) {
    throw FormatError("trailing bytes after checkpoint payload in " + path);
  }
  return out;
}

void load_checkpoint(ParameterSet& params, const std::string& path) {
  auto entries = read_checkpoint(path);
  if (entries.size() != params.count()) {
    throw FormatError("checkpoint has " + std::to_string(entries.size()) +
                      " tensors, expected " + std::to_string(params.count()));
  }
  for (auto& [name, tensor] : entries) {
    if (!params.contains(name)) {
      throw FormatError("checkpoint tensor not registered: " + name);
    }
    Value v = params.get(name);
    if (v.tensor().shape() != tensor.shape()) {
      throw FormatError("checkpoint shape mismatch for " + name + ": file " +
                        shape_str(tensor.shape()) + " vs model " +
                        shape_str(v.tensor().shape()));
    }
    Tensor& dst = v.tensor();
    for (std::size_t j = 0; j < dst.size(); ++j) dst[j] = tensor[j];
  }
}

}  // namespace echoslam::nn
