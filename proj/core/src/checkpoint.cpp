#include "sbrnn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sbrnn/error.hpp"

namespace sbrnn {

namespace {

constexpr char kMagic[8] = {'S', 'B', 'R', 'N', 'N', 'C', 'K', 'P'};

template <class T>
void put(std::string& out, T v) {
  auto u = std::bit_cast<std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>>(v);
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<char>((u >> (8 * i)) & 0xFF));
}

class Reader {
 public:
  explicit Reader(const std::string& s) : s_(s) {}

  template <class T>
  T get() {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
    need(sizeof(T));
    U u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) u |= static_cast<U>(static_cast<unsigned char>(s_[pos_ + i])) << (8 * i);
    pos_ += sizeof(T);
    return std::bit_cast<T>(u);
  }

  std::string bytes(std::size_t n) {
    need(n);
    auto out = s_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  bool done() const { return pos_ == s_.size(); }

 private:
  void need(std::size_t n) const {
    if (s_.size() - pos_ < n) throw ConfigError("checkpoint: truncated data");
  }
  const std::string& s_;
  std::size_t pos_ = 0;
};

bool is_vector(const ArrayRef& a) { return a.cols == 1 && a.name.ends_with("bias"); }

}  // namespace

std::string encode_checkpoint(const TransceiverParams& params) {
  params.validate();
  auto copy = params;
  const auto arrays = parameter_arrays(copy);
  std::string out(kMagic, sizeof kMagic);
  put(out, kCheckpointVersion);
  put(out, static_cast<std::uint32_t>(params.dims.messages));
  put(out, static_cast<std::uint32_t>(params.dims.samples));
  put(out, static_cast<std::uint32_t>(arrays.size()));
  for (const auto& a : arrays) {
    put(out, static_cast<std::uint32_t>(a.name.size()));
    out += a.name;
    if (is_vector(a)) {
      put(out, std::uint32_t{1});
      put(out, static_cast<std::uint64_t>(a.rows));
    } else {
      put(out, std::uint32_t{2});
      put(out, static_cast<std::uint64_t>(a.rows));
      put(out, static_cast<std::uint64_t>(a.cols));
    }
    const auto m = a.map();
    for (Eigen::Index r = 0; r < a.rows; ++r)
      for (Eigen::Index c = 0; c < a.cols; ++c) put(out, m(r, c));
  }
  return out;
}

TransceiverParams decode_checkpoint(const std::string& bytes) {
  Reader in(bytes);
  require(in.bytes(sizeof kMagic) == std::string(kMagic, sizeof kMagic), "checkpoint: bad magic");
  const auto version = in.get<std::uint32_t>();
  require(version == kCheckpointVersion, "checkpoint: unsupported version " + std::to_string(version));
  AutoencoderDims dims;
  dims.messages = static_cast<int>(in.get<std::uint32_t>());
  dims.samples = static_cast<int>(in.get<std::uint32_t>());
  dims.validate();
  auto params = TransceiverParams::zeros(dims);
  auto arrays = parameter_arrays(params);
  require(in.get<std::uint32_t>() == arrays.size(), "checkpoint: unexpected array count");
  for (auto& a : arrays) {
    const auto name = in.bytes(in.get<std::uint32_t>());
    require(name == a.name, "checkpoint: expected array '" + a.name + "', found '" + name + "'");
    const auto rank = in.get<std::uint32_t>();
    require(rank == (is_vector(a) ? 1u : 2u), "checkpoint: wrong rank for '" + name + "'");
    const auto rows = in.get<std::uint64_t>();
    const auto cols = rank == 2 ? in.get<std::uint64_t>() : std::uint64_t{1};
    require(rows == static_cast<std::uint64_t>(a.rows) && cols == static_cast<std::uint64_t>(a.cols),
            "checkpoint: wrong shape for '" + name + "'");
    auto m = a.map();
    for (Eigen::Index r = 0; r < a.rows; ++r)
      for (Eigen::Index c = 0; c < a.cols; ++c) m(r, c) = in.get<double>();
  }
  require(in.done(), "checkpoint: trailing data");
  return params;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), "cannot write '" + path + "'");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  require(static_cast<bool>(out), "write failed for '" + path + "'");
}

void save_checkpoint(const std::string& path, const TransceiverParams& params) {
  write_file(path, encode_checkpoint(params));
}

TransceiverParams load_checkpoint(const std::string& path) { return decode_checkpoint(read_file(path)); }

}  // namespace sbrnn
