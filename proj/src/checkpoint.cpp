#include <algorithm>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "icd/errors.hpp"
#include "icd/model.hpp"
#include "icd/text.hpp"

namespace icd {

namespace {

constexpr char kMagic[8] = {'I', 'C', 'D', 'C', 'K', 'P', 'T', '\0'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes, bytes + sizeof(T));
  }
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) {
    throw FormatError("checkpoint truncated");
  }
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes, bytes + sizeof(T));
  }
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

void put_string(std::ostream& out, const std::string& s) {
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::istream& in) {
  const auto len = get<std::uint32_t>(in);
  std::string s(len, '\0');
  if (len > 0 && !in.read(s.data(), len)) throw FormatError("checkpoint truncated");
  return s;
}

void put_matrix(std::ostream& out, const std::string& name, const MatrixXd& m) {
  put_string(out, name);
  put<std::uint64_t>(out, static_cast<std::uint64_t>(m.rows()));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(m.cols()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) put<double>(out, m(i, j));
  }
}

struct NamedMatrix {
  std::string name;
  MatrixXd values;
};

NamedMatrix get_matrix(std::istream& in) {
  NamedMatrix nm;
  nm.name = get_string(in);
  const auto rows = get<std::uint64_t>(in);
  const auto cols = get<std::uint64_t>(in);
  if (rows > (1u << 24) || cols > (1u << 24)) throw FormatError("implausible layer shape");
  nm.values.resize(static_cast<Index>(rows), static_cast<Index>(cols));
  for (Index i = 0; i < nm.values.rows(); ++i) {
    for (Index j = 0; j < nm.values.cols(); ++j) nm.values(i, j) = get<double>(in);
  }
  return nm;
}

std::vector<NamedMatrix> named_parameters(const IcdModel& model) {
  std::vector<NamedMatrix> out;
  const auto& gen = model.generator().layers();
  for (std::size_t l = 0; l < gen.size(); ++l) {
    out.push_back({"generator." + std::to_string(l) + ".weight", gen[l].weight});
  }
  const auto& disc = model.discriminator().layers();
  for (std::size_t l = 0; l < disc.size(); ++l) {
    out.push_back({"discriminator." + std::to_string(l) + ".weight", disc[l].weight});
    out.push_back({"discriminator." + std::to_string(l) + ".bias", disc[l].bias});
  }
  return out;
}

}  // namespace

void save_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
  out.write(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, kVersion);
  std::string config = format_config(ckpt.model.config());
  config += "best_score = " + format_double(ckpt.best_score) + '\n';
  config += "best_epoch = " + std::to_string(ckpt.best_epoch) + '\n';
  put_string(out, config);
  const auto params = named_parameters(ckpt.model);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(params.size()));
  for (const auto& p : params) put_matrix(out, p.name, p.values);
  if (!out) throw FormatError("failed writing checkpoint");
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write checkpoint " + path.string());
  save_checkpoint(out, ckpt);
}

Checkpoint load_checkpoint(std::istream& in) {
  char magic[sizeof(kMagic)];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw FormatError("not an ICD checkpoint (bad magic)");
  }
  const auto version = get<std::uint32_t>(in);
  if (version != kVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint ckpt;
  TrainConfig cfg;
  for (const auto& [key, value] : parse_key_values(get_string(in))) {
    if (key == "best_score") {
      ckpt.best_score = parse_double(value);
    } else if (key == "best_epoch") {
      ckpt.best_epoch = static_cast<int>(parse_int(value));
    } else {
      apply_config_entry(cfg, key, value);
    }
  }
  nn::Rng rng(0);
  IcdModel model(cfg, rng);
  auto gen = model.generator().parameters();
  auto disc = model.discriminator().parameters();
  const auto count = get<std::uint32_t>(in);
  if (count != gen.size() + disc.size()) throw FormatError("checkpoint layer count mismatch");
  for (std::uint32_t k = 0; k < count; ++k) {
    NamedMatrix nm = get_matrix(in);
    MatrixXd* target = nullptr;
    int index = -1;
    char kind[16] = {};
    if (std::sscanf(nm.name.c_str(), "generator.%d.%15s", &index, kind) == 2 &&
        std::string(kind) == "weight" && index >= 0 && index < static_cast<int>(gen.size())) {
      target = gen[index];
    } else if (std::sscanf(nm.name.c_str(), "discriminator.%d.%15s", &index, kind) == 2 &&
               index >= 0 && 2 * index + 1 < static_cast<int>(disc.size())) {
      if (std::string(kind) == "weight") target = disc[2 * index];
      if (std::string(kind) == "bias") target = disc[2 * index + 1];
    }
    if (target == nullptr) throw FormatError("unexpected layer '" + nm.name + "'");
    if (target->rows() != nm.values.rows() || target->cols() != nm.values.cols()) {
      throw FormatError("layer '" + nm.name + "' has the wrong shape");
    }
    *target = std::move(nm.values);
  }
  ckpt.model = std::move(model);
  return ckpt;
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open checkpoint " + path.string());
  return load_checkpoint(in);
}

}  // namespace icd
