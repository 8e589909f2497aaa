#include "fnls/snapshot.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace fnls {

namespace {

static_assert(std::endian::native == std::endian::little,
              "snapshot I/O assumes a little-endian host");

constexpr char kMagic[4] = {'F', 'N', 'L', 'S'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("snapshot: truncated file");
  return v;
}

} // namespace

void write_snapshot(const std::string& path, const Field& u,
                    const ModelParams& params, double t) {
  if (!u.grid) throw std::invalid_argument("write_snapshot: empty field");
  Field phys = in_physical(u);
  const Grid& g = *phys.grid;

  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("write_snapshot: cannot open " + tmp);
    os.write(kMagic, 4);
    put(os, kVersion);
    put(os, static_cast<std::uint32_t>(g.dim()));
    for (int a = 0; a < g.dim(); ++a) put(os, static_cast<std::uint64_t>(g.n(a)));
    for (int a = 0; a < g.dim(); ++a) put(os, g.length(a));
    put(os, params.s);
    put(os, params.sigma);
    put(os, t);
    // std::complex<double> is layout-compatible with double[2] = {re, im}
    os.write(reinterpret_cast<const char*>(phys.v.data()),
             static_cast<std::streamsize>(phys.v.size() * sizeof(std::complex<double>)));
    if (!os) throw std::runtime_error("write_snapshot: write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_snapshot: cannot open " + path);

  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("read_snapshot: bad magic in " + path);
  const auto version = get<std::uint32_t>(is);
  if (version != kVersion)
    throw std::runtime_error("read_snapshot: unsupported version " +
                             std::to_string(version));
  const auto N = get<std::uint32_t>(is);
  if (N == 0 || N > 16)
    throw std::runtime_error("read_snapshot: implausible dimension");

  std::vector<int> n(N);
  std::vector<double> L(N);
  for (auto& x : n) x = static_cast<int>(get<std::uint64_t>(is));
  for (auto& x : L) x = get<double>(is);

  Snapshot snap;
  snap.params.dim = static_cast<int>(N);
  snap.params.s = get<double>(is);
  snap.params.sigma = get<double>(is);
  snap.params.validate();
  snap.t = get<double>(is);

  snap.u = Field(make_grid(n, L));
  is.read(reinterpret_cast<char*>(snap.u.v.data()),
          static_cast<std::streamsize>(snap.u.v.size() * sizeof(std::complex<double>)));
  if (!is) throw std::runtime_error("read_snapshot: truncated data in " + path);
  return snap;
}

} // namespace fnls
