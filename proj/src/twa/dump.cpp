#include <bit>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "spinforge/twa/twa.hpp"

namespace spinforge {

namespace {

constexpr char kMagic[8] = {'S', 'F', 'T', 'W', 'A', '0', '0', '1'};

template <class T>
void put(std::ostream& out, T value) {
  static_assert(sizeof(T) == 8);
  auto bits = std::bit_cast<std::uint64_t>(value);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  char bytes[8];
  std::memcpy(bytes, &bits, 8);
  out.write(bytes, 8);
}

template <class T>
T get(std::istream& in) {
  char bytes[8];
  if (!in.read(bytes, 8)) throw std::runtime_error("read_binary: truncated stream");
  std::uint64_t bits;
  std::memcpy(&bits, bytes, 8);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  return std::bit_cast<T>(bits);
}

}  // namespace

void write_binary(std::ostream& out, std::span<const TrajectoryBatch> series) {
  const std::uint64_t n_traj = series.empty() ? 0 : series.front().size();
  const bool has_sizes = !series.empty() && !series.front().sizes.empty();
  out.write(kMagic, 8);
  put<std::uint64_t>(out, series.size());
  put<std::uint64_t>(out, n_traj);
  put<std::uint64_t>(out, has_sizes ? 1 : 0);
  for (const auto& frame : series) {
    if (frame.size() != n_traj) throw std::invalid_argument("write_binary: ragged series");
    put<double>(out, frame.t);
    for (const auto& p : frame.points) {
      for (double v : p) put<double>(out, v);
    }
    if (has_sizes) {
      for (const auto& s : frame.sizes) {
        put<double>(out, s[0]);
        put<double>(out, s[1]);
      }
    }
  }
  if (!out) throw std::runtime_error("write_binary: stream error");
}

std::vector<TrajectoryBatch> read_binary(std::istream& in, Protocol protocol, double atoms) {
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) throw std::runtime_error("read_binary: bad magic");
  const auto n_frames = get<std::uint64_t>(in);
  const auto n_traj = get<std::uint64_t>(in);
  const bool has_sizes = get<std::uint64_t>(in) != 0;
  std::vector<TrajectoryBatch> series(n_frames);
  for (auto& frame : series) {
    frame.protocol = protocol;
    frame.atoms = atoms;
    frame.t = get<double>(in);
    frame.points.resize(n_traj);
    for (auto& p : frame.points) {
      for (double& v : p) v = get<double>(in);
    }
    if (has_sizes) {
      frame.sizes.resize(n_traj);
      for (auto& s : frame.sizes) s = {get<double>(in), get<double>(in)};
    }
  }
  return series;
}

}  // namespace spinforge
