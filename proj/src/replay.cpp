#include "dronesafe/replay.hpp"

#include <cstring>
#include <fstream>

namespace dronesafe {
namespace {

constexpr char kMagic[4] = {'D', 'S', 'R', 'B'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("replay snapshot truncated");
  return v;
}

void put_obs(std::ostream& os, const Observation& o) {
  const Eigen::VectorXd v = o.to_vector();
  for (Eigen::Index i = 0; i < v.size(); ++i) put<double>(os, v[i]);
}

Observation get_obs(std::istream& is) {
  Eigen::VectorXd v(Observation::kSize);
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = get<double>(is);
  return Observation::from_vector(v);
}

}  // namespace

void save_replay(const RlReplay& buffer, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open replay snapshot for writing: " + path);
  os.write(kMagic, 4);
  put<std::uint32_t>(os, kVersion);
  put<std::uint64_t>(os, buffer.capacity());
  put<std::uint64_t>(os, buffer.size());
  for (const RlTransition& t : buffer) {
    put_obs(os, t.s);
    put<std::int32_t>(os, t.action);
    put<double>(os, t.reward);
    put_obs(os, t.s_next);
    for (double c : t.costs) put<double>(os, c);
    put<std::uint8_t>(os, t.done ? 1 : 0);
    put<std::uint8_t>(os, t.mask);
    put<std::uint8_t>(os, t.next_mask);
    put<std::int32_t>(os, t.proposed);
  }
  if (!os) throw std::runtime_error("failed writing replay snapshot: " + path);
}

RlReplay load_replay(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open replay snapshot: " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) throw std::runtime_error("not a replay snapshot: " + path);
  const auto version = get<std::uint32_t>(is);
  if (version != kVersion) throw std::runtime_error("unsupported replay snapshot version in " + path);
  const auto capacity = get<std::uint64_t>(is);
  const auto count = get<std::uint64_t>(is);
  RlReplay buffer(capacity);
  for (std::uint64_t i = 0; i < count; ++i) {
    RlTransition t;
    t.s = get_obs(is);
    t.action = get<std::int32_t>(is);
    t.reward = get<double>(is);
    t.s_next = get_obs(is);
    for (double& c : t.costs) c = get<double>(is);
    t.done = get<std::uint8_t>(is) != 0;
    t.mask = get<std::uint8_t>(is);
    t.next_mask = get<std::uint8_t>(is);
    t.proposed = get<std::int32_t>(is);
    buffer.push(t);
  }
  return buffer;
}

}  // namespace dronesafe
