#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <cstddef>
#include <vector>

namespace spinshell {

/// Hard cap on chain length, set by the 32-bit configuration labels.
/// Dense diagonalization becomes the binding constraint long before this.
inline constexpr int kMaxSites = 24;

/// An open spin-1/2 chain of `sites` sites with a fixed bipartition:
/// subsystem 1 is the contiguous left block of `left_sites` sites.
struct ChainGeometry {
  ChainGeometry(int sites, int left_sites);

  int sites;       // N
  int left_sites;  // l1, 1 <= l1 < N

  int right_sites() const { return sites - left_sites; }
  std::size_t dim() const { return std::size_t{1} << sites; }
  std::size_t left_dim() const { return std::size_t{1} << left_sites; }
  std::size_t right_dim() const { return std::size_t{1} << right_sites(); }
};

/// One product configuration. Bit i (counted from zero) is site i+1 from the
/// left end; a set bit means spin up. Low bits therefore label subsystem 1.
struct SpinConfig {
  std::uint32_t bits = 0;

  bool up(int site) const { return (bits >> site) & 1u; }
  int n_up() const { return std::popcount(bits); }
  auto operator<=>(const SpinConfig&) const = default;
};

/// Subsystem labels of a configuration under the left/right split.
struct BipartiteLabel {
  std::uint32_t left = 0;   // low l1 bits, in [0, 2^l1)
  std::uint32_t right = 0;  // high l2 bits, in [0, 2^l2)
};

std::uint64_t binomial(int n, int k);

/// All configurations of a fixed total-magnetization sector, in ascending
/// integer order. Immutable after construction; the ordering is a contract
/// that matrix rows, eigenvector components and rank lookups all rely on.
class SectorBasis {
 public:
  SectorBasis(ChainGeometry geometry, int n_up, std::vector<SpinConfig> configs);

  const ChainGeometry& geometry() const { return geometry_; }
  int n_up() const { return n_up_; }
  const std::vector<SpinConfig>& configs() const { return configs_; }
  std::size_t size() const { return configs_.size(); }

  /// Position of `config` in the ascending list; DomainError if absent.
  std::size_t rank_of(SpinConfig config) const;

 private:
  ChainGeometry geometry_;
  int n_up_;
  std::vector<SpinConfig> configs_;
};

SectorBasis enumerate_sector(const ChainGeometry& geometry, int n_up);

BipartiteLabel split_config(SpinConfig config, const ChainGeometry& geometry);
SpinConfig recombine(BipartiteLabel label, const ChainGeometry& geometry);

}  // namespace spinshell
