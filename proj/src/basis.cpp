#include "spinshell/basis.hpp"

#include <algorithm>
#include <string>

#include "spinshell/errors.hpp"

namespace spinshell {

ChainGeometry::ChainGeometry(int sites_, int left_sites_)
    : sites(sites_), left_sites(left_sites_) {
  if (sites < 2 || sites > kMaxSites) {
    throw DomainError("chain length must be in [2, " +
                      std::to_string(kMaxSites) + "], got " +
                      std::to_string(sites));
  }
  if (left_sites < 1 || left_sites >= sites) {
    throw DomainError("left block size must satisfy 1 <= l1 < N, got l1=" +
                      std::to_string(left_sites) + " for N=" +
                      std::to_string(sites));
  }
}

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t result = 1;
  for (int i = 1; i <= k; ++i) {
    result = result * static_cast<std::uint64_t>(n - k + i) /
             static_cast<std::uint64_t>(i);
  }
  return result;
}

SectorBasis::SectorBasis(ChainGeometry geometry, int n_up,
                         std::vector<SpinConfig> configs)
    : geometry_(geometry), n_up_(n_up), configs_(std::move(configs)) {
  if (n_up_ < 0 || n_up_ > geometry_.sites) {
    throw DomainError("n_up out of range [0, N] for sector basis");
  }
  if (configs_.size() != binomial(geometry_.sites, n_up_)) {
    throw DomainError("sector basis size does not match binomial(N, n_up)");
  }
  for (std::size_t i = 0; i < configs_.size(); ++i) {
    if (configs_[i].n_up() != n_up_) {
      throw DomainError("sector basis contains a config with wrong n_up");
    }
    if (i > 0 && !(configs_[i - 1] < configs_[i])) {
      throw DomainError("sector basis configs must be strictly ascending");
    }
  }
}

std::size_t SectorBasis::rank_of(SpinConfig config) const {
  const auto it = std::lower_bound(configs_.begin(), configs_.end(), config);
  if (it == configs_.end() || *it != config) {
    throw DomainError("config " + std::to_string(config.bits) +
                      " is not a member of the n_up=" + std::to_string(n_up_) +
                      " sector");
  }
  return static_cast<std::size_t>(it - configs_.begin());
}

SectorBasis enumerate_sector(const ChainGeometry& geometry, int n_up) {
  if (n_up < 0 || n_up > geometry.sites) {
    throw DomainError("n_up must be in [0, N=" + std::to_string(geometry.sites) +
                      "], got " + std::to_string(n_up));
  }
  std::vector<SpinConfig> configs;
  configs.reserve(binomial(geometry.sites, n_up));
  if (n_up == 0) {
    configs.push_back(SpinConfig{0});
  } else {
    // Gosper's hack walks the sector in ascending integer order.
    const std::uint32_t limit = std::uint32_t{1} << geometry.sites;
    std::uint32_t v = (std::uint32_t{1} << n_up) - 1;
    while (v < limit) {
      configs.push_back(SpinConfig{v});
      const std::uint32_t t = v | (v - 1);
      const std::uint32_t next =
          (t + 1) | (((~t & (t + 1)) - 1) >> (std::countr_zero(v) + 1));
      if (next <= v) break;  // wrapped past the top configuration
      v = next;
    }
  }
  return SectorBasis(geometry, n_up, std::move(configs));
}

BipartiteLabel split_config(SpinConfig config, const ChainGeometry& geometry) {
  const std::uint32_t left_mask =
      (std::uint32_t{1} << geometry.left_sites) - 1;
  return BipartiteLabel{config.bits & left_mask,
                        config.bits >> geometry.left_sites};
}

SpinConfig recombine(BipartiteLabel label, const ChainGeometry& geometry) {
  return SpinConfig{label.left | (label.right << geometry.left_sites)};
}

}  // namespace spinshell
