#include "doctest.h"

#include <random>
#include <set>

#include "spinshell/basis.hpp"
#include "spinshell/errors.hpp"

using namespace spinshell;

TEST_CASE("two-site half-filling sector") {
  const SectorBasis basis = enumerate_sector(ChainGeometry(2, 1), 1);
  REQUIRE(basis.size() == 2);
  CHECK(basis.configs()[0].bits == 0b01);
  CHECK(basis.configs()[1].bits == 0b10);
}

TEST_CASE("sector sizes are binomial coefficients") {
  CHECK(enumerate_sector(ChainGeometry(4, 2), 2).size() == 6);
  CHECK(enumerate_sector(ChainGeometry(16, 6), 8).size() == 12870);
  CHECK(enumerate_sector(ChainGeometry(5, 2), 0).size() == 1);
  CHECK(enumerate_sector(ChainGeometry(5, 2), 5).size() == 1);
}

TEST_CASE("n_up out of range rejected") {
  CHECK_THROWS_AS(enumerate_sector(ChainGeometry(4, 2), 5), DomainError);
  CHECK_THROWS_AS(enumerate_sector(ChainGeometry(4, 2), -1), DomainError);
}

TEST_CASE("geometry invariants") {
  CHECK_THROWS_AS(ChainGeometry(1, 1), DomainError);
  CHECK_THROWS_AS(ChainGeometry(4, 0), DomainError);
  CHECK_THROWS_AS(ChainGeometry(4, 4), DomainError);
  CHECK_THROWS_AS(ChainGeometry(kMaxSites + 1, 2), DomainError);
  const ChainGeometry g(6, 2);
  CHECK(g.right_sites() == 4);
  CHECK(g.dim() == 64);
  CHECK(g.left_dim() == 4);
  CHECK(g.right_dim() == 16);
}

TEST_CASE("split examples") {
  const ChainGeometry g(4, 2);
  const BipartiteLabel label = split_config(SpinConfig{0b1101}, g);
  CHECK(label.left == 0b01);
  CHECK(label.right == 0b11);

  const BipartiteLabel zero = split_config(SpinConfig{0}, g);
  CHECK(zero.left == 0);
  CHECK(zero.right == 0);
}

TEST_CASE("split/recombine is the identity on all 4-site configs") {
  const ChainGeometry g(4, 2);
  for (std::uint32_t bits = 0; bits < 16; ++bits) {
    const SpinConfig c{bits};
    CHECK(recombine(split_config(c, g), g) == c);
  }
}

TEST_CASE("sectors partition the full space") {
  for (int n = 2; n <= 10; ++n) {
    const ChainGeometry g(n, 1);
    std::size_t total = 0;
    for (int n_up = 0; n_up <= n; ++n_up) {
      total += enumerate_sector(g, n_up).size();
    }
    CHECK(total == g.dim());
  }
}

TEST_CASE("split is a bijection onto compatible label pairs") {
  const ChainGeometry g(7, 3);
  const int n_up = 4;
  const SectorBasis basis = enumerate_sector(g, n_up);

  std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
  for (const SpinConfig c : basis.configs()) {
    const BipartiteLabel label = split_config(c, g);
    CHECK(std::popcount(label.left) + std::popcount(label.right) == n_up);
    CHECK(label.left < g.left_dim());
    CHECK(label.right < g.right_dim());
    CHECK(seen.insert({label.left, label.right}).second);
  }

  // Every compatible pair is hit.
  std::size_t compatible = 0;
  for (std::uint32_t a = 0; a < g.left_dim(); ++a) {
    for (std::uint32_t b = 0; b < g.right_dim(); ++b) {
      if (std::popcount(a) + std::popcount(b) == n_up) ++compatible;
    }
  }
  CHECK(seen.size() == compatible);
}

TEST_CASE("rank is the inverse of the config list") {
  const SectorBasis basis = enumerate_sector(ChainGeometry(9, 4), 4);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    CHECK(basis.rank_of(basis.configs()[i]) == i);
  }
  CHECK_THROWS_AS(basis.rank_of(SpinConfig{0b1}), DomainError);
}

TEST_CASE("configs are strictly ascending") {
  const SectorBasis basis = enumerate_sector(ChainGeometry(10, 5), 3);
  for (std::size_t i = 1; i < basis.size(); ++i) {
    CHECK(basis.configs()[i - 1] < basis.configs()[i]);
  }
}
