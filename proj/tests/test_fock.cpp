// Copyright 2026 The branchlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <bit>
#include <random>

#include "branchlab/errors.hpp"
#include "branchlab/fock.hpp"

namespace branchlab {
namespace {

// Counts occupation patterns over all 4^L local configurations.
int brute_force_count(int sites, int n) {
  int count = 0;
  int total = 1;
  for (int i = 0; i < sites; ++i) total *= 4;
  for (int code = 0; code < total; ++code) {
    int particles = 0;
    for (int x = 0, c = code; x < sites; ++x, c /= 4)
      particles += particle_count(static_cast<LocalState>(c % 4));
    if (particles == n) ++count;
  }
  return count;
}

// Reference sign: a^dag(m) has to pass every occupied mode above m.
double reference_creation_sign(std::uint64_t mask, int mode) {
  return (std::popcount(mask >> (mode + 1)) % 2 == 0) ? 1.0 : -1.0;
}

TEST(Sector, DimensionsMatchBruteForce) {
  for (int sites = 2; sites <= 4; ++sites)
    for (int n = 0; n <= 2 * sites; ++n)
      EXPECT_EQ(enumerate_sector(LatticeGeometry::line(sites), n)->dim(),
                brute_force_count(sites, n))
          << sites << " sites, " << n << " particles";
  EXPECT_EQ(enumerate_sector(LatticeGeometry::line(2), 2)->dim(), 6);
  EXPECT_EQ(enumerate_sector(LatticeGeometry::line(5), 2)->dim(), 45);
}

TEST(Sector, OrderingAndIndexAreConsistent) {
  auto s = enumerate_sector(LatticeGeometry::line(4), 3);
  for (int i = 0; i < s->dim(); ++i) {
    EXPECT_EQ(s->index_of_or_throw(s->state(i)), i);
    EXPECT_EQ(s->state(i).particles(), 3);
    if (i > 0) {
      // lexicographic in increasing mode tuples
      std::vector<int> a, b;
      for (int m = 0; m < 8; ++m) {
        if (s->state(i - 1).has_mode(m)) a.push_back(m);
        if (s->state(i).has_mode(m)) b.push_back(m);
      }
      EXPECT_TRUE(a < b);
    }
  }
}

TEST(Sector, OutOfRangeParticleNumberThrows) {
  const auto g = LatticeGeometry::line(3);
  EXPECT_THROW(enumerate_sector(g, -1), DomainError);
  EXPECT_THROW(enumerate_sector(g, 7), DomainError);
}

TEST(Geometry, TwoDimensionalSitesAreRowMajor) {
  const auto g = LatticeGeometry::grid(3, 2);
  EXPECT_EQ(g.sites(), 6);
  EXPECT_EQ(g.site_at(1, 1), 4);
  EXPECT_EQ(g.coordinates(5), std::make_pair(2, 1));
  EXPECT_TRUE(g.are_neighbors(1, 4));
  EXPECT_FALSE(g.are_neighbors(2, 3));
  EXPECT_EQ(g.neighbor_pairs().size(), 7u);
  EXPECT_THROW(LatticeGeometry::line(1), DomainError);
}

TEST(Creation, SignsMatchModeOrderingOracle) {
  const auto g = LatticeGeometry::line(3);
  for (int n = 0; n < 6; ++n) {
    auto from = enumerate_sector(g, n);
    auto to = enumerate_sector(g, n + 1);
    for (int i = 0; i < from->dim(); ++i) {
      const auto psi = StateVector::basis_state(from, from->state(i));
      for (int m = 0; m < g.modes(); ++m) {
        const Spin s = m % 2 == 0 ? Spin::kUp : Spin::kDown;
        const auto out = apply_creation(psi, m / 2, s, to);
        const std::uint64_t mask = from->state(i).mask();
        if ((mask >> m) & 1u) {
          EXPECT_EQ(out.norm(), 0.0);
          continue;
        }
        const int j = to->index_of_or_throw(FockBasisState(mask | (1ull << m)));
        EXPECT_EQ(out.amplitudes()(j), Complex(reference_creation_sign(mask, m), 0.0));
        EXPECT_NEAR(out.norm(), 1.0, 0.0);
      }
    }
  }
}

TEST(Creation, IncreasingSiteProductHasPlusSign) {
  const auto g = LatticeGeometry::line(2);
  const auto vac = StateVector::vacuum(g);
  const auto in_order = apply_creation(apply_creation(vac, 0, Spin::kUp), 1, Spin::kUp);
  const auto reversed = apply_creation(apply_creation(vac, 1, Spin::kUp), 0, Spin::kUp);
  const int idx = in_order.basis().index_of_or_throw(
      FockBasisState::from_occupations({LocalState::kUp, LocalState::kUp}));
  EXPECT_EQ(in_order.amplitudes()(idx), Complex(1.0, 0.0));
  EXPECT_EQ(reversed.amplitudes()(idx), Complex(-1.0, 0.0));
  EXPECT_EQ(apply_creation(apply_creation(vac, 0, Spin::kUp), 0, Spin::kUp).norm(), 0.0);
}

TEST(Creation, CanonicalAnticommutators) {
  for (int sites = 2; sites <= 3; ++sites) {
    const auto g = LatticeGeometry::line(sites);
    const int modes = g.modes();
    std::vector<SectorPtr> sec;
    for (int n = 0; n <= modes; ++n) sec.push_back(enumerate_sector(g, n));
    // c[n][m]: a^dag(m) from sector n to n+1
    std::vector<std::vector<CMatrix>> c(modes);
    for (int n = 0; n < modes; ++n)
      for (int m = 0; m < modes; ++m) c[n].push_back(creation_matrix(*sec[n], *sec[n + 1], m));
    for (int n = 0; n <= modes; ++n) {
      const int d = sec[n]->dim();
      for (int i = 0; i < modes; ++i)
        for (int j = 0; j < modes; ++j) {
          // {a_i, a_j^dag} on sector n
          CMatrix ac = CMatrix::Zero(d, d);
          if (n < modes) ac += c[n][i].adjoint() * c[n][j];
          if (n > 0) ac += c[n - 1][j] * c[n - 1][i].adjoint();
          const CMatrix want = (i == j ? 1.0 : 0.0) * CMatrix::Identity(d, d);
          EXPECT_LT((ac - want).norm(), 1e-14);
          // {a_i^dag, a_j^dag} from n to n+2
          if (n + 2 <= modes) {
            const CMatrix cc = c[n + 1][i] * c[n][j] + c[n + 1][j] * c[n][i];
            EXPECT_LT(cc.norm(), 1e-14);
          }
        }
    }
  }
}

TEST(Annihilation, IsAdjointOfCreation) {
  const auto g = LatticeGeometry::line(3);
  auto s2 = enumerate_sector(g, 2);
  auto s3 = enumerate_sector(g, 3);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  CVector a(s2->dim()), b(s3->dim());
  for (auto& x : a) x = Complex(nd(rng), nd(rng));
  for (auto& x : b) x = Complex(nd(rng), nd(rng));
  const StateVector psi(s2, a), phi(s3, b);
  for (int x = 0; x < 3; ++x)
    for (Spin s : {Spin::kUp, Spin::kDown}) {
      const Complex lhs = phi.inner(apply_creation(psi, x, s, s3));
      const Complex rhs = apply_annihilation(phi, x, s, s2).inner(psi);
      EXPECT_LT(std::abs(lhs - rhs), 1e-12);
    }
}

TEST(ProductState, PointAndUniformOrbitals) {
  const auto g = LatticeGeometry::line(5);
  const auto one = build_product_state(g, {point_orbital(g, 0, Spin::kUp)});
  EXPECT_TRUE(one.product_certificate());
  EXPECT_EQ(one.amplitudes()(one.basis().index_of_or_throw(FockBasisState(1))), Complex(1, 0));

  const auto spread = build_product_state(g, {uniform_orbital(g, 1, 3, Spin::kDown)});
  for (int x = 1; x <= 3; ++x)
    EXPECT_NEAR(std::abs(spread.amplitudes()(
                    spread.basis().index_of_or_throw(FockBasisState(1ull << (2 * x + 1))))),
                1.0 / std::sqrt(3.0), 1e-15);

  // two point orbitals at 0 and n give |1>_0 |1>_n with coefficient +1
  const auto pair =
      build_product_state(g, {point_orbital(g, 0, Spin::kUp), point_orbital(g, 3, Spin::kUp)});
  std::vector<LocalState> occ(5, LocalState::kEmpty);
  occ[0] = occ[3] = LocalState::kUp;
  EXPECT_EQ(pair.amplitudes()(pair.basis().index_of_or_throw(FockBasisState::from_occupations(occ))),
            Complex(1, 0));
}

TEST(ProductState, CollidingOrbitalsThrow) {
  const auto g = LatticeGeometry::line(3);
  EXPECT_THROW(
      build_product_state(g, {point_orbital(g, 1, Spin::kUp), point_orbital(g, 1, Spin::kUp)}),
      DegenerateInputError);
}

TEST(StateVector, DensitiesSumToParticleNumber) {
  const auto g = LatticeGeometry::line(4);
  auto s = enumerate_sector(g, 3);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  CVector a(s->dim());
  for (auto& x : a) x = Complex(nd(rng), nd(rng));
  const auto psi = StateVector(s, a).normalized();
  double total = 0.0;
  for (double d : psi.site_densities()) total += d;
  EXPECT_NEAR(total, 3.0, 1e-12);
  EXPECT_FALSE(psi.product_certificate());
}

}  // namespace
}  // namespace branchlab
