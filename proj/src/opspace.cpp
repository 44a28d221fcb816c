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

#include "branchlab/opspace.hpp"

#include <cmath>

#include "branchlab/errors.hpp"

namespace branchlab {

namespace {

constexpr double kValidationTol = 1e-9;

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

double trace_inner(const CMatrix& a, const CMatrix& b) { return (a * b).trace().real(); }

// Hermitian matrices supported on the blocks of equal `number` value.
std::vector<CMatrix> block_hermitian_spanning_set(const Eigen::VectorXd& number) {
  const int d = static_cast<int>(number.size());
  const double r2 = 1.0 / std::sqrt(2.0);
  std::vector<CMatrix> out;
  for (int i = 0; i < d; ++i) {
    CMatrix e = CMatrix::Zero(d, d);
    e(i, i) = 1.0;
    out.push_back(e);
  }
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      if (number(i) != number(j)) continue;
      CMatrix re = CMatrix::Zero(d, d);
      re(i, j) = re(j, i) = r2;
      out.push_back(re);
      CMatrix im = CMatrix::Zero(d, d);
      im(i, j) = Complex(0.0, -r2);
      im(j, i) = Complex(0.0, r2);
      out.push_back(im);
    }
  return out;
}

// Deterministic modified Gram-Schmidt in the trace inner product. Candidates
// are first orthogonalized against `fixed` (already orthonormal), which are
// not returned.
std::vector<CMatrix> gram_schmidt(const std::vector<CMatrix>& candidates,
                                  const std::vector<CMatrix>& fixed) {
  std::vector<CMatrix> out;
  for (CMatrix v : candidates) {
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : fixed) v -= trace_inner(q, v) * q;
      for (const auto& q : out) v -= trace_inner(q, v) * q;
    }
    const double n = std::sqrt(trace_inner(v, v));
    if (n > 1e-10) out.push_back(v / n);
  }
  return out;
}

void check_hermitian(const CMatrix& h, int dim, const char* what) {
  if (h.rows() != dim || h.cols() != dim)
    throw DomainError(std::string(what) + ": expected a " + std::to_string(dim) + "x" +
                      std::to_string(dim) + " matrix");
  if ((h - h.adjoint()).norm() > kValidationTol * std::max(1.0, h.norm()))
    throw DomainError(std::string(what) + ": matrix is not Hermitian");
}

}  // namespace

CMatrix local_number_operator() {
  CMatrix n = CMatrix::Zero(4, 4);
  n(1, 1) = 1.0;
  n(2, 2) = 1.0;
  n(3, 3) = 2.0;
  return n;
}

CMatrix pair_number_operator() {
  const CMatrix id = CMatrix::Identity(4, 4);
  const CMatrix n = local_number_operator();
  return kron(n, id) + kron(id, n);
}

const std::vector<CMatrix>& local_basis_F() {
  static const std::vector<CMatrix> basis = [] {
    const Eigen::VectorXd number = local_number_operator().diagonal().real();
    const std::vector<CMatrix> fixed = {CMatrix::Identity(4, 4) / 2.0};
    return gram_schmidt(block_hermitian_spanning_set(number), fixed);
  }();
  return basis;
}

const std::vector<CMatrix>& local_basis_G() {
  static const std::vector<CMatrix> basis = [] {
    const Eigen::VectorXd number = pair_number_operator().diagonal().real();
    const CMatrix id = CMatrix::Identity(4, 4);
    std::vector<CMatrix> fixed = {CMatrix::Identity(16, 16) / 4.0};
    for (const auto& f : local_basis_F()) fixed.push_back(kron(f, id) / 2.0);
    for (const auto& f : local_basis_F()) fixed.push_back(kron(id, f) / 2.0);
    return gram_schmidt(block_hermitian_spanning_set(number), fixed);
  }();
  return basis;
}

std::vector<LocalOperator> basis_F(const LatticeGeometry& geometry, int x) {
  if (x < 0 || x >= geometry.sites()) throw DomainError("site index outside lattice");
  std::vector<LocalOperator> out;
  for (const auto& m : local_basis_F()) out.push_back({x, -1, OperatorClass::kF, m});
  return out;
}

std::vector<LocalOperator> basis_G(const LatticeGeometry& geometry, int x, int y) {
  if (!geometry.are_neighbors(x, y))
    throw DomainError("G operators need a nearest-neighbor pair, got (" + std::to_string(x) +
                      ", " + std::to_string(y) + ")");
  std::vector<LocalOperator> out;
  for (const auto& m : local_basis_G()) out.push_back({x, y, OperatorClass::kG, m});
  return out;
}

// ---------------------------------------------------------------------------
// ControlField

int ControlField::parameter_count(const LatticeGeometry& geometry) {
  return 5 * geometry.sites() + 59 * static_cast<int>(geometry.neighbor_pairs().size());
}

ControlField ControlField::from_coefficients(const LatticeGeometry& geometry,
                                             const Eigen::VectorXd& c) {
  if (c.size() != parameter_count(geometry))
    throw DomainError("coefficient vector has wrong length");
  const auto& bf = local_basis_F();
  const auto& bg = local_basis_G();
  ControlField k(geometry);
  int idx = 0;
  for (int x = 0; x < geometry.sites(); ++x) {
    CMatrix h = CMatrix::Zero(4, 4);
    bool any = false;
    for (const auto& b : bf) {
      any = any || c(idx) != 0.0;
      h += (0.5 * c(idx++)) * b;
    }
    if (any) k.f_terms_[x] = h;
  }
  for (const auto& pr : geometry.neighbor_pairs()) {
    CMatrix h = CMatrix::Zero(16, 16);
    bool any = false;
    for (const auto& b : bg) {
      any = any || c(idx) != 0.0;
      h += c(idx++) * b;
    }
    if (any) k.g_terms_[pr] = h;
  }
  return k;
}

Eigen::VectorXd ControlField::coefficients() const {
  const auto& bf = local_basis_F();
  const auto& bg = local_basis_G();
  Eigen::VectorXd c = Eigen::VectorXd::Zero(parameter_count(geometry_));
  int idx = 0;
  for (int x = 0; x < geometry_.sites(); ++x) {
    auto it = f_terms_.find(x);
    for (const auto& b : bf) {
      if (it != f_terms_.end()) c(idx) = 2.0 * trace_inner(b, it->second);
      ++idx;
    }
  }
  for (const auto& pr : geometry_.neighbor_pairs()) {
    auto it = g_terms_.find(pr);
    for (const auto& b : bg) {
      if (it != g_terms_.end()) c(idx) = trace_inner(b, it->second);
      ++idx;
    }
  }
  return c;
}

ControlField ControlField::random(const LatticeGeometry& geometry, std::mt19937_64& rng,
                                  double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  Eigen::VectorXd c(parameter_count(geometry));
  for (int i = 0; i < c.size(); ++i) c(i) = normal(rng);
  return from_coefficients(geometry, c);
}

ControlField& ControlField::set_f(int x, const CMatrix& h) {
  if (x < 0 || x >= geometry_.sites()) throw DomainError("site index outside lattice");
  check_hermitian(h, 4, "F term");
  const double scale = std::max(1.0, h.norm());
  if (std::abs(h.trace()) > kValidationTol * scale) throw DomainError("F term: not traceless");
  const CMatrix n = local_number_operator();
  if ((h * n - n * h).norm() > kValidationTol * scale)
    throw DomainError("F term: does not commute with the local number operator");
  f_terms_[x] = h;
  return *this;
}

ControlField& ControlField::set_g(int x, int y, const CMatrix& h) {
  if (!geometry_.are_neighbors(x, y)) throw DomainError("G term needs a nearest-neighbor pair");
  check_hermitian(h, 16, "G term");
  CMatrix g = h;
  if (x > y) {
    // reorder the local index 4a+b -> 4b+a
    std::swap(x, y);
    for (int r = 0; r < 16; ++r)
      for (int c = 0; c < 16; ++c) g((r % 4) * 4 + r / 4, (c % 4) * 4 + c / 4) = h(r, c);
  }
  const double scale = std::max(1.0, g.norm());
  const CMatrix n = pair_number_operator();
  if ((g * n - n * g).norm() > kValidationTol * scale)
    throw DomainError("G term: does not commute with N_x + N_y");
  if (std::abs(g.trace()) > kValidationTol * scale) throw DomainError("G term: not traceless");
  const CMatrix id = CMatrix::Identity(4, 4);
  for (const auto& f : local_basis_F()) {
    if (std::abs(trace_inner(kron(f, id), g)) > kValidationTol * scale ||
        std::abs(trace_inner(kron(id, f), g)) > kValidationTol * scale)
      throw DomainError("G term: not orthogonal to the single-site operators");
  }
  g_terms_[{x, y}] = g;
  return *this;
}

bool ControlField::has_g(int x, int y) const {
  return g_terms_.count({std::min(x, y), std::max(x, y)}) > 0;
}

ControlField ControlField::operator+(const ControlField& o) const {
  if (o.geometry_ != geometry_) throw DomainError("adding control fields on different lattices");
  ControlField out = *this;
  for (const auto& [x, h] : o.f_terms_) {
    auto it = out.f_terms_.find(x);
    if (it == out.f_terms_.end())
      out.f_terms_[x] = h;
    else
      it->second += h;
  }
  for (const auto& [pr, h] : o.g_terms_) {
    auto it = out.g_terms_.find(pr);
    if (it == out.g_terms_.end())
      out.g_terms_[pr] = h;
    else
      it->second += h;
  }
  return out;
}

ControlField ControlField::scaled(double s) const {
  ControlField out = *this;
  for (auto& [x, h] : out.f_terms_) h *= s;
  for (auto& [pr, h] : out.g_terms_) h *= s;
  return out;
}

double ControlField::norm() const { return std::sqrt(std::max(0.0, inner_product(*this, *this))); }

double inner_product(const ControlField& k, const ControlField& kp) {
  if (k.geometry() != kp.geometry())
    throw DomainError("inner product between fields on different lattices");
  double acc = 0.0;
  for (const auto& [x, h] : k.f_terms()) {
    auto it = kp.f_terms().find(x);
    if (it != kp.f_terms().end()) acc += 4.0 * trace_inner(h, it->second);
  }
  for (const auto& [pr, h] : k.g_terms()) {
    auto it = kp.g_terms().find(pr);
    if (it != kp.g_terms().end()) acc += trace_inner(h, it->second);
  }
  return acc;
}

// ---------------------------------------------------------------------------
// SectorEmbedding

SectorEmbedding::SectorEmbedding(SectorPtr sector) : sector_(std::move(sector)) {
  if (!sector_) throw DomainError("embedding needs a sector");
}

int SectorEmbedding::local_index(int state, int site) const {
  // local index coincides with the two mode bits of the site (up = 1, down = 2)
  return static_cast<int>((sector_->state(state).mask() >> (2 * site)) & 3u);
}

int SectorEmbedding::replace_site(int state, int site, int local) const {
  std::uint64_t mask = sector_->state(state).mask();
  mask &= ~(std::uint64_t{3} << (2 * site));
  mask |= static_cast<std::uint64_t>(local) << (2 * site);
  auto idx = sector_->index_of(FockBasisState(mask));
  return idx ? *idx : -1;
}

int SectorEmbedding::replace_pair(int state, int x, int y, int a, int b) const {
  std::uint64_t mask = sector_->state(state).mask();
  mask &= ~(std::uint64_t{3} << (2 * x));
  mask &= ~(std::uint64_t{3} << (2 * y));
  mask |= static_cast<std::uint64_t>(a) << (2 * x);
  mask |= static_cast<std::uint64_t>(b) << (2 * y);
  auto idx = sector_->index_of(FockBasisState(mask));
  return idx ? *idx : -1;
}

std::vector<SectorEmbedding::Entry> SectorEmbedding::site_entries(int x, const CMatrix& h) const {
  std::vector<Entry> out;
  for (int i = 0; i < dim(); ++i) {
    const int l = local_index(i, x);
    for (int lp = 0; lp < 4; ++lp) {
      const Complex v = h(lp, l);
      if (v == Complex(0.0)) continue;
      const int j = replace_site(i, x, lp);
      if (j >= 0) out.push_back({j, i, v});
    }
  }
  return out;
}

std::vector<SectorEmbedding::Entry> SectorEmbedding::pair_entries(int x, int y,
                                                                  const CMatrix& h) const {
  std::vector<Entry> out;
  for (int i = 0; i < dim(); ++i) {
    const int col = 4 * local_index(i, x) + local_index(i, y);
    for (int row = 0; row < 16; ++row) {
      const Complex v = h(row, col);
      if (std::abs(v) < 1e-15) continue;
      const int j = replace_pair(i, x, y, row / 4, row % 4);
      if (j >= 0) out.push_back({j, i, v});
    }
  }
  return out;
}

void SectorEmbedding::add_site(CMatrix& out, int x, const CMatrix& h, Complex coeff) const {
  for (const auto& e : site_entries(x, h)) out(e.row, e.col) += coeff * e.value;
}

void SectorEmbedding::add_pair(CMatrix& out, int x, int y, const CMatrix& h,
                               Complex coeff) const {
  for (const auto& e : pair_entries(x, y, h)) out(e.row, e.col) += coeff * e.value;
}

CMatrix SectorEmbedding::embed(const ControlField& k) const {
  if (k.geometry() != sector_->geometry())
    throw DomainError("control field and sector live on different lattices");
  CMatrix out = CMatrix::Zero(dim(), dim());
  for (const auto& [x, h] : k.f_terms()) add_site(out, x, h);
  for (const auto& [pr, h] : k.g_terms()) add_pair(out, pr.first, pr.second, h);
  return out;
}

CMatrix embed(const ControlField& k, const SectorBasis& sector) {
  SectorEmbedding e(std::make_shared<const SectorBasis>(sector));
  return e.embed(k);
}

CMatrix embed_full(const ControlField& k) {
  const int sites = k.geometry().sites();
  if (sites > 6) throw CapExceededError("full-space embedding", sites, 6);
  const int dim = 1 << (2 * sites);
  auto digit = [&](int idx, int x) { return (idx >> (2 * (sites - 1 - x))) & 3; };
  auto with_digit = [&](int idx, int x, int v) {
    const int shift = 2 * (sites - 1 - x);
    return (idx & ~(3 << shift)) | (v << shift);
  };
  CMatrix out = CMatrix::Zero(dim, dim);
  for (int s = 0; s < dim; ++s) {
    for (const auto& [x, h] : k.f_terms()) {
      const int l = digit(s, x);
      for (int lp = 0; lp < 4; ++lp) out(with_digit(s, x, lp), s) += h(lp, l);
    }
    for (const auto& [pr, h] : k.g_terms()) {
      const int col = 4 * digit(s, pr.first) + digit(s, pr.second);
      for (int row = 0; row < 16; ++row)
        out(with_digit(with_digit(s, pr.first, row / 4), pr.second, row % 4), s) += h(row, col);
    }
  }
  return out;
}

EmbeddedBasis embed_basis(const SectorPtr& sector) {
  EmbeddedBasis out;
  auto emb = std::make_shared<const SectorEmbedding>(sector);
  const auto& g = sector->geometry();
  for (int x = 0; x < g.sites(); ++x)
    for (const auto& b : local_basis_F()) out.elements.push_back(emb->site_entries(x, 0.5 * b));
  for (const auto& pr : g.neighbor_pairs())
    for (const auto& b : local_basis_G())
      out.elements.push_back(emb->pair_entries(pr.first, pr.second, b));
  out.embedding = std::move(emb);
  return out;
}

}  // namespace branchlab
