#pragma once
// The truncated function algebra in the eigenbasis.
//
//   c_ijk     = (1/n) sum_s phi_i(s) phi_j(s) phi_k(s) D(s)     (phi_i phi_j = sum_k c_ijk phi_k)
//   Gamma_ijs = (lambda_i + lambda_j - lambda_s) c_ijs / 2       (Gamma(phi_i, phi_j) = sum_s Gamma_ijs phi_s)
//
// Functions are coefficient vectors against phi_0..phi_{n0-1}.

#include "diffgeo/core.hpp"
#include "diffgeo/kernel.hpp"

#include <cstdint>
#include <ostream>
#include <vector>

namespace diffgeo {

/// Dense cubic tensor with the last index contiguous.
class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(Index size) : size_(size), data_(std::size_t(size * size * size), 0.0) {}

  Index size() const { return size_; }
  double& operator()(Index i, Index j, Index k) { return data_[offset(i, j, k)]; }
  double operator()(Index i, Index j, Index k) const { return data_[offset(i, j, k)]; }

  /// The fibre (i, j, :).
  Eigen::Map<const Vec> fibre(Index i, Index j) const { return {data_.data() + offset(i, j, 0), size_}; }
  Eigen::Map<Vec> fibre(Index i, Index j) { return {data_.data() + offset(i, j, 0), size_}; }

  /// The slice (i, :, :) as a row-major size x size matrix.
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> slice(Index i) const {
    return {data_.data() + offset(i, 0, 0), size_, size_};
  }

  /// View as an (size^2) x size row-major matrix with rows indexed by i * size + j.
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> unfolded() const {
    return {data_.data(), size_ * size_, size_};
  }

  const std::vector<double>& data() const { return data_; }

 private:
  std::size_t offset(Index i, Index j, Index k) const { return std::size_t((i * size_ + j) * size_ + k); }

  Index size_ = 0;
  std::vector<double> data_;
};

struct StructureTensor {
  Tensor3 c;
};

struct CarreTensor {
  Tensor3 gamma;
};

inline StructureTensor structure_constants(const SpectralBasis& basis, Index limit) {
  detail::require(limit >= 1 && limit <= basis.size(), "structure_constants: limit must lie in [1, n0]");
  const Index n = basis.points();
  const auto& phi = basis.eigenfunctions;
  const double inv_n = 1.0 / double(n);
  StructureTensor out{Tensor3(limit)};
  // c_ijk = sum_s (phi_i D / n)(s) * (phi_j phi_k)(s); assemble k-fibres with one GEMV per (i, j).
  const Mat weighted = (phi.leftCols(limit).array().colwise() * (basis.density.array() * inv_n)).matrix();
  Mat pair(n, limit);
  for (Index i = 0; i < limit; ++i) {
    for (Index j = i; j < limit; ++j) {
      const Vec w = weighted.col(i).cwiseProduct(phi.col(j));
      const Vec fibre = phi.leftCols(limit).transpose() * w;
      for (Index k = 0; k < limit; ++k) {
        // Fill the full orbit of (i, j, k) so the tensor is exactly symmetric.
        const double v = (k >= j) ? fibre(k) : out.c(i, k, j);
        out.c(i, j, k) = v;
        out.c(j, i, k) = v;
        out.c(i, k, j) = v;
        out.c(k, i, j) = v;
        out.c(j, k, i) = v;
        out.c(k, j, i) = v;
      }
    }
  }
  return out;
}

inline CarreTensor carre_tensor(const SpectralBasis& basis, const StructureTensor& c) {
  const Index m = c.c.size();
  detail::require(m <= basis.size(), "carre_tensor: structure tensor larger than the basis");
  const Vec& lam = basis.eigenvalues;
  CarreTensor out{Tensor3(m)};
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j)
      for (Index s = 0; s < m; ++s) out.gamma(i, j, s) = 0.5 * (lam(i) + lam(j) - lam(s)) * c.c(i, j, s);
  return out;
}

/// Everything downstream needs: the basis plus its algebra tensors, truncated to `size()`.
struct SpectralGeometry {
  SpectralBasis basis;
  StructureTensor structure;
  CarreTensor carre;

  Index size() const { return structure.c.size(); }
  double phi0() const { return basis.phi0(); }
  const Vec& eigenvalues() const { return basis.eigenvalues; }
  const Tensor3& c() const { return structure.c; }
  const Tensor3& gamma() const { return carre.gamma; }

  /// Coefficients of the constant function 1.
  Vec one() const {
    Vec e = Vec::Zero(size());
    e(0) = 1.0 / phi0();
    return e;
  }
  /// Coefficients of the basis function phi_i.
  Vec unit(Index i) const {
    Vec e = Vec::Zero(size());
    e(i) = 1.0;
    return e;
  }
  /// Integral against the stationary measure.
  double integrate(const Vec& f) const { return f(0) / phi0(); }
};

inline SpectralGeometry make_geometry(SpectralBasis basis, Index limit = -1) {
  if (limit < 0) limit = basis.size();
  SpectralGeometry g;
  g.structure = structure_constants(basis, limit);
  g.carre = carre_tensor(basis, g.structure);
  g.basis = std::move(basis);
  return g;
}

/// Product in the truncated algebra: (f h)_k = sum_ij f_i h_j c_ijk.
inline Vec multiply(const Vec& f, const Vec& h, const StructureTensor& c) {
  const Index m = c.c.size();
  detail::require(f.size() <= m && h.size() <= m, "multiply: coefficient vector longer than the tensor limit");
  Vec out = Vec::Zero(m);
  for (Index i = 0; i < f.size(); ++i) {
    if (f(i) == 0.0) continue;
    for (Index j = 0; j < h.size(); ++j) {
      const double w = f(i) * h(j);
      if (w != 0.0) out.noalias() += w * c.c.fibre(i, j);
    }
  }
  return out;
}

inline Vec multiply(const Vec& f, const Vec& h, const SpectralGeometry& g) { return multiply(f, h, g.structure); }

/// Carre du champ of two functions: Gamma(f, h)_s = sum_ij f_i h_j Gamma_ijs.
inline Vec carre(const Vec& f, const Vec& h, const SpectralGeometry& g) {
  const Index m = g.size();
  detail::require(f.size() <= m && h.size() <= m, "carre: coefficient vector longer than the tensor limit");
  Vec out = Vec::Zero(m);
  for (Index i = 0; i < f.size(); ++i) {
    if (f(i) == 0.0) continue;
    for (Index j = 0; j < h.size(); ++j) {
      const double w = f(i) * h(j);
      if (w != 0.0) out.noalias() += w * g.gamma().fibre(i, j);
    }
  }
  return out;
}

/// Generator applied in coefficients: (L f)_i = lambda_i f_i.
inline Vec apply_generator(const Vec& f, const SpectralGeometry& g) {
  return f.cwiseProduct(g.eigenvalues().head(f.size()));
}

/// Point values of a coefficient vector.
inline Vec eval(const Vec& f, const SpectralBasis& basis) {
  detail::require(f.size() <= basis.size(), "eval: coefficient vector longer than the basis");
  return basis.eigenfunctions.leftCols(f.size()) * f;
}

/// D-weighted projection of point values onto the basis.
inline Vec expand(const Vec& values, const SpectralBasis& basis) {
  detail::require(values.size() == basis.points(), "expand: value count does not match the point count");
  return basis.eigenfunctions.transpose() * values.cwiseProduct(basis.density) / double(basis.points());
}

/// Flat binary layout: uint64 rank, uint64 dims..., then row-major float64 data.
inline void write_flat(std::ostream& out, const Tensor3& t) {
  const std::uint64_t rank = 3;
  const std::uint64_t dim = std::uint64_t(t.size());
  out.write(reinterpret_cast<const char*>(&rank), sizeof rank);
  for (int i = 0; i < 3; ++i) out.write(reinterpret_cast<const char*>(&dim), sizeof dim);
  out.write(reinterpret_cast<const char*>(t.data().data()), std::streamsize(t.data().size() * sizeof(double)));
}

}  // namespace diffgeo
