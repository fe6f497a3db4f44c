#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

#include <nlohmann/json.hpp>

#include "lieosc/dual_spectrum.hpp"
#include "lieosc/group_domain.hpp"

namespace lieosc {

using Complex = std::complex<double>;

/// Complex samples of a function on a quadrature grid.
class GridFunction {
 public:
  GridFunction(GridPtr grid, std::vector<Complex> values);
  static GridFunction zeros(GridPtr grid);
  static GridFunction constant(GridPtr grid, Complex c);
  static GridFunction from(GridPtr grid, const std::function<Complex(const GroupPoint&)>& f);

  const GridPtr& grid() const { return grid_; }
  const QuadratureGrid& grid_ref() const { return *grid_; }
  std::size_t size() const { return values_.size(); }
  const std::vector<Complex>& values() const { return values_; }
  std::vector<Complex>& values() { return values_; }
  Complex operator[](std::size_t i) const { return values_[i]; }
  Complex& operator[](std::size_t i) { return values_[i]; }

  /// Grid quadrature of f.
  Complex integral() const;
  double l1_norm() const;
  double l2_norm_squared() const;
  double sup_norm() const;

  GridFunction& operator+=(const GridFunction& other);
  GridFunction& operator-=(const GridFunction& other);
  GridFunction& operator*=(Complex c);

 private:
  GridPtr grid_;
  std::vector<Complex> values_;
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(Complex c, GridFunction a);

/// Dense per-representation Fourier coefficients, stored in canonical order.
class FourierCoefficients {
 public:
  /// All-zero coefficients for every index with <xi> <= bandwidth.
  static FourierCoefficients zeros(const GroupId& group, double bandwidth);

  const GroupId& group() const { return group_; }
  double bandwidth() const { return bandwidth_; }
  std::size_t size() const { return indices_.size(); }
  const std::vector<DualIndex>& indices() const { return indices_; }
  const DualIndex& index(std::size_t i) const { return indices_[i]; }
  const Matrix& block(std::size_t i) const { return blocks_[i]; }
  Matrix& block(std::size_t i) { return blocks_[i]; }

  bool contains(const DualIndex& index) const;
  const Matrix& at(const DualIndex& index) const;
  Matrix& at(const DualIndex& index);

  /// {group, bandwidth, entries: [{index, re[][], im[][]}]}
  nlohmann::json to_json() const;
  static FourierCoefficients from_json(const nlohmann::json& j);

 private:
  FourierCoefficients(GroupId group, double bandwidth);
  std::size_t position(const DualIndex& index) const;

  GroupId group_;
  double bandwidth_;
  std::vector<DualIndex> indices_;
  std::vector<Matrix> blocks_;
};

/// f^(xi) = sum_x w_x f(x) xi(x)^*, for every xi with <xi> <= bandwidth.
/// Throws ResolutionError when the grid cannot resolve the bandwidth.
FourierCoefficients forward_transform(const GridFunction& f, double bandwidth);

/// f(x) = sum_xi d_xi Tr[xi(x) f^(xi)] at every grid point.
GridFunction inverse_transform(const FourierCoefficients& coeffs, GridPtr grid);

/// The same series evaluated at an arbitrary point.
Complex evaluate_series(const FourierCoefficients& coeffs, const GroupPoint& x);

/// sum_xi d_xi ||f^(xi)||_HS^2
double plancherel_energy(const FourierCoefficients& coeffs);

/// sum_xi d_xi Tr[f^(xi) g^(xi)^*]
Complex fourier_inner_product(const FourierCoefficients& f, const FourierCoefficients& g);

/// Coefficients of the right convolution f * K: entry k^(xi) f^(xi).
FourierCoefficients convolve_fourier(const FourierCoefficients& fhat, const FourierCoefficients& khat);

/// Left translation x -> K(y^{-1} x) on the Fourier side: K^(xi) xi(y)^*.
FourierCoefficients left_translate(const FourierCoefficients& coeffs, const GroupPoint& y);

enum class KernelEvaluation {
  Resynthesis,  // K(z) from its band-limited series, evaluated at z exactly
  NearestGrid,  // K(z) taken at the grid point nearest to z (diagnostics only)
};

struct DirectConvolutionOptions {
  KernelEvaluation mode = KernelEvaluation::Resynthesis;
  double bandwidth = 0;  // required for Resynthesis
};

/// (f * K)(x) = sum_y w_y f(y) K(y^{-1} x) by double quadrature.
GridFunction convolve_direct(const GridFunction& f, const GridFunction& kernel,
                             const DirectConvolutionOptions& options);

/// Double quadrature against a kernel known in closed form.
GridFunction convolve_direct(const GridFunction& f,
                             const std::function<Complex(const GroupPoint&)>& kernel);

}  // namespace lieosc
