#include "lieosc/group_fourier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lieosc/errors.hpp"

namespace lieosc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_same_grid(const GridFunction& a, const GridFunction& b) {
  if (a.grid() != b.grid()) throw InvalidArgument("grid functions live on different grids");
}

Complex pairwise_complex(const std::vector<Complex>& v) {
  std::vector<double> re(v.size()), im(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    re[i] = v[i].real();
    im[i] = v[i].imag();
  }
  return {pairwise_sum(re), pairwise_sum(im)};
}

// e^{2 pi i t / m}, t = 0..m-1.
std::vector<Complex> roots_of_unity(int m) {
  std::vector<Complex> r(m);
  for (int t = 0; t < m; ++t) r[t] = std::polar(1.0, kTwoPi * t / m);
  return r;
}

// Applies out[.., o, ..] = sum_i T(o, i) in[.., i, ..] along one axis of a row-major tensor.
std::vector<Complex> transform_axis(const std::vector<Complex>& in, std::vector<int>& shape, int axis,
                                    const Matrix& t) {
  std::size_t outer = 1, inner = 1;
  for (int k = 0; k < axis; ++k) outer *= shape[k];
  for (std::size_t k = axis + 1; k < shape.size(); ++k) inner *= shape[k];
  const int n_in = shape[axis];
  const int n_out = static_cast<int>(t.rows());
  std::vector<Complex> out(outer * n_out * inner);
  for (std::size_t a = 0; a < outer; ++a)
    for (int o = 0; o < n_out; ++o) {
      Complex* dst = &out[(a * n_out + o) * inner];
      for (int i = 0; i < n_in; ++i) {
        const Complex c = t(o, i);
        const Complex* src = &in[(a * n_in + i) * inner];
        for (std::size_t b = 0; b < inner; ++b) dst[b] += c * src[b];
      }
    }
  shape[axis] = n_out;
  return out;
}

int torus_side(const QuadratureGrid& g) { return 2 * g.resolution(); }

// Torus coefficients on the full cube [-M, M]^n, row-major.
std::vector<Complex> torus_cube_forward(const GridFunction& f, int m_max) {
  const auto& g = f.grid_ref();
  const int n = g.group().dimension();
  const int m = torus_side(g);
  const auto roots = roots_of_unity(m);
  Matrix t(2 * m_max + 1, m);
  for (int o = 0; o <= 2 * m_max; ++o) {
    const int l = o - m_max;
    for (int j = 0; j < m; ++j) {
      long long e = (static_cast<long long>(-l) * j) % m;
      if (e < 0) e += m;
      t(o, j) = roots[e];
    }
  }
  std::vector<Complex> data(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) data[i] = g.weight(i) * f[i];
  std::vector<int> shape(n, m);
  for (int k = 0; k < n; ++k) data = transform_axis(data, shape, k, t);
  return data;
}

std::vector<Complex> torus_cube_inverse(const std::vector<Complex>& cube, int m_max, const QuadratureGrid& g) {
  const int n = g.group().dimension();
  const int m = torus_side(g);
  const auto roots = roots_of_unity(m);
  Matrix t(m, 2 * m_max + 1);
  for (int j = 0; j < m; ++j)
    for (int o = 0; o <= 2 * m_max; ++o) {
      const int l = o - m_max;
      long long e = (static_cast<long long>(l) * j) % m;
      if (e < 0) e += m;
      t(j, o) = roots[e];
    }
  std::vector<int> shape(n, 2 * m_max + 1);
  std::vector<Complex> data = cube;
  for (int k = 0; k < n; ++k) data = transform_axis(data, shape, k, t);
  return data;
}

std::size_t cube_offset(const std::vector<int>& ell, int m_max) {
  std::size_t off = 0;
  for (int l : ell) off = off * (2 * m_max + 1) + static_cast<std::size_t>(l + m_max);
  return off;
}

int max_stored_level(const FourierCoefficients& c) {
  int m = 0;
  for (const auto& idx : c.indices()) {
    if (const auto* s = std::get_if<Su2Spin>(&idx)) {
      m = std::max(m, s->two_l);
    } else {
      for (int l : std::get<TorusFreq>(idx).ell) m = std::max(m, std::abs(l));
    }
  }
  return m;
}

// Per-spin phase tables over the Euler alpha and gamma nodes: e^{-i m x}, rows m = l..-l.
Matrix euler_phases(const std::vector<double>& nodes, int two_l, double sign) {
  Matrix p(two_l + 1, nodes.size());
  for (int r = 0; r <= two_l; ++r) {
    const double mm = 0.5 * (two_l - 2 * r);
    for (std::size_t j = 0; j < nodes.size(); ++j) p(r, j) = std::polar(1.0, sign * mm * nodes[j]);
  }
  return p;
}

FourierCoefficients su2_forward(const GridFunction& f, FourierCoefficients out) {
  const auto& g = f.grid_ref();
  const EulerLayout& e = *g.euler();
  const int na = static_cast<int>(e.alpha.size()), nb = static_cast<int>(e.beta.size()),
            ng = static_cast<int>(e.gamma.size());
  const double scale = g.weight(0) / e.beta_weights[0];
  for (std::size_t s = 0; s < out.size(); ++s) {
    const int two_l = std::get<Su2Spin>(out.index(s)).two_l;
    const int d = two_l + 1;
    // conj D_ab = d_ab(beta) e^{i m_a alpha} e^{i m_b gamma}; the block is the transpose of the sum.
    const Matrix pa = euler_phases(e.alpha, two_l, 1.0);
    const Matrix pg = euler_phases(e.gamma, two_l, 1.0);
    Matrix acc = Matrix::Zero(d, d);
    for (int ib = 0; ib < nb; ++ib) {
      Matrix fab(na, ng);
      for (int ia = 0; ia < na; ++ia)
        for (int ig = 0; ig < ng; ++ig) fab(ia, ig) = f[(static_cast<std::size_t>(ia) * nb + ib) * ng + ig];
      const Matrix h = pa * fab * pg.transpose();  // (a, b)
      const Eigen::MatrixXd small = wigner_small_d(two_l, e.beta[ib]);
      acc += (e.beta_weights[ib] * scale) * (small.cast<Complex>().cwiseProduct(h));
    }
    out.block(s) = acc.transpose();
  }
  return out;
}

std::vector<Complex> su2_inverse(const FourierCoefficients& c, const QuadratureGrid& g) {
  const EulerLayout& e = *g.euler();
  const int na = static_cast<int>(e.alpha.size()), nb = static_cast<int>(e.beta.size()),
            ng = static_cast<int>(e.gamma.size());
  std::vector<Complex> values(g.size());
  for (std::size_t s = 0; s < c.size(); ++s) {
    const int two_l = std::get<Su2Spin>(c.index(s)).two_l;
    const Matrix& block = c.block(s);
    if (block.isZero(0.0)) continue;
    const Matrix pa = euler_phases(e.alpha, two_l, -1.0);
    const Matrix pg = euler_phases(e.gamma, two_l, -1.0);
    const Matrix ft = static_cast<double>(two_l + 1) * block.transpose();
    for (int ib = 0; ib < nb; ++ib) {
      const Eigen::MatrixXd small = wigner_small_d(two_l, e.beta[ib]);
      // Tr[D F] = sum_ab d_ab e^{-i m_a alpha} e^{-i m_b gamma} F_ba
      const Matrix m = small.cast<Complex>().cwiseProduct(ft);
      const Matrix v = pa.transpose() * m * pg;  // (ia, ig)
      for (int ia = 0; ia < na; ++ia)
        for (int ig = 0; ig < ng; ++ig) values[(static_cast<std::size_t>(ia) * nb + ib) * ng + ig] += v(ia, ig);
    }
  }
  return values;
}

std::size_t nearest_grid_index(const QuadratureGrid& g, const GroupPoint& z) {
  if (g.group().is_torus()) {
    const int m = torus_side(g);
    std::size_t idx = 0;
    for (double c : z.as_torus().coords) {
      long long j = std::llround(c * m) % m;
      idx = idx * m + static_cast<std::size_t>(j);
    }
    return idx;
  }
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < g.size(); ++i) {
    double d = distance(g.point(i), z);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

}  // namespace

GridFunction::GridFunction(GridPtr grid, std::vector<Complex> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw InvalidArgument("grid function needs a grid");
  if (values_.size() != grid_->size()) throw InvalidArgument("grid function has the wrong number of samples");
  for (const auto& v : values_)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw InvalidArgument("grid function value is not finite");
}

GridFunction GridFunction::zeros(GridPtr grid) {
  const std::size_t n = grid->size();
  return GridFunction(std::move(grid), std::vector<Complex>(n));
}

GridFunction GridFunction::constant(GridPtr grid, Complex c) {
  const std::size_t n = grid->size();
  return GridFunction(std::move(grid), std::vector<Complex>(n, c));
}

GridFunction GridFunction::from(GridPtr grid, const std::function<Complex(const GroupPoint&)>& f) {
  std::vector<Complex> v;
  v.reserve(grid->size());
  for (const auto& p : grid->points()) v.push_back(f(p));
  return GridFunction(std::move(grid), std::move(v));
}

Complex GridFunction::integral() const {
  std::vector<Complex> t(values_.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = grid_->weight(i) * values_[i];
  return pairwise_complex(t);
}

double GridFunction::l1_norm() const {
  std::vector<double> t(values_.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = grid_->weight(i) * std::abs(values_[i]);
  return pairwise_sum(t);
}

double GridFunction::l2_norm_squared() const {
  std::vector<double> t(values_.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = grid_->weight(i) * std::norm(values_[i]);
  return pairwise_sum(t);
}

double GridFunction::sup_norm() const {
  double m = 0.0;
  for (const auto& v : values_) m = std::max(m, std::abs(v));
  return m;
}

GridFunction& GridFunction::operator+=(const GridFunction& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

GridFunction& GridFunction::operator*=(Complex c) {
  for (auto& v : values_) v *= c;
  return *this;
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(Complex c, GridFunction a) { return a *= c; }

FourierCoefficients::FourierCoefficients(GroupId group, double bandwidth)
    : group_(group), bandwidth_(bandwidth), indices_(enumerate_dual(group, bandwidth)) {
  blocks_.reserve(indices_.size());
  for (const auto& idx : indices_) {
    const int d = spectral_data(group_, idx).dim;
    blocks_.push_back(Matrix::Zero(d, d));
  }
}

FourierCoefficients FourierCoefficients::zeros(const GroupId& group, double bandwidth) {
  return FourierCoefficients(group, bandwidth);
}

std::size_t FourierCoefficients::position(const DualIndex& index) const {
  check_index(group_, index);
  auto it = std::lower_bound(indices_.begin(), indices_.end(), index);
  if (it == indices_.end() || *it != index) return indices_.size();
  return static_cast<std::size_t>(it - indices_.begin());
}

bool FourierCoefficients::contains(const DualIndex& index) const { return position(index) < indices_.size(); }

const Matrix& FourierCoefficients::at(const DualIndex& index) const {
  std::size_t p = position(index);
  if (p == indices_.size())
    throw InvalidArgument("index " + to_string(index) + " lies outside bandwidth " + std::to_string(bandwidth_));
  return blocks_[p];
}

Matrix& FourierCoefficients::at(const DualIndex& index) {
  return const_cast<Matrix&>(static_cast<const FourierCoefficients&>(*this).at(index));
}

nlohmann::json FourierCoefficients::to_json() const {
  nlohmann::json entries = nlohmann::json::array();
  for (std::size_t s = 0; s < indices_.size(); ++s) {
    nlohmann::json e;
    if (const auto* sp = std::get_if<Su2Spin>(&indices_[s])) {
      e["index"] = {{"two_l", sp->two_l}};
    } else {
      e["index"] = std::get<TorusFreq>(indices_[s]).ell;
    }
    const Matrix& b = blocks_[s];
    nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
    for (Eigen::Index r = 0; r < b.rows(); ++r) {
      std::vector<double> rr, ii;
      for (Eigen::Index c = 0; c < b.cols(); ++c) {
        rr.push_back(b(r, c).real());
        ii.push_back(b(r, c).imag());
      }
      re.push_back(rr);
      im.push_back(ii);
    }
    e["re"] = re;
    e["im"] = im;
    entries.push_back(std::move(e));
  }
  return {{"group", group_.name()}, {"bandwidth", bandwidth_}, {"entries", entries}};
}

FourierCoefficients FourierCoefficients::from_json(const nlohmann::json& j) {
  try {
    FourierCoefficients out(GroupId::parse(j.at("group").get<std::string>()), j.at("bandwidth").get<double>());
    for (const auto& e : j.at("entries")) {
      DualIndex idx = out.group_.is_su2() ? DualIndex(Su2Spin{e.at("index").at("two_l").get<int>()})
                                          : DualIndex(TorusFreq{e.at("index").get<std::vector<int>>()});
      Matrix& b = out.at(idx);
      const auto& re = e.at("re");
      const auto& im = e.at("im");
      if (static_cast<Eigen::Index>(re.size()) != b.rows() || static_cast<Eigen::Index>(im.size()) != b.rows())
        throw InvalidArgument("coefficient block for " + to_string(idx) + " has the wrong shape");
      for (Eigen::Index r = 0; r < b.rows(); ++r) {
        if (static_cast<Eigen::Index>(re[r].size()) != b.cols() || static_cast<Eigen::Index>(im[r].size()) != b.cols())
          throw InvalidArgument("coefficient block for " + to_string(idx) + " has the wrong shape");
        for (Eigen::Index c = 0; c < b.cols(); ++c) b(r, c) = {re[r][c].get<double>(), im[r][c].get<double>()};
      }
    }
    return out;
  } catch (const nlohmann::json::exception& ex) {
    throw InvalidArgument(std::string("malformed coefficient JSON: ") + ex.what());
  }
}

FourierCoefficients forward_transform(const GridFunction& f, double bandwidth) {
  const auto& g = f.grid_ref();
  if (!g.supports_bandwidth(bandwidth))
    throw ResolutionError("grid " + g.group().name() + " B=" + std::to_string(g.resolution()) +
                          " cannot resolve bandwidth " + std::to_string(bandwidth) + " (needs B > " +
                          std::to_string(max_level_for_bandwidth(g.group(), bandwidth)) + ")");
  auto out = FourierCoefficients::zeros(g.group(), bandwidth);
  if (g.group().is_su2()) return su2_forward(f, std::move(out));
  const int m_max = max_stored_level(out);
  const auto cube = torus_cube_forward(f, m_max);
  for (std::size_t s = 0; s < out.size(); ++s)
    out.block(s)(0, 0) = cube[cube_offset(std::get<TorusFreq>(out.index(s)).ell, m_max)];
  return out;
}

GridFunction inverse_transform(const FourierCoefficients& coeffs, GridPtr grid) {
  if (grid->group() != coeffs.group()) throw InvalidArgument("coefficients and grid belong to different groups");
  if (coeffs.group().is_su2()) {
    auto v = su2_inverse(coeffs, *grid);
    return GridFunction(std::move(grid), std::move(v));
  }
  const int m_max = max_stored_level(coeffs);
  const int n = coeffs.group().dimension();
  std::size_t cube_size = 1;
  for (int k = 0; k < n; ++k) cube_size *= static_cast<std::size_t>(2 * m_max + 1);
  std::vector<Complex> cube(cube_size);
  for (std::size_t s = 0; s < coeffs.size(); ++s)
    cube[cube_offset(std::get<TorusFreq>(coeffs.index(s)).ell, m_max)] = coeffs.block(s)(0, 0);
  auto v = torus_cube_inverse(cube, m_max, *grid);
  return GridFunction(std::move(grid), std::move(v));
}

Complex evaluate_series(const FourierCoefficients& coeffs, const GroupPoint& x) {
  const GroupId& group = coeffs.group();
  if (x.group() != group) throw InvalidArgument("point does not belong to " + group.name());
  if (group.is_torus()) {
    const int m_max = max_stored_level(coeffs);
    const auto& c = x.as_torus().coords;
    // powers[k][l + M] = e^{2 pi i l x_k}
    std::vector<std::vector<Complex>> powers(c.size(), std::vector<Complex>(2 * m_max + 1));
    for (std::size_t k = 0; k < c.size(); ++k)
      for (int l = -m_max; l <= m_max; ++l) powers[k][l + m_max] = std::polar(1.0, kTwoPi * l * c[k]);
    Complex s = 0.0;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      Complex e = coeffs.block(i)(0, 0);
      const auto& ell = std::get<TorusFreq>(coeffs.index(i)).ell;
      for (std::size_t k = 0; k < ell.size(); ++k) e *= powers[k][ell[k] + m_max];
      s += e;
    }
    return s;
  }
  const Su2Euler e = x.su2_euler();
  Complex s = 0.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    const Matrix& f = coeffs.block(i);
    if (f.isZero(0.0)) continue;
    const int two_l = std::get<Su2Spin>(coeffs.index(i)).two_l;
    const Eigen::MatrixXd small = wigner_small_d(two_l, e.beta);
    Complex t = 0.0;
    for (int a = 0; a <= two_l; ++a) {
      const double ma = 0.5 * (two_l - 2 * a);
      for (int b = 0; b <= two_l; ++b) {
        const double mb = 0.5 * (two_l - 2 * b);
        t += small(a, b) * std::polar(1.0, -((ma + mb) * e.half_sum + (ma - mb) * e.half_diff)) * f(b, a);
      }
    }
    s += static_cast<double>(two_l + 1) * t;
  }
  return s;
}

double plancherel_energy(const FourierCoefficients& coeffs) {
  std::vector<double> t(coeffs.size());
  for (std::size_t i = 0; i < coeffs.size(); ++i)
    t[i] = spectral_data(coeffs.group(), coeffs.index(i)).dim * coeffs.block(i).squaredNorm();
  return pairwise_sum(t);
}

Complex fourier_inner_product(const FourierCoefficients& f, const FourierCoefficients& g) {
  if (f.group() != g.group() || f.size() != g.size()) throw InvalidArgument("coefficient sets do not match");
  std::vector<Complex> t(f.size());
  for (std::size_t i = 0; i < f.size(); ++i)
    t[i] = static_cast<double>(spectral_data(f.group(), f.index(i)).dim) * (f.block(i) * g.block(i).adjoint()).trace();
  return pairwise_complex(t);
}

FourierCoefficients convolve_fourier(const FourierCoefficients& fhat, const FourierCoefficients& khat) {
  if (fhat.group() != khat.group()) throw InvalidArgument("coefficients belong to different groups");
  if (fhat.bandwidth() != khat.bandwidth() || fhat.size() != khat.size())
    throw InvalidArgument("convolution needs equal bandwidths");
  auto out = FourierCoefficients::zeros(fhat.group(), fhat.bandwidth());
  for (std::size_t i = 0; i < out.size(); ++i) out.block(i) = khat.block(i) * fhat.block(i);
  return out;
}

FourierCoefficients left_translate(const FourierCoefficients& coeffs, const GroupPoint& y) {
  auto out = FourierCoefficients::zeros(coeffs.group(), coeffs.bandwidth());
  if (coeffs.group().is_torus()) {
    const auto& c = y.as_torus().coords;
    for (std::size_t i = 0; i < out.size(); ++i) {
      const auto& ell = std::get<TorusFreq>(coeffs.index(i)).ell;
      double phase = 0.0;
      for (std::size_t k = 0; k < ell.size(); ++k) phase += ell[k] * c[k];
      out.block(i) = coeffs.block(i) * std::polar(1.0, -kTwoPi * phase);
    }
    return out;
  }
  for (std::size_t i = 0; i < out.size(); ++i)
    out.block(i) = coeffs.block(i) * representation_matrix(coeffs.group(), coeffs.index(i), y).adjoint();
  return out;
}

GridFunction convolve_direct(const GridFunction& f, const GridFunction& kernel,
                             const DirectConvolutionOptions& options) {
  require_same_grid(f, kernel);
  const auto& g = f.grid_ref();
  std::vector<Complex> out(g.size());
  if (options.mode == KernelEvaluation::Resynthesis) {
    const auto khat = forward_transform(kernel, options.bandwidth);
    for (std::size_t y = 0; y < g.size(); ++y) {
      if (f[y] == Complex(0.0)) continue;
      const Complex wf = g.weight(y) * f[y];
      const GroupPoint yinv = invert(g.point(y));
      for (std::size_t x = 0; x < g.size(); ++x) out[x] += wf * evaluate_series(khat, compose(yinv, g.point(x)));
    }
  } else {
    for (std::size_t y = 0; y < g.size(); ++y) {
      if (f[y] == Complex(0.0)) continue;
      const Complex wf = g.weight(y) * f[y];
      const GroupPoint yinv = invert(g.point(y));
      for (std::size_t x = 0; x < g.size(); ++x)
        out[x] += wf * kernel[nearest_grid_index(g, compose(yinv, g.point(x)))];
    }
  }
  return GridFunction(f.grid(), std::move(out));
}

GridFunction convolve_direct(const GridFunction& f, const std::function<Complex(const GroupPoint&)>& kernel) {
  const auto& g = f.grid_ref();
  std::vector<Complex> out(g.size());
  for (std::size_t y = 0; y < g.size(); ++y) {
    if (f[y] == Complex(0.0)) continue;
    const Complex wf = g.weight(y) * f[y];
    const GroupPoint yinv = invert(g.point(y));
    for (std::size_t x = 0; x < g.size(); ++x) out[x] += wf * kernel(compose(yinv, g.point(x)));
  }
  return GridFunction(f.grid(), std::move(out));
}

}  // namespace lieosc
