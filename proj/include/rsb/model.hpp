#pragma once

#include "rsb/coalgebra.hpp"
#include "rsb/spec.hpp"
#include "rsb/tree.hpp"

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace rsb {

// Periodic (t, x) grid for d = 1. Every kernel label uses the same smooth
// kernel K(t,x) = psi(t) p_t(x): p_t the periodic heat kernel, psi a smooth
// cutoff vanishing near t = 0 and beyond T/2. Noises are seeded smooth
// trigonometric fields; xi_0 = 1.
struct ModelConfig {
  int nt = 256;
  int nx = 256;
  double T = 6.283185307179586;
  double L = 6.283185307179586;
  std::uint64_t seed = 1;
  int noise_modes = 4;
  int max_derivative = 4;  // per coordinate, applies to D^m K
};

struct GridPoint {
  int it = 0;
  int ix = 0;
  auto operator<=>(const GridPoint&) const = default;
};

enum class FzSign { Minus, Plus };  // f_z(X_i) = -z_i (consistent) or +z_i (as printed)

struct FactorizationReport {
  double max_abs_error = 0;
  double max_abs_value = 0;
  size_t samples = 0;
  size_t terms = 0;  // surviving terms of (P_+ (x) id) Delta_2 tau
};

class Model {
 public:
  using Field = std::vector<double>;

  Model(const EquationSpec& spec, const ModelConfig& cfg = {});
  ~Model();
  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;

  const ModelConfig& config() const { return cfg_; }
  double t_of(int it) const { return it * ht_; }
  double x_of(int ix) const { return ix * hx_; }
  GridPoint wrap(int it, int ix) const;
  double at(const Field& f, GridPoint p) const { return f[idx(p)]; }

  const Field& noise(const std::string& l) const;
  // Replaces a sampled noise (size nt*nx, row t-major); clears cached evaluations.
  void set_noise(const std::string& l, Field values);
  // D^m K sampled on the grid (spectral derivative).
  Field kernel(const MultiIndex& m) const;
  // (D^m K * g) by the trapezoidal rule on the periodic grid.
  Field convolve(const MultiIndex& m, const Field& g) const;

  const Field& pi(const Tree& t);
  const Field& pi_recentred(GridPoint z, const Tree& t);
  double f_z(GridPoint z, const Tree& sigma, FzSign sign = FzSign::Minus);

  // Pi^R_z tau = Pi^{R,x}_z (R tau); R is applied again below every edge.
  Field pi_renormalised(GridPoint z, const Tree& t, const LinearMap& R);
  Field pi_renormalised_product(GridPoint z, const Tree& t, const LinearMap& R);

  // Pi_z tau against (f_z P_+ (x) Pi) Delta_2 tau at the listed points.
  FactorizationReport check_factorisation(GridPoint z, const Tree& t, const std::vector<GridPoint>& points,
                                          FzSign sign = FzSign::Minus);

  // Least-squares slope of log max_dir |Pi_z tau(z')| against log of the
  // scaled distance; offsets are (n^2/4, n) grid cells for each n in scales.
  double estimate_decay_exponent(GridPoint z, const Tree& t, const std::vector<int>& scales);

  // Max over e_t, e_x of |central difference of K - spectral D^{e_i} K| / max |D^{e_i} K|.
  double kernel_derivative_consistency() const;

 private:
  size_t idx(GridPoint p) const { return static_cast<size_t>(p.it) * cfg_.nx + p.ix; }
  void check_stencil(const MultiIndex& m) const;
  Field taylor_corrected(GridPoint z, const Edge& a, const Tree& sub, const Field& inner);
  Field polynomial(GridPoint z, const MultiIndex& k, bool recentred) const;

  struct Fft;
  EquationSpec spec_;
  ModelConfig cfg_;
  double ht_, hx_;
  std::unique_ptr<Fft> fft_;
  std::vector<std::complex<double>> kernel_hat_;
  std::map<std::string, Field> noises_;
  std::map<std::string, Field> pi_memo_;
  std::map<std::pair<GridPoint, std::string>, Field> piz_memo_;
};

// Grid files: header line "nt,nx,ht,hx" then nt rows of nx comma-separated values.
struct GridFile {
  int nt = 0, nx = 0;
  double ht = 0, hx = 0;
  std::vector<double> values;
};
GridFile read_grid_csv(const std::string& path);
void write_grid_csv(const std::string& path, const GridFile& g);
// Loads a noise file into the model after checking its shape and spacings.
void load_noise(Model& m, const std::string& label, const std::string& path);

}  // namespace rsb
