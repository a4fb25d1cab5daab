#include "rsb/model.hpp"

#include "rsb/errors.hpp"
#include "rsb/random.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

namespace rsb {

struct Model::Fft {
  int nt, nx, nxh;
  double* real;
  fftw_complex* spec;
  fftw_plan fwd, bwd;

  Fft(int nt_, int nx_) : nt(nt_), nx(nx_), nxh(nx_ / 2 + 1) {
    real = fftw_alloc_real(static_cast<size_t>(nt) * nx);
    spec = fftw_alloc_complex(static_cast<size_t>(nt) * nxh);
    fwd = fftw_plan_dft_r2c_2d(nt, nx, real, spec, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_c2r_2d(nt, nx, spec, real, FFTW_ESTIMATE);
  }
  ~Fft() {
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
    fftw_free(real);
    fftw_free(spec);
  }
  std::vector<std::complex<double>> forward(const Field& f) {
    std::copy(f.begin(), f.end(), real);
    fftw_execute(fwd);
    std::vector<std::complex<double>> out(static_cast<size_t>(nt) * nxh);
    for (size_t i = 0; i < out.size(); ++i) out[i] = {spec[i][0], spec[i][1]};
    return out;
  }
  Field backward(const std::vector<std::complex<double>>& s) {
    for (size_t i = 0; i < s.size(); ++i) {
      spec[i][0] = s[i].real();
      spec[i][1] = s[i].imag();
    }
    fftw_execute(bwd);
    const double n = static_cast<double>(nt) * nx;
    Field out(static_cast<size_t>(nt) * nx);
    for (size_t i = 0; i < out.size(); ++i) out[i] = real[i] / n;
    return out;
  }
};

namespace {

double smooth_step(double u) {
  if (u <= 0) return 0;
  if (u >= 1) return 1;
  const double a = std::exp(-1 / u), b = std::exp(-1 / (1 - u));
  return a / (a + b);
}

double ipow(double x, int k) {
  double r = 1;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

}  // namespace

Model::Model(const EquationSpec& spec, const ModelConfig& cfg)
    : spec_(spec), cfg_(cfg), ht_(cfg.T / cfg.nt), hx_(cfg.L / cfg.nx) {
  if (spec.dim() != 2) throw SpecError("the numerical model needs d = 1 (one time and one space coordinate)");
  if (cfg.nt < 8 || cfg.nx < 8 || cfg.nt % 2 || cfg.nx % 2) throw SpecError("grid sizes must be even and >= 8");
  fft_ = std::make_unique<Fft>(cfg.nt, cfg.nx);

  const double t0 = 8 * ht_, t1 = 24 * ht_, t2 = cfg.T / 4, t3 = 0.45 * cfg.T;
  Field k(static_cast<size_t>(cfg.nt) * cfg.nx, 0.0);
  for (int i = 0; i < cfg.nt; ++i) {
    const double t = t_of(i);
    const double psi = smooth_step((t - t0) / (t1 - t0)) * (1 - smooth_step((t - t2) / (t3 - t2)));
    if (psi == 0) continue;
    for (int j = 0; j < cfg.nx; ++j) {
      double p = 0;
      for (int n = -6; n <= 6; ++n) {
        const double x = x_of(j) - n * cfg.L;
        p += std::exp(-x * x / (4 * t));
      }
      k[idx({i, j})] = psi * p / std::sqrt(4 * std::numbers::pi * t);
    }
  }
  kernel_hat_ = fft_->forward(k);

  size_t label_index = 0;
  for (const auto& [l, deg] : spec.noises) {
    Rng rng(cfg.seed * 1000003ULL + label_index++);
    Field xi(k.size(), 0.0);
    const int M = cfg.noise_modes;
    for (int a = -M; a <= M; ++a)
      for (int b = 0; b <= M; ++b) {
        const double amp = (2 * rng.uniform() - 1) / (1.0 + a * a + b * b);
        const double phase = 2 * std::numbers::pi * rng.uniform();
        for (int i = 0; i < cfg.nt; ++i)
          for (int j = 0; j < cfg.nx; ++j)
            xi[idx({i, j})] += amp * std::cos(2 * std::numbers::pi * a * t_of(i) / cfg.T + b * x_of(j) + phase);
      }
    noises_[l] = std::move(xi);
  }
  noises_[""] = Field(k.size(), 1.0);
}

Model::~Model() = default;

GridPoint Model::wrap(int it, int ix) const {
  auto m = [](int a, int n) { return ((a % n) + n) % n; };
  return {m(it, cfg_.nt), m(ix, cfg_.nx)};
}

const Model::Field& Model::noise(const std::string& l) const {
  auto it = noises_.find(l == "0" ? "" : l);
  if (it == noises_.end()) throw UnknownLabel("noise '" + l + "'");
  return it->second;
}

void Model::set_noise(const std::string& l, Field values) {
  const std::string key = l == "0" ? "" : l;
  if (!noises_.count(key)) throw UnknownLabel("noise '" + l + "'");
  if (values.size() != static_cast<size_t>(cfg_.nt) * cfg_.nx) throw SpecError("noise grid has the wrong size");
  noises_[key] = std::move(values);
  pi_memo_.clear();
  piz_memo_.clear();
}

void Model::check_stencil(const MultiIndex& m) const {
  for (size_t i = 0; i < m.dim(); ++i)
    if (m[i] > cfg_.max_derivative)
      throw StencilExceeded("derivative " + m.str() + " beyond order " + std::to_string(cfg_.max_derivative));
}

namespace {

std::complex<double> multiplier(int a, int b, int nt, int nx, double T, double L, const MultiIndex& m) {
  const int ft = a <= nt / 2 ? a : a - nt;
  if ((m[0] % 2 && a == nt / 2) || (m[1] % 2 && b == nx / 2)) return 0;
  const std::complex<double> wt(0, 2 * std::numbers::pi * ft / T), wx(0, 2 * std::numbers::pi * b / L);
  std::complex<double> r = 1;
  for (int i = 0; i < m[0]; ++i) r *= wt;
  for (int i = 0; i < m[1]; ++i) r *= wx;
  return r;
}

}  // namespace

Model::Field Model::kernel(const MultiIndex& m) const {
  check_stencil(m);
  const int nxh = cfg_.nx / 2 + 1;
  auto s = kernel_hat_;
  for (int a = 0; a < cfg_.nt; ++a)
    for (int b = 0; b < nxh; ++b) s[static_cast<size_t>(a) * nxh + b] *= multiplier(a, b, cfg_.nt, cfg_.nx, cfg_.T, cfg_.L, m);
  return fft_->backward(s);
}

Model::Field Model::convolve(const MultiIndex& m, const Field& g) const {
  check_stencil(m);
  const int nxh = cfg_.nx / 2 + 1;
  auto s = fft_->forward(g);
  const double area = ht_ * hx_;
  for (int a = 0; a < cfg_.nt; ++a)
    for (int b = 0; b < nxh; ++b) {
      const size_t i = static_cast<size_t>(a) * nxh + b;
      s[i] *= kernel_hat_[i] * multiplier(a, b, cfg_.nt, cfg_.nx, cfg_.T, cfg_.L, m) * area;
    }
  return fft_->backward(s);
}

Model::Field Model::polynomial(GridPoint z, const MultiIndex& k, bool recentred) const {
  Field f(static_cast<size_t>(cfg_.nt) * cfg_.nx);
  const double zt = recentred ? t_of(z.it) : 0, zx = recentred ? x_of(z.ix) : 0;
  for (int i = 0; i < cfg_.nt; ++i) {
    const double pt = ipow(t_of(i) - zt, k[0]);
    for (int j = 0; j < cfg_.nx; ++j) f[idx({i, j})] = pt * ipow(x_of(j) - zx, k[1]);
  }
  return f;
}

const Model::Field& Model::pi(const Tree& t) {
  auto it = pi_memo_.find(t.key());
  if (it != pi_memo_.end()) return it->second;
  Field f = polynomial({}, t.k(), false);
  const Field& xi = noise(t.noise());
  for (size_t i = 0; i < f.size(); ++i) f[i] *= xi[i];
  for (const auto& br : t.branches()) {
    const Field c = convolve(br.edge.m, pi(br.sub));
    for (size_t i = 0; i < f.size(); ++i) f[i] *= c[i];
  }
  return pi_memo_.emplace(t.key(), std::move(f)).first->second;
}

Model::Field Model::taylor_corrected(GridPoint z, const Edge& a, const Tree& sub, const Field& inner) {
  Field out = convolve(a.m, inner);
  const Q deg = spec_.edge_degree(a) + degree(sub, spec_);
  if (deg < 0) return out;
  for (const auto& k : indices_with_scaled_at_most(spec_.dim(), spec_.s, deg)) {
    const double c = at(convolve(a.m + k, inner), z) / static_cast<double>(k.factorial().get_d());
    const Field p = polynomial(z, k, true);
    for (size_t i = 0; i < out.size(); ++i) out[i] -= c * p[i];
  }
  return out;
}

const Model::Field& Model::pi_recentred(GridPoint z, const Tree& t) {
  auto key = std::make_pair(z, t.key());
  auto it = piz_memo_.find(key);
  if (it != piz_memo_.end()) return it->second;
  Field f = polynomial(z, t.k(), true);
  const Field& xi = noise(t.noise());
  for (size_t i = 0; i < f.size(); ++i) f[i] *= xi[i];
  for (const auto& br : t.branches()) {
    const Field inner = pi_recentred(z, br.sub);
    const Field c = taylor_corrected(z, br.edge, br.sub, inner);
    for (size_t i = 0; i < f.size(); ++i) f[i] *= c[i];
  }
  return piz_memo_.emplace(key, std::move(f)).first->second;
}

double Model::f_z(GridPoint z, const Tree& sigma, FzSign sign) {
  if (!sigma.noise().empty()) throw MalformedLeft("f_z is defined on T_+; got " + sigma.key());
  const double zc[2] = {t_of(z.it), x_of(z.ix)};
  double v = 1;
  for (size_t i = 0; i < 2; ++i) v *= ipow(sign == FzSign::Minus ? -zc[i] : zc[i], sigma.k()[i]);
  for (const auto& br : sigma.branches()) {
    const Field& inner = pi_recentred(z, br.sub);
    const Q deg = spec_.edge_degree(br.edge) + degree(br.sub, spec_);
    double s = 0;
    if (deg > 0)
      for (const auto& l : indices_with_scaled_at_most(spec_.dim(), spec_.s, deg)) {
        if (!(deg - l.scaled(spec_.s) > 0)) continue;
        const double w = ipow(-zc[0], l[0]) * ipow(-zc[1], l[1]) / l.factorial().get_d();
        s += w * at(convolve(br.edge.m + l, inner), z);
      }
    v *= -s;
  }
  return v;
}

Model::Field Model::pi_renormalised_product(GridPoint z, const Tree& t, const LinearMap& R) {
  Field f = polynomial(z, t.k(), true);
  const Field& xi = noise(t.noise());
  for (size_t i = 0; i < f.size(); ++i) f[i] *= xi[i];
  for (const auto& br : t.branches()) {
    const Field c = taylor_corrected(z, br.edge, br.sub, pi_renormalised(z, br.sub, R));
    for (size_t i = 0; i < f.size(); ++i) f[i] *= c[i];
  }
  return f;
}

Model::Field Model::pi_renormalised(GridPoint z, const Tree& t, const LinearMap& R) {
  Field out(static_cast<size_t>(cfg_.nt) * cfg_.nx, 0.0);
  for (const auto& [s, c] : R(t)) {
    const Field p = pi_renormalised_product(z, s, R);
    const double w = c.get_d();
    for (size_t i = 0; i < out.size(); ++i) out[i] += w * p[i];
  }
  return out;
}

namespace {

Q planted_cap(const Tree& t, const EquationSpec& spec) {
  Q cap = 0;
  for (const auto& br : t.branches()) {
    const Q here = spec.edge_degree(br.edge) + degree(br.sub, spec);
    const Q below = planted_cap(br.sub, spec);
    if (here > cap) cap = here;
    if (below > cap) cap = below;
  }
  return cap;
}

bool positive_planted(const Tree& sigma, const EquationSpec& spec) {
  for (const auto& br : sigma.branches())
    if (!(spec.edge_degree(br.edge) + degree(br.sub, spec) > 0)) return false;
  return true;
}

}  // namespace

FactorizationReport Model::check_factorisation(GridPoint z, const Tree& t, const std::vector<GridPoint>& points,
                                                FzSign sign) {
  FactorizationReport rep;
  const Field& lhs = pi_recentred(z, t);
  Field rhs(lhs.size(), 0.0);
  for (const auto& [lr, c] : delta2(t, spec_.s, planted_cap(t, spec_))) {
    if (!positive_planted(lr.first, spec_)) continue;
    ++rep.terms;
    const double w = c.get_d() * f_z(z, lr.first, sign);
    const Field& p = pi(lr.second);
    for (size_t i = 0; i < rhs.size(); ++i) rhs[i] += w * p[i];
  }
  for (const auto& p : points) {
    ++rep.samples;
    rep.max_abs_error = std::max(rep.max_abs_error, std::abs(at(lhs, p) - at(rhs, p)));
    rep.max_abs_value = std::max(rep.max_abs_value, std::abs(at(lhs, p)));
  }
  return rep;
}

double Model::estimate_decay_exponent(GridPoint z, const Tree& t, const std::vector<int>& scales) {
  if (scales.size() < 2) throw DegenerateSamples("need at least two scales");
  const Field& f = pi_recentred(z, t);
  std::vector<double> lx, ly;
  for (int n : scales) {
    const int dt = n * n / 4;
    const int offs[8][2] = {{dt, n}, {dt, -n}, {-dt, n}, {-dt, -n}, {0, n}, {0, -n}, {dt, 0}, {-dt, 0}};
    double v = 0;
    for (const auto& o : offs) v = std::max(v, std::abs(at(f, wrap(z.it + o[0], z.ix + o[1]))));
    if (!(v > 0) || !std::isfinite(v))
      throw DegenerateSamples("values vanish at scale " + std::to_string(n) + " for " + t.key());
    lx.push_back(std::log(static_cast<double>(n)));
    ly.push_back(std::log(v));
  }
  const double n = static_cast<double>(lx.size());
  double mx = 0, my = 0;
  for (size_t i = 0; i < lx.size(); ++i) mx += lx[i] / n, my += ly[i] / n;
  double sxy = 0, sxx = 0;
  for (size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  return sxy / sxx;
}

double Model::kernel_derivative_consistency() const {
  const Field k = kernel(MultiIndex(2));
  double worst = 0;
  for (size_t dir = 0; dir < 2; ++dir) {
    const Field d = kernel(MultiIndex::unit(2, dir));
    const double h = dir == 0 ? ht_ : hx_;
    double err = 0, scale = 0;
    for (int i = 0; i < cfg_.nt; ++i)
      for (int j = 0; j < cfg_.nx; ++j) {
        const GridPoint p{i, j};
        const GridPoint a = dir == 0 ? wrap(i + 1, j) : wrap(i, j + 1);
        const GridPoint b = dir == 0 ? wrap(i - 1, j) : wrap(i, j - 1);
        const double fd = (at(k, a) - at(k, b)) / (2 * h);
        err = std::max(err, std::abs(fd - at(d, p)));
        scale = std::max(scale, std::abs(at(d, p)));
      }
    worst = std::max(worst, err / scale);
  }
  return worst;
}

GridFile read_grid_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot open grid file " + path);
  GridFile g;
  std::string line;
  auto cells = [](const std::string& l) {
    std::vector<std::string> out;
    std::stringstream ss(l);
    std::string c;
    while (std::getline(ss, c, ',')) out.push_back(c);
    return out;
  };
  if (!std::getline(in, line)) throw SpecError("empty grid file " + path);
  const auto head = cells(line);
  if (head.size() != 4) throw SpecError("grid header must be nt,nx,ht,hx");
  try {
    g.nt = std::stoi(head[0]);
    g.nx = std::stoi(head[1]);
    g.ht = std::stod(head[2]);
    g.hx = std::stod(head[3]);
    if (g.nt <= 0 || g.nx <= 0) throw SpecError("grid dimensions must be positive");
    for (int i = 0; i < g.nt; ++i) {
      if (!std::getline(in, line)) throw SpecError("grid file has too few rows");
      const auto row = cells(line);
      if (static_cast<int>(row.size()) != g.nx) throw SpecError("grid row " + std::to_string(i) + " has wrong length");
      for (const auto& c : row) g.values.push_back(std::stod(c));
    }
  } catch (const std::logic_error&) {
    throw SpecError("malformed number in grid file " + path);
  }
  return g;
}

void write_grid_csv(const std::string& path, const GridFile& g) {
  std::ofstream out(path);
  if (!out) throw SpecError("cannot write grid file " + path);
  out << std::setprecision(17) << g.nt << "," << g.nx << "," << g.ht << "," << g.hx << "\n";
  for (int i = 0; i < g.nt; ++i)
    for (int j = 0; j < g.nx; ++j) out << g.values[static_cast<size_t>(i) * g.nx + j] << (j + 1 < g.nx ? "," : "\n");
}

void load_noise(Model& m, const std::string& label, const std::string& path) {
  GridFile g = read_grid_csv(path);
  const auto& c = m.config();
  const double ht = c.T / c.nt, hx = c.L / c.nx;
  if (g.nt != c.nt || g.nx != c.nx) throw SpecError("grid file dimensions do not match the model grid");
  if (std::abs(g.ht - ht) > 1e-9 * ht || std::abs(g.hx - hx) > 1e-9 * hx)
    throw SpecError("grid file spacings do not match the model grid");
  m.set_noise(label, std::move(g.values));
}

}  // namespace rsb
