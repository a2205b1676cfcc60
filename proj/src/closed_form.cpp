#include "rislab/closed_form.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rislab/channel.hpp"
#include "rislab/units.hpp"

namespace rislab {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

/// Complex accumulator that tracks the magnitude of what it has summed so
/// the imaginary residue can be judged relative to it.
class RealSum {
 public:
  void add(cdouble v) {
    sum_ += v;
    scale_ += std::abs(v);
  }
  void add(double v) {
    sum_ += v;
    scale_ += std::abs(v);
  }
  [[nodiscard]] double value(const char* what) const {
    if (std::abs(sum_.imag()) > 1e-9 * scale_ + 1e-300) {
      throw std::runtime_error(std::string("imaginary residue in ") + what);
    }
    return sum_.real();
  }

 private:
  cdouble sum_{};
  double scale_ = 0.0;
};

double sq(double x) { return x * x; }

}  // namespace

double rate_from_sinr(double sinr) {
  if (std::isinf(sinr)) return inf;
  return std::log2(1.0 + sinr);
}

double RateBreakdown::sum_rate() const {
  double s = 0.0;
  for (const double r : rate) s += r;
  return s;
}

double RateBreakdown::min_rate() const {
  return rate.empty() ? 0.0 : *std::min_element(rate.begin(), rate.end());
}

RateBreakdown assemble_rates(const Moments& moments, const TransmitConfig& tx) {
  const std::size_t k_count = moments.e_signal.size();
  tx.validate(k_count);
  RateBreakdown out;
  out.e_noise = moments.e_noise;
  out.e_signal = moments.e_signal;
  out.interference = moments.interference;
  out.sinr.resize(k_count);
  out.rate.resize(k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    double denom = tx.noise * moments.e_noise[k];
    for (std::size_t i = 0; i < k_count; ++i) {
      if (i != k) denom += tx.power[i] * moments.interference(k, i);
    }
    const double num = tx.power[k] * moments.e_signal[k];
    out.sinr[k] = denom > 0.0 ? num / denom : (num > 0.0 ? inf : 0.0);
    out.rate[k] = rate_from_sinr(out.sinr[k]);
  }
  return out;
}

RateModel::RateModel(const Topology& topo, const ChannelStats& stats)
    : m_(topo.num_aps()),
      n_(topo.num_ris()),
      k_(topo.num_users()),
      mb_(topo.antennas_per_ap),
      nr_(topo.elements_per_ris) {
  const LosComponents los = los_components(topo, stats);

  amp_.resize(m_ * n_ * k_);
  for (std::size_t m = 0; m < m_; ++m) {
    for (std::size_t n = 0; n < n_; ++n) {
      for (std::size_t k = 0; k < k_; ++k) {
        Amplitudes& a = amp_[idx(m, n, k)];
        const double ab = stats.ris_ap_gain(m, n) * stats.user_ris_gain(n, k);
        if (stats.pure_los) {
          a = {0.0, 0.0, std::sqrt(ab), 0.0, 0.0};
        } else {
          const double delta = stats.ris_ap_rician(m, n);
          const double eps = stats.user_ris_rician(n, k);
          const double c = ab / ((delta + 1.0) * (eps + 1.0));
          a = {c, std::sqrt(c), std::sqrt(c * delta * eps), std::sqrt(c * delta), std::sqrt(c * eps)};
        }
      }
    }
  }

  direct_.resize(m_ * k_);
  for (std::size_t m = 0; m < m_; ++m) {
    for (std::size_t k = 0; k < k_; ++k) direct_[m * k_ + k] = stats.user_ap_gain(m, k);
  }

  const std::size_t side = nr_ > 0 ? exact_sqrt(nr_) : 0;
  const std::size_t dim = m_ * n_;
  steer_.resize(k_ * dim * nr_);
  for (std::size_t m = 0; m < m_; ++m) {
    for (std::size_t n = 0; n < n_; ++n) {
      const Angles& dep = stats.ris_ap_departure(m, n);
      for (std::size_t k = 0; k < k_; ++k) {
        const Angles& arr = stats.user_ris_arrival(n, k);
        const double row = std::sin(arr.elevation) * std::sin(arr.azimuth) -
                           std::sin(dep.elevation) * std::sin(dep.azimuth);
        const double col = std::cos(arr.elevation) - std::cos(dep.elevation);
        cdouble* out = steer_.data() + (k * dim + m * n_ + n) * nr_;
        for (std::size_t r = 0; r < nr_; ++r) {
          const double zeta = two_pi * stats.spacing_ratio *
                              (static_cast<double>(r / side) * row + static_cast<double>(r % side) * col);
          out[r] = std::polar(1.0, zeta);
        }
      }
    }
  }

  ap_inner_.resize(m_ * n_ * n_);
  for (std::size_t m = 0; m < m_; ++m) {
    for (std::size_t n1 = 0; n1 < n_; ++n1) {
      for (std::size_t n2 = 0; n2 < n_; ++n2) {
        ap_inner_[(m * n_ + n1) * n_ + n2] = los.ap_side(m, n1).dot(los.ap_side(m, n2));
      }
    }
  }
  ris_inner_.resize(dim * dim);
  for (std::size_t m1 = 0; m1 < m_; ++m1) {
    for (std::size_t n1 = 0; n1 < n_; ++n1) {
      for (std::size_t m2 = 0; m2 < m_; ++m2) {
        for (std::size_t n2 = 0; n2 < n_; ++n2) {
          ris_inner_[(m1 * n_ + n1) * dim + m2 * n_ + n2] = los.ris_side(m1, n1).dot(los.ris_side(m2, n2));
        }
      }
    }
  }
  user_inner_.resize(n_ * k_ * k_);
  for (std::size_t n = 0; n < n_; ++n) {
    for (std::size_t a = 0; a < k_; ++a) {
      for (std::size_t b = 0; b < k_; ++b) {
        user_inner_[(n * k_ + a) * k_ + b] = los.user_ris(n, a).dot(los.user_ris(n, b));
      }
    }
  }

  users_.resize(k_);
  for (std::size_t k = 0; k < k_; ++k) build_user(k);
  pairs_.resize(k_ * (k_ - 1) / 2);
  for (std::size_t k = 0; k < k_; ++k) {
    for (std::size_t i = k + 1; i < k_; ++i) build_pair(k, i);
  }
}

std::size_t RateModel::pair_index(std::size_t k, std::size_t i) const noexcept {
  // Row-major position of (k, i), k < i, in the strict upper triangle.
  return k * (2 * k_ - k - 1) / 2 + (i - k - 1);
}

namespace {

using Form = std::vector<cdouble>;

void make_hermitian(Form& q, std::size_t dim) {
  for (std::size_t a = 0; a < dim; ++a) {
    q[a * dim + a] = q[a * dim + a].real();
    for (std::size_t b = a + 1; b < dim; ++b) {
      const cdouble avg = 0.5 * (q[a * dim + b] + std::conj(q[b * dim + a]));
      q[a * dim + b] = avg;
      q[b * dim + a] = std::conj(avg);
    }
  }
}

/// x^H q y, accumulated into a residue-tracking sum.
cdouble quad(const Form& q, const cdouble* x, const cdouble* y, std::size_t dim, double* scale = nullptr) {
  cdouble acc{};
  double mag = 0.0;
  for (std::size_t a = 0; a < dim; ++a) {
    cdouble row{};
    double row_mag = 0.0;
    for (std::size_t b = 0; b < dim; ++b) {
      const cdouble t = q[a * dim + b] * y[b];
      row += t;
      row_mag += std::abs(t.real()) + std::abs(t.imag());
    }
    acc += std::conj(x[a]) * row;
    mag += (std::abs(x[a].real()) + std::abs(x[a].imag())) * row_mag;
  }
  if (scale) *scale = mag;
  return acc;
}

double real_quad(const Form& q, const cdouble* x, std::size_t dim, const char* what) {
  double scale = 0.0;
  const cdouble v = quad(q, x, x, dim, &scale);
  if (std::abs(v.imag()) > 1e-9 * scale + 1e-300) {
    throw std::runtime_error(std::string("imaginary residue in ") + what);
  }
  return v.real();
}

}  // namespace

void RateModel::build_user(std::size_t k) {
  const double mb = static_cast<double>(mb_);
  const double nr = static_cast<double>(nr_);
  const std::size_t dim = m_ * n_;
  auto A = [&](std::size_t m, std::size_t n) -> const Amplitudes& { return amp_[idx(m, n, k)]; };
  auto gamma = [&](std::size_t m) { return direct_[m * k_ + k]; };
  auto at = [&](std::size_t m1, std::size_t n1, std::size_t m2, std::size_t n2) {
    return (m1 * n_ + n1) * dim + m2 * n_ + n2;
  };
  auto ap = [&](std::size_t m, std::size_t n1, std::size_t n2) { return ap_inner_[(m * n_ + n1) * n_ + n2]; };
  auto ris = [&](std::size_t m1, std::size_t n1, std::size_t m2, std::size_t n2) {
    return ris_inner_[(m1 * n_ + n1) * dim + m2 * n_ + n2];
  };

  UserForms& u = users_[k];
  u.los.assign(dim * dim, cdouble{});
  for (std::size_t m = 0; m < m_; ++m)
    for (std::size_t n1 = 0; n1 < n_; ++n1)
      for (std::size_t n2 = 0; n2 < n_; ++n2) u.los[at(m, n1, m, n2)] = A(m, n1).los * A(m, n2).los * ap(m, n1, n2);

  double scatter_power = 0.0;
  double direct_power = 0.0;
  double direct_square = 0.0;
  for (std::size_t m = 0; m < m_; ++m) {
    for (std::size_t n = 0; n < n_; ++n) {
      scatter_power += mb * nr * (A(m, n).c + sq(A(m, n).zlos) + sq(A(m, n).hlos));
    }
    direct_power += gamma(m) * mb;
    direct_square += sq(gamma(m)) * mb;
  }
  u.noise_const = scatter_power + direct_power;

  Form raw(dim * dim, cdouble{});
  // LoS products times the scattered power of every other link.
  for (std::size_t e = 0; e < raw.size(); ++e) raw[e] += 2.0 * scatter_power * u.los[e];
  // LoS cascade through one RIS combined with a scattered user hop at another.
  for (std::size_t m1 = 0; m1 < m_; ++m1)
    for (std::size_t m2 = 0; m2 < m_; ++m2)
      for (std::size_t n1 = 0; n1 < n_; ++n1)
        for (std::size_t n2 = 0; n2 < n_; ++n2)
          for (std::size_t n3 = 0; n3 < n_; ++n3) {
            const double w = 2.0 * A(m1, n1).zlos * A(m1, n2).los * A(m2, n3).los * A(m2, n1).zlos;
            if (w != 0.0) raw[at(m2, n3, m1, n2)] += w * ap(m2, n3, n1) * ris(m2, n1, m1, n1) * ap(m1, n1, n2);
          }
  double direct_sum = 0.0;
  for (std::size_t m = 0; m < m_; ++m) direct_sum += gamma(m);
  for (std::size_t m1 = 0; m1 < m_; ++m1)
    for (std::size_t n1 = 0; n1 < n_; ++n1)
      for (std::size_t n2 = 0; n2 < n_; ++n2) {
        double c_col = 0.0;
        for (std::size_t m2 = 0; m2 < m_; ++m2) c_col += A(m2, n2).c;
        raw[at(m1, n1, m1, n2)] += 2.0 * mb * (2.0 * c_col + direct_sum) * u.los[at(m1, n1, m1, n2)];
      }
  for (std::size_t m = 0; m < m_; ++m) {
    double user_scatter = 0.0;
    for (std::size_t n = 0; n < n_; ++n) user_scatter += sq(A(m, n).hlos) + A(m, n).c;
    for (std::size_t n1 = 0; n1 < n_; ++n1)
      for (std::size_t n2 = 0; n2 < n_; ++n2)
        raw[at(m, n1, m, n2)] += (2.0 * nr * user_scatter + 2.0 * gamma(m) + 4.0 * A(m, n2).c) * u.los[at(m, n1, m, n2)];
  }
  make_hermitian(raw, dim);
  u.signal = std::move(raw);

  RealSum s;
  for (std::size_t m1 = 0; m1 < m_; ++m1) {
    for (std::size_t m2 = 0; m2 < m_; ++m2) {
      for (std::size_t n1 = 0; n1 < n_; ++n1) {
        for (std::size_t n2 = 0; n2 < n_; ++n2) {
          const double z4 = A(m1, n1).zlos * A(m1, n2).zlos * A(m2, n2).zlos * A(m2, n1).zlos;
          if (z4 != 0.0) s.add(z4 * ap(m1, n1, n2) * ris(m1, n2, m2, n2) * ap(m2, n2, n1) * ris(m2, n1, m1, n1));
          const Amplitudes& a = A(m1, n1);
          const Amplitudes& b = A(m2, n2);
          s.add(mb * mb * nr * nr *
                (2.0 * (sq(a.zlos) * sq(b.hlos) + sq(a.zlos) * b.c + sq(a.hlos) * b.c) + sq(a.zlos) * sq(b.zlos) +
                 sq(a.hlos) * sq(b.hlos) + a.c * b.c));
        }
      }
      for (std::size_t n = 0; n < n_; ++n) {
        const Amplitudes& a = A(m1, n);
        const Amplitudes& b = A(m2, n);
        s.add(mb * mb * nr * (2.0 * (b.c + gamma(m2)) * (sq(a.zlos) + sq(a.hlos)) + a.c * (2.0 * gamma(m2) + b.c)));
      }
    }
  }
  for (std::size_t m = 0; m < m_; ++m) {
    for (std::size_t n1 = 0; n1 < n_; ++n1) {
      for (std::size_t n2 = 0; n2 < n_; ++n2) {
        const Amplitudes& a = A(m, n1);
        const Amplitudes& b = A(m, n2);
        s.add(mb * nr * nr *
              (2.0 * (sq(a.zlos) * sq(b.hlos) + sq(a.zlos) * b.c + sq(a.hlos) * b.c) + sq(a.hlos) * sq(b.hlos) +
               a.c * b.c));
      }
    }
    for (std::size_t n = 0; n < n_; ++n) {
      const Amplitudes& a = A(m, n);
      s.add(mb * nr * (2.0 * (sq(a.zlos) + sq(a.hlos)) * (a.c + gamma(m)) + a.c * a.c + 2.0 * a.c * gamma(m)));
    }
  }
  s.add(direct_power * direct_power + direct_square);
  u.signal_const = s.value("signal moment");
}

void RateModel::build_pair(std::size_t k, std::size_t i) {
  const double mb = static_cast<double>(mb_);
  const double nr = static_cast<double>(nr_);
  const std::size_t dim = m_ * n_;
  auto Ak = [&](std::size_t m, std::size_t n) -> const Amplitudes& { return amp_[idx(m, n, k)]; };
  auto Ai = [&](std::size_t m, std::size_t n) -> const Amplitudes& { return amp_[idx(m, n, i)]; };
  auto gk = [&](std::size_t m) { return direct_[m * k_ + k]; };
  auto gi = [&](std::size_t m) { return direct_[m * k_ + i]; };
  auto at = [&](std::size_t m1, std::size_t n1, std::size_t m2, std::size_t n2) {
    return (m1 * n_ + n1) * dim + m2 * n_ + n2;
  };
  auto ap = [&](std::size_t m, std::size_t n1, std::size_t n2) { return ap_inner_[(m * n_ + n1) * n_ + n2]; };
  auto ris = [&](std::size_t m1, std::size_t n1, std::size_t m2, std::size_t n2) {
    return ris_inner_[(m1 * n_ + n1) * dim + m2 * n_ + n2];
  };
  auto uin = [&](std::size_t n, std::size_t a, std::size_t b) { return user_inner_[(n * k_ + a) * k_ + b]; };
  const Form& los_k = users_[k].los;
  const Form& los_i = users_[i].los;

  PairForms& p = pairs_[pair_index(k, i)];
  p.cross.assign(dim * dim, cdouble{});
  for (std::size_t m = 0; m < m_; ++m)
    for (std::size_t n1 = 0; n1 < n_; ++n1)
      for (std::size_t n2 = 0; n2 < n_; ++n2) p.cross[at(m, n1, m, n2)] = Ak(m, n1).los * Ai(m, n2).los * ap(m, n1, n2);

  p.scatter = {};
  for (std::size_t m = 0; m < m_; ++m)
    for (std::size_t n = 0; n < n_; ++n) p.scatter += mb * Ai(m, n).hlos * Ak(m, n).hlos * uin(n, i, k);

  Form rk(dim * dim, cdouble{});
  Form ri(dim * dim, cdouble{});
  for (std::size_t m1 = 0; m1 < m_; ++m1)
    for (std::size_t m2 = 0; m2 < m_; ++m2)
      for (std::size_t n1 = 0; n1 < n_; ++n1)
        for (std::size_t n2 = 0; n2 < n_; ++n2)
          for (std::size_t n3 = 0; n3 < n_; ++n3) {
            const cdouble path = ap(m1, n1, n2) * ris(m1, n2, m2, n2) * ap(m2, n2, n3);
            rk[at(m1, n1, m2, n3)] += Ak(m1, n1).los * Ai(m1, n2).zlos * Ai(m2, n2).zlos * Ak(m2, n3).los * path;
            ri[at(m1, n1, m2, n3)] += Ai(m1, n1).los * Ak(m1, n2).zlos * Ak(m2, n2).zlos * Ai(m2, n3).los * path;
          }
  for (std::size_t m1 = 0; m1 < m_; ++m1)
    for (std::size_t m2 = 0; m2 < m_; ++m2)
      for (std::size_t n1 = 0; n1 < n_; ++n1)
        for (std::size_t n2 = 0; n2 < n_; ++n2) {
          const double ak = Ak(m1, n1).los * Ai(m1, n2).zlos * Ak(m2, n2).hlos * Ai(m2, n2).sc;
          const double ai = Ak(m1, n1).zlos * Ai(m1, n2).los * Ai(m2, n1).hlos * Ak(m2, n1).sc;
          rk[at(m1, n1, m1, n2)] += 2.0 * mb * ak * ap(m1, n1, n2);
          ri[at(m1, n1, m1, n2)] += 2.0 * mb * ai * ap(m1, n1, n2);
        }
  for (std::size_t m = 0; m < m_; ++m) {
    double scatter_i = 0.0;
    double scatter_k = 0.0;
    for (std::size_t n = 0; n < n_; ++n) {
      scatter_i += sq(Ai(m, n).hlos) + Ai(m, n).c;
      scatter_k += sq(Ak(m, n).hlos) + Ak(m, n).c;
    }
    for (std::size_t n1 = 0; n1 < n_; ++n1)
      for (std::size_t n2 = 0; n2 < n_; ++n2) {
        rk[at(m, n1, m, n2)] += (nr * scatter_i + gi(m)) * los_k[at(m, n1, m, n2)];
        ri[at(m, n1, m, n2)] += (nr * scatter_k + gk(m)) * los_i[at(m, n1, m, n2)];
      }
  }
  make_hermitian(rk, dim);
  make_hermitian(ri, dim);
  p.own_k = std::move(rk);
  p.own_i = std::move(ri);

  RealSum s;
  for (std::size_t m1 = 0; m1 < m_; ++m1) {
    for (std::size_t m2 = 0; m2 < m_; ++m2) {
      for (std::size_t n1 = 0; n1 < n_; ++n1) {
        for (std::size_t n2 = 0; n2 < n_; ++n2) {
          const double z4 = Ak(m1, n1).zlos * Ai(m1, n2).zlos * Ai(m2, n2).zlos * Ak(m2, n1).zlos;
          if (z4 != 0.0) s.add(z4 * ap(m1, n1, n2) * ris(m1, n2, m2, n2) * ap(m2, n2, n1) * ris(m2, n1, m1, n1));
          const double h4 = Ak(m1, n1).hlos * Ai(m1, n1).hlos * Ai(m2, n2).hlos * Ak(m2, n2).hlos;
          if (h4 != 0.0) s.add(h4 * mb * mb * uin(n1, k, i) * uin(n2, i, k));
        }
      }
      for (std::size_t n = 0; n < n_; ++n) {
        const Amplitudes& k1 = Ak(m1, n);
        const Amplitudes& i1 = Ai(m1, n);
        const Amplitudes& k2 = Ak(m2, n);
        const Amplitudes& i2 = Ai(m2, n);
        s.add(mb * mb * nr *
              (2.0 * k1.zlos * i1.zlos * k2.sc * i2.sc + k1.hlos * k2.hlos * i1.sc * i2.sc +
               i1.hlos * i2.hlos * k1.sc * k2.sc + k1.sc * i1.sc * k2.sc * i2.sc));
      }
    }
  }
  for (std::size_t m = 0; m < m_; ++m) {
    for (std::size_t n1 = 0; n1 < n_; ++n1) {
      for (std::size_t n2 = 0; n2 < n_; ++n2) {
        const Amplitudes& a = Ak(m, n1);
        const Amplitudes& b = Ai(m, n2);
        s.add(mb * nr * nr *
              (sq(a.zlos) * sq(b.hlos) + sq(a.hlos) * sq(b.zlos) + sq(a.hlos) * sq(b.hlos) + sq(a.zlos) * b.c +
               a.c * sq(b.zlos) + sq(a.hlos) * b.c + a.c * sq(b.hlos) + a.c * b.c));
      }
    }
    for (std::size_t n = 0; n < n_; ++n) {
      const Amplitudes& a = Ak(m, n);
      const Amplitudes& b = Ai(m, n);
      s.add(mb * nr * ((sq(a.zlos) + sq(a.hlos) + a.c) * gi(m) + (sq(b.zlos) + sq(b.hlos) + b.c) * gk(m)));
    }
    s.add(gk(m) * gi(m) * mb);
  }
  p.constant = s.value("interference moment");
}

double RateModel::c_factor(std::size_t m, std::size_t n, std::size_t k) const { return amp_.at(idx(m, n, k)).c; }

double RateModel::los_gain(std::size_t m, std::size_t n, std::size_t k) const {
  return sq(amp_.at(idx(m, n, k)).los);
}

void RateModel::check_phases(const PhaseConfig& phases) const {
  if (phases.num_ris() != n_ || phases.elements_per_ris() != nr_) {
    throw std::invalid_argument("phase configuration does not match the scenario");
  }
}

std::vector<cdouble> RateModel::f_table(const PhaseConfig& phases) const {
  check_phases(phases);
  std::vector<cdouble> rotation(n_ * nr_);
  const auto angles = phases.angles();
  for (std::size_t e = 0; e < rotation.size(); ++e) rotation[e] = std::polar(1.0, angles[e]);
  const std::size_t dim = m_ * n_;
  std::vector<cdouble> f(k_ * dim);
  for (std::size_t k = 0; k < k_; ++k) {
    for (std::size_t m = 0; m < m_; ++m) {
      for (std::size_t n = 0; n < n_; ++n) {
        const cdouble* rot = rotation.data() + n * nr_;
        const cdouble* s = steer_.data() + (k * dim + m * n_ + n) * nr_;
        cdouble acc{};
        for (std::size_t r = 0; r < nr_; ++r) acc += s[r] * rot[r];
        f[k * dim + m * n_ + n] = acc;
      }
    }
  }
  return f;
}

cdouble RateModel::f_value(std::size_t m, std::size_t n, std::size_t k, const PhaseConfig& phases) const {
  if (m >= m_ || n >= n_ || k >= k_) throw std::out_of_range("f index out of range");
  return f_table(phases)[k * m_ * n_ + m * n_ + n];
}

double RateModel::noise_term(std::size_t k, const std::vector<cdouble>& f) const {
  const std::size_t dim = m_ * n_;
  const cdouble* fk = f.data() + k * dim;
  const double los = real_quad(users_[k].los, fk, dim, "noise moment");
  return los + users_[k].noise_const;
}

double RateModel::signal_term(std::size_t k, const std::vector<cdouble>& f) const {
  const std::size_t dim = m_ * n_;
  const cdouble* fk = f.data() + k * dim;
  const double los = real_quad(users_[k].los, fk, dim, "signal moment");
  const double mixed = real_quad(users_[k].signal, fk, dim, "signal moment");
  return los * los + mixed + users_[k].signal_const;
}

double RateModel::interference_term(std::size_t k, std::size_t i, const std::vector<cdouble>& f) const {
  if (k > i) std::swap(k, i);
  const std::size_t dim = m_ * n_;
  const cdouble* fk = f.data() + k * dim;
  const cdouble* fi = f.data() + i * dim;
  const PairForms& p = pairs_[pair_index(k, i)];
  const cdouble cross = quad(p.cross, fk, fi, dim);
  const double own_k = real_quad(p.own_k, fk, dim, "interference moment");
  const double own_i = real_quad(p.own_i, fi, dim, "interference moment");
  return std::norm(cross) + 2.0 * (cross * p.scatter).real() + own_k + own_i + p.constant;
}

double RateModel::e_noise(std::size_t k, const PhaseConfig& phases) const {
  if (k >= k_) throw std::out_of_range("user index out of range");
  return noise_term(k, f_table(phases));
}

double RateModel::e_signal(std::size_t k, const PhaseConfig& phases) const {
  if (k >= k_) throw std::out_of_range("user index out of range");
  return signal_term(k, f_table(phases));
}

double RateModel::interference(std::size_t k, std::size_t i, const PhaseConfig& phases) const {
  if (k >= k_ || i >= k_) throw std::out_of_range("user index out of range");
  if (k == i) throw std::invalid_argument("interference needs two distinct users");
  return interference_term(k, i, f_table(phases));
}

Moments RateModel::moments(const PhaseConfig& phases) const {
  const auto f = f_table(phases);
  Moments out;
  out.e_noise.resize(k_);
  out.e_signal.resize(k_);
  out.interference = Grid<double>(k_, k_);
  for (std::size_t k = 0; k < k_; ++k) {
    out.e_noise[k] = noise_term(k, f);
    out.e_signal[k] = signal_term(k, f);
    for (std::size_t i = k + 1; i < k_; ++i) {
      const double v = interference_term(k, i, f);
      out.interference(k, i) = v;
      out.interference(i, k) = v;
    }
  }
  return out;
}

RateBreakdown RateModel::evaluate(const PhaseConfig& phases, const TransmitConfig& tx) const {
  return assemble_rates(moments(phases), tx);
}

double c_factor(std::size_t m, std::size_t n, std::size_t k, const ChannelStats& stats) {
  if (stats.pure_los) return 0.0;
  return stats.ris_ap_gain(m, n) * stats.user_ris_gain(n, k) /
         ((stats.ris_ap_rician(m, n) + 1.0) * (stats.user_ris_rician(n, k) + 1.0));
}

cdouble f_value(std::size_t m, std::size_t n, std::size_t k, const PhaseConfig& phases, const ChannelStats& stats) {
  const std::size_t side = exact_sqrt(phases.elements_per_ris());
  const Angles& arr = stats.user_ris_arrival(n, k);
  const Angles& dep = stats.ris_ap_departure(m, n);
  const double row = std::sin(arr.elevation) * std::sin(arr.azimuth) - std::sin(dep.elevation) * std::sin(dep.azimuth);
  const double col = std::cos(arr.elevation) - std::cos(dep.elevation);
  cdouble acc{};
  for (std::size_t r = 0; r < phases.elements_per_ris(); ++r) {
    const double zeta = two_pi * stats.spacing_ratio *
                        (static_cast<double>(r / side) * row + static_cast<double>(r % side) * col);
    acc += std::exp(cdouble(0.0, zeta + phases(n, r)));
  }
  return acc;
}

double e_noise(std::size_t k, const PhaseConfig& phases, const ChannelStats& stats, const Topology& topo) {
  return RateModel(topo, stats).e_noise(k, phases);
}

double e_signal(std::size_t k, const PhaseConfig& phases, const ChannelStats& stats, const Topology& topo) {
  return RateModel(topo, stats).e_signal(k, phases);
}

double interference(std::size_t k, std::size_t i, const PhaseConfig& phases, const ChannelStats& stats,
                    const Topology& topo) {
  return RateModel(topo, stats).interference(k, i, phases);
}

RateBreakdown rate_theorem1(const PhaseConfig& phases, const ChannelStats& stats, const Topology& topo,
                            const TransmitConfig& tx) {
  return RateModel(topo, stats).evaluate(phases, tx);
}

namespace {

std::vector<double> rates_from(const std::vector<double>& signal, const Grid<double>& interf,
                               const std::vector<double>& noise_moment, const TransmitConfig& tx) {
  Moments mo{noise_moment, signal, interf};
  return assemble_rates(mo, tx).rate;
}

}  // namespace

std::vector<double> rate_ris_free(const ChannelStats& stats, const Topology& topo, const TransmitConfig& tx) {
  topo.validate();
  stats.validate(topo);
  const std::size_t m_count = topo.num_aps();
  const std::size_t k_count = topo.num_users();
  const double mb = static_cast<double>(topo.antennas_per_ap);
  std::vector<double> signal(k_count), noise(k_count);
  Grid<double> interf(k_count, k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    double lin = 0.0;
    double quad = 0.0;
    for (std::size_t m = 0; m < m_count; ++m) {
      lin += stats.user_ap_gain(m, k) * mb;
      quad += sq(stats.user_ap_gain(m, k)) * mb;
    }
    signal[k] = lin * lin + quad;
    noise[k] = lin;
    for (std::size_t i = 0; i < k_count; ++i) {
      if (i == k) continue;
      double v = 0.0;
      for (std::size_t m = 0; m < m_count; ++m) v += stats.user_ap_gain(m, k) * stats.user_ap_gain(m, i) * mb;
      interf(k, i) = v;
    }
  }
  return rates_from(signal, interf, noise, tx);
}

std::vector<double> rate_nlos(const ChannelStats& stats, const Topology& topo, const TransmitConfig& tx) {
  topo.validate();
  stats.validate(topo);
  const std::size_t m_count = topo.num_aps();
  const std::size_t n_count = topo.num_ris();
  const std::size_t k_count = topo.num_users();
  const double mb = static_cast<double>(topo.antennas_per_ap);
  const double nr = static_cast<double>(topo.elements_per_ris);
  auto c = [&](std::size_t m, std::size_t n, std::size_t k) { return stats.ris_ap_gain(m, n) * stats.user_ris_gain(n, k); };
  auto g = [&](std::size_t m, std::size_t k) { return stats.user_ap_gain(m, k); };
  std::vector<double> signal(k_count), noise(k_count);
  Grid<double> interf(k_count, k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    double en = 0.0;
    for (std::size_t m = 0; m < m_count; ++m) {
      for (std::size_t n = 0; n < n_count; ++n) en += c(m, n, k) * mb * nr;
      en += g(m, k) * mb;
    }
    noise[k] = en;

    double es = 0.0;
    for (std::size_t m1 = 0; m1 < m_count; ++m1)
      for (std::size_t m2 = 0; m2 < m_count; ++m2)
        for (std::size_t n1 = 0; n1 < n_count; ++n1)
          for (std::size_t n2 = 0; n2 < n_count; ++n2) es += c(m1, n1, k) * c(m2, n2, k) * mb * mb * nr * nr;
    for (std::size_t m = 0; m < m_count; ++m)
      for (std::size_t n1 = 0; n1 < n_count; ++n1)
        for (std::size_t n2 = 0; n2 < n_count; ++n2) es += c(m, n1, k) * c(m, n2, k) * mb * nr * nr;
    for (std::size_t m1 = 0; m1 < m_count; ++m1)
      for (std::size_t m2 = 0; m2 < m_count; ++m2)
        for (std::size_t n = 0; n < n_count; ++n) es += c(m1, n, k) * mb * mb * nr * (2.0 * g(m2, k) + c(m2, n, k));
    double direct = 0.0;
    for (std::size_t m = 0; m < m_count; ++m) {
      for (std::size_t n = 0; n < n_count; ++n) es += c(m, n, k) * mb * nr * (2.0 * g(m, k) + c(m, n, k));
      direct += g(m, k) * mb;
      es += sq(g(m, k)) * mb;
    }
    signal[k] = es + direct * direct;

    for (std::size_t i = 0; i < k_count; ++i) {
      if (i == k) continue;
      double v = 0.0;
      for (std::size_t m1 = 0; m1 < m_count; ++m1)
        for (std::size_t m2 = 0; m2 < m_count; ++m2)
          for (std::size_t n = 0; n < n_count; ++n)
            v += std::sqrt(c(m1, n, k) * c(m1, n, i) * c(m2, n, i) * c(m2, n, k)) * mb * mb * nr;
      for (std::size_t m = 0; m < m_count; ++m)
        for (std::size_t n1 = 0; n1 < n_count; ++n1)
          for (std::size_t n2 = 0; n2 < n_count; ++n2) v += c(m, n1, k) * c(m, n2, i) * mb * nr * nr;
      for (std::size_t m = 0; m < m_count; ++m) {
        for (std::size_t n = 0; n < n_count; ++n) v += mb * nr * (c(m, n, k) * g(m, i) + c(m, n, i) * g(m, k));
        v += g(m, k) * g(m, i) * mb;
      }
      interf(k, i) = v;
    }
  }
  return rates_from(signal, interf, noise, tx);
}

std::vector<double> rate_nlos_asymptotic(const ChannelStats& stats, const Topology& topo, const TransmitConfig& tx,
                                         std::size_t elements_per_ris) {
  topo.validate();
  stats.validate(topo);
  const std::size_t m_count = topo.num_aps();
  const std::size_t n_count = topo.num_ris();
  const std::size_t k_count = topo.num_users();
  const double nr = static_cast<double>(elements_per_ris);
  auto c = [&](std::size_t m, std::size_t n, std::size_t k) { return stats.ris_ap_gain(m, n) * stats.user_ris_gain(n, k); };
  auto g = [&](std::size_t m, std::size_t k) { return stats.user_ap_gain(m, k); };
  std::vector<double> signal(k_count), noise(k_count, 0.0);
  Grid<double> interf(k_count, k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    double es = 0.0;
    for (std::size_t m1 = 0; m1 < m_count; ++m1)
      for (std::size_t m2 = 0; m2 < m_count; ++m2)
        for (std::size_t n1 = 0; n1 < n_count; ++n1)
          for (std::size_t n2 = 0; n2 < n_count; ++n2) es += c(m1, n1, k) * c(m2, n2, k) * nr * nr;
    for (std::size_t m1 = 0; m1 < m_count; ++m1)
      for (std::size_t m2 = 0; m2 < m_count; ++m2)
        for (std::size_t n = 0; n < n_count; ++n) es += c(m1, n, k) * nr * (2.0 * g(m2, k) + c(m2, n, k));
    double direct = 0.0;
    for (std::size_t m = 0; m < m_count; ++m) direct += g(m, k);
    signal[k] = es + direct * direct;
    for (std::size_t i = 0; i < k_count; ++i) {
      if (i == k) continue;
      double v = 0.0;
      for (std::size_t m1 = 0; m1 < m_count; ++m1)
        for (std::size_t m2 = 0; m2 < m_count; ++m2)
          for (std::size_t n = 0; n < n_count; ++n)
            v += std::sqrt(c(m1, n, k) * c(m1, n, i) * c(m2, n, i) * c(m2, n, k)) * nr;
      interf(k, i) = v;
    }
  }
  return rates_from(signal, interf, noise, tx);
}

std::vector<double> rate_los_asymptotic(const PhaseConfig& phases, const ChannelStats& stats, const Topology& topo,
                                        const TransmitConfig& tx) {
  topo.validate();
  stats.validate(topo);
  if (phases.num_ris() != topo.num_ris() || phases.elements_per_ris() != topo.elements_per_ris) {
    throw std::invalid_argument("phase configuration does not match the scenario");
  }
  const std::size_t m_count = topo.num_aps();
  const std::size_t n_count = topo.num_ris();
  const std::size_t k_count = topo.num_users();
  Grid<cdouble> f(m_count * n_count, k_count);
  for (std::size_t m = 0; m < m_count; ++m)
    for (std::size_t n = 0; n < n_count; ++n)
      for (std::size_t k = 0; k < k_count; ++k) f(m * n_count + n, k) = f_value(m, n, k, phases, stats);
  auto F = [&](std::size_t m, std::size_t n, std::size_t k) -> const cdouble& { return f(m * n_count + n, k); };
  auto alpha = [&](std::size_t n, std::size_t k) { return stats.user_ris_gain(n, k); };
  auto beta = [&](std::size_t m, std::size_t n) { return stats.ris_ap_gain(m, n); };
  auto g = [&](std::size_t m, std::size_t k) { return stats.user_ap_gain(m, k); };

  std::vector<double> signal(k_count), noise(k_count, 0.0);
  Grid<double> interf(k_count, k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    double es = 0.0;
    for (std::size_t m1 = 0; m1 < m_count; ++m1)
      for (std::size_t m2 = 0; m2 < m_count; ++m2)
        for (std::size_t n1 = 0; n1 < n_count; ++n1)
          for (std::size_t n2 = 0; n2 < n_count; ++n2)
            es += beta(m1, n1) * beta(m2, n2) * alpha(n1, k) * alpha(n2, k) * std::norm(F(m1, n1, k)) *
                  std::norm(F(m2, n2, k));
    for (std::size_t m1 = 0; m1 < m_count; ++m1)
      for (std::size_t m2 = 0; m2 < m_count; ++m2)
        for (std::size_t n = 0; n < n_count; ++n)
          es += 2.0 * beta(m1, n) * alpha(n, k) * g(m2, k) * std::norm(F(m1, n, k));
    double direct = 0.0;
    for (std::size_t m = 0; m < m_count; ++m) direct += g(m, k);
    signal[k] = es + direct * direct;
    for (std::size_t i = 0; i < k_count; ++i) {
      if (i == k) continue;
      RealSum v;
      for (std::size_t m1 = 0; m1 < m_count; ++m1)
        for (std::size_t m2 = 0; m2 < m_count; ++m2)
          for (std::size_t n1 = 0; n1 < n_count; ++n1)
            for (std::size_t n2 = 0; n2 < n_count; ++n2)
              v.add(std::sqrt(alpha(n1, k) * alpha(n1, i) * alpha(n2, i) * alpha(n2, k)) * beta(m1, n1) *
                    beta(m2, n2) * std::conj(F(m1, n1, k)) * F(m1, n1, i) * std::conj(F(m2, n2, i)) * F(m2, n2, k));
      interf(k, i) = v.value("LoS interference");
    }
  }
  return rates_from(signal, interf, noise, tx);
}

std::vector<double> rate_random_phase_asymptotic(const ChannelStats& stats, const Topology& topo,
                                                 const TransmitConfig& tx) {
  const RateModel model(topo, stats);
  const std::size_t m_count = topo.num_aps();
  const std::size_t n_count = topo.num_ris();
  const std::size_t k_count = topo.num_users();
  // Squared amplitudes: c, c delta, c eps, c delta eps.
  struct Sq {
    double c, z, h, l;
  };
  auto sqa = [&](std::size_t m, std::size_t n, std::size_t k) {
    if (stats.pure_los) return Sq{0.0, 0.0, 0.0, model.los_gain(m, n, k)};
    const double c = model.c_factor(m, n, k);
    return Sq{c, c * stats.ris_ap_rician(m, n), c * stats.user_ris_rician(n, k), model.los_gain(m, n, k)};
  };
  std::vector<double> signal(k_count), noise(k_count, 0.0);
  Grid<double> interf(k_count, k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    double es = 0.0;
    for (std::size_t m1 = 0; m1 < m_count; ++m1)
      for (std::size_t m2 = 0; m2 < m_count; ++m2)
        for (std::size_t n1 = 0; n1 < n_count; ++n1)
          for (std::size_t n2 = 0; n2 < n_count; ++n2) {
            const Sq u = sqa(m1, n1, k);
            const Sq v = sqa(m2, n2, k);
            es += 2.0 * (u.l * (v.z + v.h + v.c) + u.z * v.h + u.z * v.c + u.h * v.c) + u.l * v.l + u.z * v.z +
                  u.h * v.h + u.c * v.c;
          }
    for (std::size_t m = 0; m < m_count; ++m)
      for (std::size_t n = 0; n < n_count; ++n) {
        const Sq u = sqa(m, n, k);
        es += sq(u.l + u.z);
      }
    signal[k] = es;
    for (std::size_t i = 0; i < k_count; ++i) {
      if (i == k) continue;
      double v = 0.0;
      for (std::size_t m = 0; m < m_count; ++m)
        for (std::size_t n = 0; n < n_count; ++n) {
          const Sq a = sqa(m, n, k);
          const Sq b = sqa(m, n, i);
          v += (a.l + a.z) * (b.l + b.z);
        }
      interf(k, i) = v;
    }
  }
  return rates_from(signal, interf, noise, tx);
}

}  // namespace rislab
