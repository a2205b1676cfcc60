#include "direct_moments.hpp"

#include <cmath>
#include <string>
#include <stdexcept>

#include "rislab/channel.hpp"
#include "rislab/units.hpp"

namespace rislab::oracle {

namespace {

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


DirectModel::DirectModel(const Topology& topo, const ChannelStats& stats)
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
  steer_.resize(m_ * n_ * k_ * nr_);
  for (std::size_t m = 0; m < m_; ++m) {
    for (std::size_t n = 0; n < n_; ++n) {
      const Angles& dep = stats.ris_ap_departure(m, n);
      for (std::size_t k = 0; k < k_; ++k) {
        const Angles& arr = stats.user_ris_arrival(n, k);
        const double row = std::sin(arr.elevation) * std::sin(arr.azimuth) -
                           std::sin(dep.elevation) * std::sin(dep.azimuth);
        const double col = std::cos(arr.elevation) - std::cos(dep.elevation);
        for (std::size_t r = 0; r < nr_; ++r) {
          const double zeta = two_pi * stats.spacing_ratio *
                              (static_cast<double>(r / side) * row + static_cast<double>(r % side) * col);
          steer_[idx(m, n, k) * nr_ + r] = std::polar(1.0, zeta);
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
  ris_inner_.resize(m_ * n_ * m_ * n_);
  for (std::size_t m1 = 0; m1 < m_; ++m1) {
    for (std::size_t n1 = 0; n1 < n_; ++n1) {
      for (std::size_t m2 = 0; m2 < m_; ++m2) {
        for (std::size_t n2 = 0; n2 < n_; ++n2) {
          ris_inner_[(m1 * n_ + n1) * (m_ * n_) + m2 * n_ + n2] = los.ris_side(m1, n1).dot(los.ris_side(m2, n2));
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
}

void DirectModel::check_phases(const PhaseConfig& phases) const {
  if (phases.num_ris() != n_ || phases.elements_per_ris() != nr_) {
    throw std::invalid_argument("phase configuration does not match the scenario");
  }
}

std::vector<cdouble> DirectModel::f_table(const PhaseConfig& phases) const {
  check_phases(phases);
  std::vector<cdouble> rotation(n_ * nr_);
  const auto angles = phases.angles();
  for (std::size_t i = 0; i < rotation.size(); ++i) rotation[i] = std::polar(1.0, angles[i]);
  std::vector<cdouble> f(m_ * n_ * k_);
  for (std::size_t m = 0; m < m_; ++m) {
    for (std::size_t n = 0; n < n_; ++n) {
      const cdouble* rot = rotation.data() + n * nr_;
      for (std::size_t k = 0; k < k_; ++k) {
        const cdouble* s = steer_.data() + idx(m, n, k) * nr_;
        cdouble acc{};
        for (std::size_t r = 0; r < nr_; ++r) acc += s[r] * rot[r];
        f[idx(m, n, k)] = acc;
      }
    }
  }
  return f;
}

// X(m, n1, n2) = L_a(m,n1) L_b(m,n2) conj(f_a(m,n1)) f_b(m,n2) a_Mb(m,n1)^H a_Mb(m,n2)
std::vector<cdouble> DirectModel::los_products(std::size_t a, std::size_t b, const std::vector<cdouble>& f) const {
  std::vector<cdouble> x(m_ * n_ * n_);
  for (std::size_t m = 0; m < m_; ++m) {
    for (std::size_t n1 = 0; n1 < n_; ++n1) {
      for (std::size_t n2 = 0; n2 < n_; ++n2) {
        x[(m * n_ + n1) * n_ + n2] = amp_[idx(m, n1, a)].los * amp_[idx(m, n2, b)].los *
                                     std::conj(f[idx(m, n1, a)]) * f[idx(m, n2, b)] * ap_inner(m, n1, n2);
      }
    }
  }
  return x;
}

double DirectModel::noise_term(std::size_t k, const std::vector<cdouble>& f) const {
  const double mb = static_cast<double>(mb_);
  const double nr = static_cast<double>(nr_);
  const auto p = los_products(k, k, f);
  RealSum s;
  for (const cdouble& v : p) s.add(v);
  for (std::size_t m = 0; m < m_; ++m) {
    for (std::size_t n = 0; n < n_; ++n) {
      const Amplitudes& a = amp_[idx(m, n, k)];
      s.add(a.c * mb * nr + sq(a.zlos) * mb * nr + sq(a.hlos) * mb * nr);
    }
    s.add(direct_[m * k_ + k] * mb);
  }
  return s.value("noise moment");
}

double DirectModel::signal_term(std::size_t k, const std::vector<cdouble>& f) const {
  const double mb = static_cast<double>(mb_);
  const double nr = static_cast<double>(nr_);
  const auto p = los_products(k, k, f);
  auto P = [&](std::size_t m, std::size_t n1, std::size_t n2) -> const cdouble& { return p[(m * n_ + n1) * n_ + n2]; };
  auto A = [&](std::size_t m, std::size_t n) -> const Amplitudes& { return amp_[idx(m, n, k)]; };
  auto F = [&](std::size_t m, std::size_t n) -> const cdouble& { return f[idx(m, n, k)]; };
  auto gamma = [&](std::size_t m) { return direct_[m * k_ + k]; };
  RealSum s;

  // LoS-LoS squared.
  for (std::size_t m1 = 0; m1 < m_; ++m1)
    for (std::size_t m2 = 0; m2 < m_; ++m2)
      for (std::size_t n1 = 0; n1 < n_; ++n1)
        for (std::size_t n2 = 0; n2 < n_; ++n2)
          for (std::size_t n3 = 0; n3 < n_; ++n3)
            for (std::size_t n4 = 0; n4 < n_; ++n4) s.add(P(m1, n1, n2) * P(m2, n3, n4));

  // Five-index family.
  for (std::size_t m1 = 0; m1 < m_; ++m1) {
    for (std::size_t m2 = 0; m2 < m_; ++m2) {
      for (std::size_t n1 = 0; n1 < n_; ++n1) {
        for (std::size_t n2 = 0; n2 < n_; ++n2) {
          for (std::size_t n3 = 0; n3 < n_; ++n3) {
            const Amplitudes& b = A(m2, n3);
            s.add(2.0 * P(m1, n1, n2).real() * (b.c + sq(b.zlos) + sq(b.hlos)) * mb * nr);
            const double amp = 2.0 * A(m1, n1).zlos * A(m1, n2).los * A(m2, n3).los * A(m2, n1).zlos;
            if (amp != 0.0) {
              const cdouble prod = std::conj(F(m2, n3)) * F(m1, n2) * ap_inner(m2, n3, n1) *
                                   ris_inner(m2, n1, m1, n1) * ap_inner(m1, n1, n2);
              s.add(amp * prod.real());
            }
          }
        }
      }
    }
  }

  // Four-index family over (m1, m2, n1, n2).
  for (std::size_t m1 = 0; m1 < m_; ++m1) {
    for (std::size_t m2 = 0; m2 < m_; ++m2) {
      for (std::size_t n1 = 0; n1 < n_; ++n1) {
        for (std::size_t n2 = 0; n2 < n_; ++n2) {
          const cdouble& pv = P(m1, n1, n2);
          s.add(2.0 * mb * (2.0 * A(m2, n2).c * pv.real() + gamma(m2) * pv));
          const double z4 = A(m1, n1).zlos * A(m1, n2).zlos * A(m2, n2).zlos * A(m2, n1).zlos;
          if (z4 != 0.0) {
            s.add(z4 * ap_inner(m1, n1, n2) * ris_inner(m1, n2, m2, n2) * ap_inner(m2, n2, n1) *
                  ris_inner(m2, n1, m1, n1));
          }
          const Amplitudes& u = A(m1, n1);
          const Amplitudes& v = A(m2, n2);
          s.add(mb * mb * nr * nr *
                (2.0 * (sq(u.zlos) * sq(v.hlos) + sq(u.zlos) * v.c + sq(u.hlos) * v.c) + sq(u.zlos) * sq(v.zlos) +
                 sq(u.hlos) * sq(v.hlos) + u.c * v.c));
        }
      }
    }
  }

  // (m, n1, n2, n3) family.
  for (std::size_t m = 0; m < m_; ++m)
    for (std::size_t n1 = 0; n1 < n_; ++n1)
      for (std::size_t n2 = 0; n2 < n_; ++n2)
        for (std::size_t n3 = 0; n3 < n_; ++n3)
          s.add(2.0 * nr * (sq(A(m, n2).hlos) + A(m, n2).c) * P(m, n1, n3));

  // (m1, m2, n) family.
  for (std::size_t m1 = 0; m1 < m_; ++m1) {
    for (std::size_t m2 = 0; m2 < m_; ++m2) {
      for (std::size_t n = 0; n < n_; ++n) {
        const Amplitudes& u = A(m1, n);
        const Amplitudes& v = A(m2, n);
        s.add(mb * mb * nr *
              (2.0 * (v.c + gamma(m2)) * (sq(u.zlos) + sq(u.hlos)) + u.c * (2.0 * gamma(m2) + v.c)));
      }
    }
  }

  // (m, n1, n2) family.
  for (std::size_t m = 0; m < m_; ++m) {
    for (std::size_t n1 = 0; n1 < n_; ++n1) {
      for (std::size_t n2 = 0; n2 < n_; ++n2) {
        const Amplitudes& u = A(m, n1);
        const Amplitudes& v = A(m, n2);
        s.add(mb * nr * nr *
              (2.0 * (sq(u.zlos) * sq(v.hlos) + sq(u.zlos) * v.c + sq(u.hlos) * v.c) + sq(u.hlos) * sq(v.hlos) +
               u.c * v.c));
        s.add(2.0 * gamma(m) * P(m, n1, n2));
        s.add(4.0 * v.c * P(m, n1, n2).real());
      }
    }
  }

  // (m, n) family and the direct-link terms.
  double direct_sum = 0.0;
  for (std::size_t m = 0; m < m_; ++m) {
    for (std::size_t n = 0; n < n_; ++n) {
      const Amplitudes& u = A(m, n);
      s.add(mb * nr * (2.0 * (sq(u.zlos) + sq(u.hlos)) * (u.c + gamma(m)) + u.c * u.c + 2.0 * u.c * gamma(m)));
    }
    direct_sum += gamma(m) * mb;
    s.add(sq(gamma(m)) * mb);
  }
  s.add(direct_sum * direct_sum);
  return s.value("signal moment");
}

double DirectModel::interference_term(std::size_t k, std::size_t i, const std::vector<cdouble>& f) const {
  const double mb = static_cast<double>(mb_);
  const double nr = static_cast<double>(nr_);
  const auto x = los_products(k, i, f);
  const auto pk = los_products(k, k, f);
  const auto pi = los_products(i, i, f);
  auto X = [&](std::size_t m, std::size_t n1, std::size_t n2) -> const cdouble& { return x[(m * n_ + n1) * n_ + n2]; };
  auto Pk = [&](std::size_t m, std::size_t n1, std::size_t n2) -> const cdouble& { return pk[(m * n_ + n1) * n_ + n2]; };
  auto Pi = [&](std::size_t m, std::size_t n1, std::size_t n2) -> const cdouble& { return pi[(m * n_ + n1) * n_ + n2]; };
  auto Ak = [&](std::size_t m, std::size_t n) -> const Amplitudes& { return amp_[idx(m, n, k)]; };
  auto Ai = [&](std::size_t m, std::size_t n) -> const Amplitudes& { return amp_[idx(m, n, i)]; };
  auto Fk = [&](std::size_t m, std::size_t n) -> const cdouble& { return f[idx(m, n, k)]; };
  auto Fi = [&](std::size_t m, std::size_t n) -> const cdouble& { return f[idx(m, n, i)]; };
  auto gk = [&](std::size_t m) { return direct_[m * k_ + k]; };
  auto gi = [&](std::size_t m) { return direct_[m * k_ + i]; };
  RealSum s;

  for (std::size_t m1 = 0; m1 < m_; ++m1)
    for (std::size_t m2 = 0; m2 < m_; ++m2)
      for (std::size_t n1 = 0; n1 < n_; ++n1)
        for (std::size_t n2 = 0; n2 < n_; ++n2)
          for (std::size_t n3 = 0; n3 < n_; ++n3)
            for (std::size_t n4 = 0; n4 < n_; ++n4) s.add(X(m1, n1, n2) * std::conj(X(m2, n4, n3)));

  for (std::size_t m1 = 0; m1 < m_; ++m1) {
    for (std::size_t m2 = 0; m2 < m_; ++m2) {
      for (std::size_t n1 = 0; n1 < n_; ++n1) {
        for (std::size_t n2 = 0; n2 < n_; ++n2) {
          for (std::size_t n3 = 0; n3 < n_; ++n3) {
            const double hh = Ai(m2, n3).hlos * Ak(m2, n3).hlos;
            if (hh != 0.0) s.add(2.0 * mb * hh * (X(m1, n1, n2) * user_inner(n3, i, k)).real());
            const double ak = Ak(m1, n1).los * Ai(m1, n2).zlos * Ai(m2, n2).zlos * Ak(m2, n3).los;
            const double ai = Ai(m1, n1).los * Ak(m1, n2).zlos * Ak(m2, n2).zlos * Ai(m2, n3).los;
            if (ak != 0.0 || ai != 0.0) {
              const cdouble mix = ak * std::conj(Fk(m1, n1)) * Fk(m2, n3) + ai * std::conj(Fi(m1, n1)) * Fi(m2, n3);
              s.add(mix * ap_inner(m1, n1, n2) * ris_inner(m1, n2, m2, n2) * ap_inner(m2, n2, n3));
            }
          }
        }
      }
    }
  }

  for (std::size_t m1 = 0; m1 < m_; ++m1) {
    for (std::size_t m2 = 0; m2 < m_; ++m2) {
      for (std::size_t n1 = 0; n1 < n_; ++n1) {
        for (std::size_t n2 = 0; n2 < n_; ++n2) {
          const double ak = Ak(m1, n1).los * Ai(m1, n2).zlos * Ak(m2, n2).hlos * Ai(m2, n2).sc;
          const double ai = Ak(m1, n1).zlos * Ai(m1, n2).los * Ai(m2, n1).hlos * Ak(m2, n1).sc;
          if (ak != 0.0 || ai != 0.0) {
            const cdouble mix = ak * std::conj(Fk(m1, n1)) * Fk(m1, n2) + ai * std::conj(Fi(m1, n1)) * Fi(m1, n2);
            s.add(2.0 * mb * (mix * ap_inner(m1, n1, n2)).real());
          }
          const double z4 = Ak(m1, n1).zlos * Ai(m1, n2).zlos * Ai(m2, n2).zlos * Ak(m2, n1).zlos;
          if (z4 != 0.0) {
            s.add(z4 * ap_inner(m1, n1, n2) * ris_inner(m1, n2, m2, n2) * ap_inner(m2, n2, n1) *
                  ris_inner(m2, n1, m1, n1));
          }
          const double h4 = Ak(m1, n1).hlos * Ai(m1, n1).hlos * Ai(m2, n2).hlos * Ak(m2, n2).hlos;
          if (h4 != 0.0) {
            s.add(h4 * mb * mb * user_inner(n1, k, i) * user_inner(n2, i, k));
          }
        }
      }
    }
  }

  for (std::size_t m = 0; m < m_; ++m) {
    for (std::size_t n1 = 0; n1 < n_; ++n1) {
      for (std::size_t n2 = 0; n2 < n_; ++n2) {
        for (std::size_t n3 = 0; n3 < n_; ++n3) {
          s.add(nr * (sq(Ai(m, n2).hlos) + Ai(m, n2).c) * Pk(m, n1, n3));
          s.add(nr * (sq(Ak(m, n1).hlos) + Ak(m, n1).c) * Pi(m, n3, n2));
        }
      }
    }
  }

  for (std::size_t m1 = 0; m1 < m_; ++m1) {
    for (std::size_t m2 = 0; m2 < m_; ++m2) {
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
        s.add(gi(m) * Pk(m, n1, n2) + gk(m) * Pi(m, n1, n2));
        const Amplitudes& u = Ak(m, n1);
        const Amplitudes& v = Ai(m, n2);
        s.add(mb * nr * nr *
              (sq(u.zlos) * sq(v.hlos) + sq(u.hlos) * sq(v.zlos) + sq(u.hlos) * sq(v.hlos) + sq(u.zlos) * v.c +
               u.c * sq(v.zlos) + sq(u.hlos) * v.c + u.c * sq(v.hlos) + u.c * v.c));
      }
    }
  }

  for (std::size_t m = 0; m < m_; ++m) {
    for (std::size_t n = 0; n < n_; ++n) {
      const Amplitudes& u = Ak(m, n);
      const Amplitudes& v = Ai(m, n);
      s.add(mb * nr *
            ((sq(u.zlos) + sq(u.hlos) + u.c) * gi(m) + (sq(v.zlos) + sq(v.hlos) + v.c) * gk(m)));
    }
    s.add(gk(m) * gi(m) * mb);
  }
  return s.value("interference moment");
}

Moments DirectModel::moments(const PhaseConfig& phases) const {
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

}  // namespace rislab::oracle
