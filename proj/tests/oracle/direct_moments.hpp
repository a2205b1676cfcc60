#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "rislab/closed_form.hpp"
#include "rislab/phase.hpp"
#include "rislab/topology.hpp"

namespace rislab::oracle {

/// Term-by-term moment evaluator kept as a reference for the factored model.
class DirectModel {
 public:
  DirectModel(const Topology& topo, const ChannelStats& stats);

  [[nodiscard]] Moments moments(const PhaseConfig& phases) const;

 private:
  using cdouble = std::complex<double>;
  struct Amplitudes {
    double c = 0.0;
    double sc = 0.0;
    double los = 0.0;
    double zlos = 0.0;
    double hlos = 0.0;
  };

  [[nodiscard]] std::size_t idx(std::size_t m, std::size_t n, std::size_t k) const noexcept {
    return (m * n_ + n) * k_ + k;
  }
  [[nodiscard]] cdouble ap_inner(std::size_t m, std::size_t n1, std::size_t n2) const {
    return ap_inner_[(m * n_ + n1) * n_ + n2];
  }
  [[nodiscard]] cdouble ris_inner(std::size_t m1, std::size_t n1, std::size_t m2, std::size_t n2) const {
    return ris_inner_[(m1 * n_ + n1) * (m_ * n_) + m2 * n_ + n2];
  }
  [[nodiscard]] cdouble user_inner(std::size_t n, std::size_t a, std::size_t b) const {
    return user_inner_[(n * k_ + a) * k_ + b];
  }
  void check_phases(const PhaseConfig& phases) const;
  [[nodiscard]] std::vector<cdouble> f_table(const PhaseConfig& phases) const;
  [[nodiscard]] std::vector<cdouble> los_products(std::size_t a, std::size_t b, const std::vector<cdouble>& f) const;
  [[nodiscard]] double noise_term(std::size_t k, const std::vector<cdouble>& f) const;
  [[nodiscard]] double signal_term(std::size_t k, const std::vector<cdouble>& f) const;
  [[nodiscard]] double interference_term(std::size_t k, std::size_t i, const std::vector<cdouble>& f) const;

  std::size_t m_;
  std::size_t n_;
  std::size_t k_;
  std::size_t mb_;
  std::size_t nr_;
  std::vector<Amplitudes> amp_;
  std::vector<double> direct_;
  std::vector<cdouble> steer_;
  std::vector<cdouble> ap_inner_;
  std::vector<cdouble> ris_inner_;
  std::vector<cdouble> user_inner_;
};

}  // namespace rislab::oracle
