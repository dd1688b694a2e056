// SPDX-License-Identifier: Apache-2.0
//
// Channel realizations for the MIMO two-way relay network.
//
// Both channels are kept together with the joint decomposition
//   H_i = U_H diag(lambda_hi)^{1/2} V_hi^H,   i = 1, 2,
// whose shared left unitary makes the closed-form precoder directions exact.

#pragma once

#include "eerelay/config.hpp"
#include "eerelay/linalg.hpp"

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace eerelay {

enum class ChannelMode {
  /// One Haar U_H shared by both channels; the closed-form unitaries are exact.
  SharedLeftUnitary,
  /// Entrywise CN(0,1) channels; decomposition fields come from each channel's own SVD.
  IidGaussian,
};

inline const char* to_string(ChannelMode m) {
  return m == ChannelMode::SharedLeftUnitary ? "shared" : "iid";
}

inline ChannelMode parse_channel_mode(const std::string& s) {
  if (s == "shared") return ChannelMode::SharedLeftUnitary;
  if (s == "iid") return ChannelMode::IidGaussian;
  throw ConfigError("unknown channel mode '" + s + "' (expected shared|iid)");
}

/// Eigenvalue vectors are length nr, descending, zero-padded when a channel has
/// fewer than nr nonzero singular values.
struct ChannelSpectra {
  RVector lambda_h1;
  RVector lambda_h2;
  CMatrix u_h;
  CMatrix v_h1;
  CMatrix v_h2;
};

struct ChannelRealization {
  CMatrix h1;  // nr x n1
  CMatrix h2;  // nr x n2
  ChannelSpectra spectra;
  ChannelMode mode = ChannelMode::SharedLeftUnitary;
  std::uint64_t seed = 0;

  /// True when u_h is an exact common left factor of both channels.
  bool shared_left() const { return mode == ChannelMode::SharedLeftUnitary; }
};

namespace detail {

/// nr x n "diagonal" matrix with sqrt(lambda) on the main diagonal.
inline CMatrix sqrt_diag(const RVector& lambda, Eigen::Index rows, Eigen::Index cols) {
  CMatrix s = CMatrix::Zero(rows, cols);
  for (Eigen::Index i = 0; i < std::min(rows, cols); ++i) s(i, i) = std::sqrt(std::max(lambda(i), 0.0));
  return s;
}

inline RVector padded_squares(const RVector& singular, Eigen::Index length) {
  RVector out = RVector::Zero(length);
  for (Eigen::Index i = 0; i < std::min(length, singular.size()); ++i) out(i) = singular(i) * singular(i);
  return sorted_descending(out);
}

}  // namespace detail

/// Rebuilds H_i from the stored decomposition.
inline CMatrix reconstruct_h1(const ChannelSpectra& s) {
  return s.u_h * detail::sqrt_diag(s.lambda_h1, s.u_h.rows(), s.v_h1.rows()) * s.v_h1.adjoint();
}
inline CMatrix reconstruct_h2(const ChannelSpectra& s) {
  return s.u_h * detail::sqrt_diag(s.lambda_h2, s.u_h.rows(), s.v_h2.rows()) * s.v_h2.adjoint();
}

/// max over both channels of ||H_i - U_H Lambda^{1/2} V^H||_F / ||H_i||_F.
inline double reconstruction_residual(const ChannelRealization& ch) {
  auto rel = [](const CMatrix& h, const CMatrix& r) {
    const double n = h.norm();
    return n > 0.0 ? (h - r).norm() / n : (h - r).norm();
  };
  return std::max(rel(ch.h1, reconstruct_h1(ch.spectra)), rel(ch.h2, reconstruct_h2(ch.spectra)));
}

/// Deterministic in (config antenna counts, seed, mode).
inline ChannelRealization generate_channels(const NetworkConfig& cfg, std::uint64_t seed,
                                            ChannelMode mode = ChannelMode::SharedLeftUnitary) {
  if (cfg.n1 <= 0 || cfg.n2 <= 0 || cfg.nr <= 0)
    throw std::invalid_argument("antenna counts must be positive");
  const Eigen::Index n1 = cfg.n1, n2 = cfg.n2, nr = cfg.nr;
  Rng rng(mix_seed(seed));

  ChannelRealization ch;
  ch.mode = mode;
  ch.seed = seed;
  auto& s = ch.spectra;

  if (mode == ChannelMode::SharedLeftUnitary) {
    s.u_h = haar_unitary(nr, rng);
    s.v_h1 = haar_unitary(n1, rng);
    s.v_h2 = haar_unitary(n2, rng);
    Eigen::JacobiSVD<CMatrix> g1(complex_gaussian(nr, n1, rng));
    Eigen::JacobiSVD<CMatrix> g2(complex_gaussian(nr, n2, rng));
    s.lambda_h1 = detail::padded_squares(g1.singularValues(), nr);
    s.lambda_h2 = detail::padded_squares(g2.singularValues(), nr);
    ch.h1 = reconstruct_h1(s);
    ch.h2 = reconstruct_h2(s);
  } else {
    ch.h1 = complex_gaussian(nr, n1, rng);
    ch.h2 = complex_gaussian(nr, n2, rng);
    Eigen::JacobiSVD<CMatrix> svd1(ch.h1, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::JacobiSVD<CMatrix> svd2(ch.h2, Eigen::ComputeFullU | Eigen::ComputeFullV);
    s.u_h = svd1.matrixU();
    s.v_h1 = svd1.matrixV();
    s.v_h2 = svd2.matrixV();
    s.lambda_h1 = detail::padded_squares(svd1.singularValues(), nr);
    s.lambda_h2 = detail::padded_squares(svd2.singularValues(), nr);
  }
  return ch;
}

/// Returns the stored decomposition; never recomputes it.
inline const ChannelSpectra& channel_spectra(const ChannelRealization& ch) { return ch.spectra; }

}  // namespace eerelay
