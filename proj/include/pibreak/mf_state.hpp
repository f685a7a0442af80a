#pragma once

#include <vector>

#include <Eigen/Dense>

namespace pibreak {

/// Classical spin vectors of M subensembles, one column each, in spin units
/// (subensemble i has magnitude up to N_i/2).
struct MFState {
  Eigen::Matrix3Xd spins;
  double time = 0.0;

  int size() const { return static_cast<int>(spins.cols()); }
};

/// Symmetric observable plus M-1 modulated ones (for M = 2 the single
/// antisymmetric vector).
struct SectorObservables {
  Eigen::Vector3d o_sym = Eigen::Vector3d::Zero();
  std::vector<Eigen::Vector3d> o_modes;

  double norm_sym() const { return o_sym.squaredNorm(); }
  std::vector<double> mode_norms() const {
    std::vector<double> out;
    for (const auto& v : o_modes) out.push_back(v.squaredNorm());
    return out;
  }
};

}  // namespace pibreak
