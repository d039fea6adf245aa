#pragma once

#include <vector>

#include "echoslam/nn/graph.hpp"

namespace echoslam::scan {

// Menger curvature kappa = 4*Area / (a*b*c) of the triangle formed by
// beams i-N, i, i+N (circular indexing) after polar-to-Cartesian
// conversion in the robot frame. Degenerate triangles (any side < 1e-6 m
// or area < 1e-12 m^2) report exactly 0.
double menger_curvature(const std::vector<double>& ranges, int i, int n);

// Curvature at every beam.
std::vector<double> curvature_profile(const std::vector<double>& ranges,
                                      int n);

// Differentiable curvature profile of a [1, beams] range tensor. Matches
// curvature_profile on the forward values; degenerate beams are masked to
// zero with zero gradient.
nn::Value curvature_profile_value(const nn::Value& ranges, int n);

// Scan reconstruction loss: mean squared range error plus lambda times the
// mean squared curvature error.
struct ScanLossParts {
  double distance = 0.0;
  double curvature = 0.0;
  double total = 0.0;
};

ScanLossParts scan_loss(const std::vector<double>& pred,
                        const std::vector<double>& label, int n,
                        double lambda);

// Graph version used in training; label curvature is a constant. The
// distance and curvature terms are exposed for logging when requested.
nn::Value scan_loss_value(const nn::Value& pred,
                          const std::vector<double>& label, int n,
                          double lambda, nn::Value* distance_term = nullptr,
                          nn::Value* curvature_term = nullptr);

}  // namespace echoslam::scan
