#pragma once

// Per-time diagnostics attached to recorded states.

#include <array>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "kdvk/gevrey.hpp"
#include "kdvk/spectral.hpp"

namespace kdvk {

struct MonitorSet {
  std::vector<double> sigmas;                 // Gevrey norms to record
  bool radius = true;                         // fit the decay rate at every record
  std::optional<WavenumberWindow> window;     // default_radius_window when empty
  std::optional<double> commutator_sigma;     // record ||Delta||, ||Theta||, ||Gamma|| at this sigma
};

struct MonitorRecord {
  double t = 0.0;
  double l2 = 0.0;
  std::vector<std::pair<double, double>> gevrey_norms;  // (sigma, norm)
  std::optional<RadiusFit> radius;  // empty when the estimator rejected the state
  double l2_identity_residual = std::numeric_limits<double>::quiet_NaN();
  std::optional<std::array<double, 3>> commutator_norms;
};

// Evaluates every monitor except the L2 identity residual, which needs the
// neighbouring records.
MonitorRecord make_record(const Field& u, double t, const MonitorSet& monitors,
                          const DampingProfile& a);

}  // namespace kdvk
