#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "anomo/netgen.hpp"
#include "anomo/types.hpp"

namespace anomo {

enum class Seasonal { None, Linear, Weekly };

std::string seasonal_name(Seasonal s);

/// Normal-traffic generator constants shared by all flows.
struct FlowGenParams {
  double c0 = 2.0;                          ///< baseline offset
  double a1 = 1.0;                          ///< periodic amplitude
  double omega = 2.0 * 3.14159265358979323846 / 24.0;  ///< radians per sample
  double b1 = -1.0;                         ///< linear slope; negative means 1 / T
  double a2 = 0.5;                          ///< weekly term amplitude numerator
  double b2 = 1.0;                          ///< weekly term amplitude denominator
  double sigma = 0.1;                       ///< noise standard deviation
};

struct GeneratedFlows {
  Matrix flows;                  ///< F x T, column s - 1 is time s
  std::vector<Seasonal> seasonal;  ///< per-flow trend type
};

/// f_i(s) = c0 + a1 sin(omega s) + seasonal_i(s) + N(0, sigma^2), clipped at 0,
/// for s = 1..T. Each flow draws its seasonal type uniformly.
GeneratedFlows gen_flows(int flows, int times, const FlowGenParams& params, std::uint64_t seed);

/// Trapezoid weight of sample k (0-based) inside an event: linear rise over the
/// first round(gamma_i d) samples, plateau at 1, linear fall over the last round(gamma_d d).
double event_shape(const AnomalyEvent& e, int k);

struct Injection {
  Matrix flows;  ///< anomaly-injected F x T
  Mask labels;   ///< F x T, 1 where the event shape is positive
};

/// Applies f <- f + (delta - 1) f s(t) for every event. Events must lie in
/// [1, T]; delta = 1 is a no-op and sets no labels. Two events on one flow that overlap in time raise DataError naming both.
Injection inject(const Matrix& flows, const std::vector<AnomalyEvent>& events);

/// Y = R F.
Matrix make_link_matrix(const RoutingMatrix& routing, const Matrix& flows);

/// i.i.d. Bernoulli(ratio / 100) observation mask; ratio in (0, 100]. Entry kept
/// when its uniform draw is below ratio / 100, so one seed gives nested masks.
Mask sample_mask(int links, int times, double ratio, std::uint64_t seed);

enum class StructureMix { OneToOne, NToOne, AllOdsOneLink, Mixture };
StructureMix parse_structure(const std::string& name);

struct EventPlan {
  double anomaly_ratio = 0.01;  ///< fraction of flows receiving an anomaly
  StructureMix structure = StructureMix::Mixture;
  int earliest_start = 1;  ///< first admissible start time
  std::vector<int> durations{5, 10, 20, 30};
  double delta_min = 1.5;
  double delta_max = 2.5;
};

/// Draws non-overlapping events until round(ratio F) flows are covered.
/// One-to-one and N-to-one events scale volume by U[delta_min, delta_max];
/// all-ODs-one-link events are outages (delta = 0). Rise/fall ratios ~ U[0, 0.5).
std::vector<AnomalyEvent> plan_events(const Network& net, int times, const EventPlan& plan, std::uint64_t seed);

/// Centered moving average; the window shrinks at the borders.
Matrix moving_average(const Matrix& flows, int window);

struct RealPrep {
  Matrix smoothed;
  Matrix residual;          ///< original - smoothed
  std::vector<double> sigma;  ///< per-flow noise estimate
  Injection injected;
};

/// Smooths each flow, optionally re-adds N(0, sigma_i^2) with sigma_i estimated
/// from the smoothing residual, then injects `events`.
RealPrep prep_real(const Matrix& flows, int window, bool refit_noise, const std::vector<AnomalyEvent>& events,
                   std::uint64_t seed);

}  // namespace anomo
