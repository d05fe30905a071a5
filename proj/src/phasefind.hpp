#pragma once
#include <functional>

#include "su2.hpp"

namespace qsp {

// Checks of the four achievability conditions for a target pair (A, C):
// pointwise boundedness, the unit anchor at theta = 0, the cosine/sine
// expansion structure, and the harmonic budget n/2.
struct AchievabilityReport {
  double margin = 0;    // min over grid of 1 - A^2 - C^2
  double residual = 0;  // |A(0) - 1|
  bool degree_ok = false;
  bool parity_ok = false;
  bool verdict = false;
};

AchievabilityReport validate_achievable(const TrigSeries& A, const TrigSeries& C, int n);

// (A, C) / (1 + eps): forces strict pointwise boundedness away from 1 at the
// cost of at most a 2 eps uniform shift of the realized value.
std::pair<TrigSeries, TrigSeries> rescale(const TrigSeries& A, const TrigSeries& C, double eps);

struct CompletionResult {
  TrigSeries b, d;             // cosine-type B, sine-type D
  double unitarity_residual;   // grid max |A^2+B^2+C^2+D^2 - 1|
  double delta;                // atan2(B(0), A(0))
};

// Sum-of-squares completion: factorizes 1 - A^2 - C^2 = B^2 + D^2 with real
// coefficient series of matching parity, via root selection of the spectral
// factorization on the unit circle.
CompletionResult complete(const TrigSeries& A, const TrigSeries& C);

// Rotates the completion freedom into A so the anchor A(0) = 1 is restored:
// A2 = A1 cos(delta) + B sin(delta).
TrigSeries anchor_correct(const TrigSeries& A1, const TrigSeries& C1,
                          const CompletionResult& comp);

struct StripDiagnostics {
  double max_step_residual = 0;  // largest discarded end coefficient norm
  double final_residual = 0;     // distance of the fully stripped constant from identity
};

// Peels rotation stages off a unitary-valued response expansion one degree at
// a time, reading each stage angle from the leading matrix coefficient.
PhaseSequence layer_strip(const ResponseAbcd& resp, StripDiagnostics* diag = nullptr);

struct SynthesisDiagnostics {
  double eps_in = 0;
  double gap_after_rescale = 0;
  double delta = 0;
  double unitarity_residual = 0;
  double gap_final = 0;
  double min_success_prob = 0;
  int n = 0;
};

struct SynthesisResult {
  PhaseSequence phases;
  ResponseAbcd completed;  // the full tuple the phase sequence realizes
  SynthesisDiagnostics diag;
};

// End-to-end pipeline: rescale, complete, re-anchor, complete again, strip.
// When target_phase is provided the input pair is checked to be eps-close to
// e^{i target_phase(theta)} and the final gap is measured against it;
// otherwise gaps are measured against the input pair itself.
SynthesisResult synthesize(const TrigSeries& A, const TrigSeries& C, double eps,
                           const std::function<double(double)>& target_phase = {});

}  // namespace qsp
