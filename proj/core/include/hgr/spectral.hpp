#pragma once

#include "hgr/grid.hpp"

namespace hgr {

/// Applies the Fourier multiplier (1 + lambda^2 |xi|^2)^{s/2} with the box
/// wave numbers xi = pi m / L. lambda = 1 is the Bessel potential Lambda^s.
/// No support check; callers decide whether periodic wrap-around matters.
ScalarField apply_bessel_multiplier(const ScalarField& u, double s, double lambda = 1.0);

/// Lambda^s u = (1 - Laplacian)^{s/2} u. Enforces the support margin of
/// `policy` so that the periodic transform approximates the whole-space one.
ScalarField lambda_s(const ScalarField& u, double s, const SupportPolicy& policy = {});

/// || u ||_{H^s} = || Lambda^s u ||_{L^2}.
double norm_hs(const ScalarField& u, double s, const SupportPolicy& policy = {});

/// Returns the L^2 inner product of the lambda-dilated Bessel potentials,
/// sum_xi (1 + lambda^2 |xi|^2)^s Re(f^(xi) conj g^(xi)) with Parseval
/// normalisation. With f = g this is ||Lambda^s_lambda f||^2.
double bessel_energy(const ScalarField& f, const ScalarField& g, double s, double lambda = 1.0);
double bessel_energy(const ScalarField& f, double s, double lambda = 1.0);

}  // namespace hgr
