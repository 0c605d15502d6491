#pragma once

// Physics-informed multi-output Gaussian process for Euler-Bernoulli beams:
// stiffness regression, latent-field inference and damage scoring.

#include "beamgp/beam_oracle.hpp"
#include "beamgp/covariance.hpp"
#include "beamgp/damage.hpp"
#include "beamgp/dataset.hpp"
#include "beamgp/dataset_io.hpp"
#include "beamgp/errors.hpp"
#include "beamgp/fit.hpp"
#include "beamgp/inference.hpp"
#include "beamgp/kernel.hpp"
#include "beamgp/posterior.hpp"
#include "beamgp/rng.hpp"
#include "beamgp/sampler.hpp"
