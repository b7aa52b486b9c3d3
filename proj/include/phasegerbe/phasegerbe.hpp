#pragma once

// Umbrella header: phase-space geometry, Cech covers, classical dynamics,
// the gerbe data, configuration-space quantum mechanics, phase-space
// quantum mechanics, and the gauge transformations tying them together.

#include "phasegerbe/cover.hpp"
#include "phasegerbe/dynamics.hpp"
#include "phasegerbe/errors.hpp"
#include "phasegerbe/gauge.hpp"
#include "phasegerbe/geometry.hpp"
#include "phasegerbe/gerbe.hpp"
#include "phasegerbe/phase_space.hpp"
#include "phasegerbe/polynomial.hpp"
#include "phasegerbe/quantum.hpp"
