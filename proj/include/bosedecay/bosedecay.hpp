#pragma once

#include "bosedecay/config.hpp"
#include "bosedecay/engine.hpp"
#include "bosedecay/error.hpp"
#include "bosedecay/integrators.hpp"
#include "bosedecay/observables.hpp"
#include "bosedecay/oracle.hpp"
#include "bosedecay/output.hpp"
#include "bosedecay/phase_point.hpp"
#include "bosedecay/positive_p.hpp"
#include "bosedecay/rng.hpp"
#include "bosedecay/samplers.hpp"
#include "bosedecay/statistics.hpp"
#include "bosedecay/wigner.hpp"
