#pragma once

#include "polarbound/bounds.hpp"
#include "polarbound/errors.hpp"
#include "polarbound/extremal.hpp"
#include "polarbound/linalg.hpp"
#include "polarbound/montecarlo.hpp"
#include "polarbound/oracle.hpp"
#include "polarbound/spectra.hpp"
