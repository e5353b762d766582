#pragma once

#include "fundfreq/asymptotics.hpp"
#include "fundfreq/criterion.hpp"
#include "fundfreq/errors.hpp"
#include "fundfreq/linear.hpp"
#include "fundfreq/mnr.hpp"
#include "fundfreq/montecarlo.hpp"
#include "fundfreq/signal.hpp"
#include "fundfreq/signal_io.hpp"
#include "fundfreq/spectrum.hpp"
