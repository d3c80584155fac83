#pragma once

#include "ssesprit/types.hpp"
#include "ssesprit/linalg.hpp"
#include "ssesprit/signal_model.hpp"
#include "ssesprit/smoothing.hpp"
#include "ssesprit/esprit.hpp"
#include "ssesprit/perf_analysis.hpp"
#include "ssesprit/closed_form.hpp"
