// Umbrella header.
#pragma once

#include "levyq/asymptotics.hpp"
#include "levyq/codec.hpp"
#include "levyq/density.hpp"
#include "levyq/entropy.hpp"
#include "levyq/estimate.hpp"
#include "levyq/harness.hpp"
#include "levyq/io.hpp"
#include "levyq/model_json.hpp"
#include "levyq/noise_models.hpp"
#include "levyq/parallel.hpp"
#include "levyq/quantization.hpp"
#include "levyq/rng.hpp"
#include "levyq/sampling.hpp"
#include "levyq/stats.hpp"
