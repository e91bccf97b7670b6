#pragma once

#include "acprobit/ac_sampler.hpp"
#include "acprobit/certify.hpp"
#include "acprobit/errors.hpp"
#include "acprobit/experiments.hpp"
#include "acprobit/io.hpp"
#include "acprobit/probit_model.hpp"
#include "acprobit/rng.hpp"
#include "acprobit/simplex.hpp"
#include "acprobit/symmat.hpp"
#include "acprobit/truncnorm.hpp"
