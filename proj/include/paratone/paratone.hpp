// Umbrella header.
#pragma once

#include "paratone/align.hpp"
#include "paratone/binning.hpp"
#include "paratone/captions.hpp"
#include "paratone/corpus.hpp"
#include "paratone/error.hpp"
#include "paratone/features.hpp"
#include "paratone/harness.hpp"
#include "paratone/nn.hpp"
#include "paratone/prior.hpp"
#include "paratone/rng.hpp"
#include "paratone/runconfig.hpp"
#include "paratone/sde.hpp"
#include "paratone/synth.hpp"
#include "paratone/wav.hpp"
