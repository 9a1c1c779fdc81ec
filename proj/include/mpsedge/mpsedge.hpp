#pragma once

// umbrella header
#include "errors.hpp"
#include "numerics.hpp"
#include "mps.hpp"
#include "cpmap.hpp"
#include "chain.hpp"
#include "canonical.hpp"
#include "pipeline.hpp"
#include "spinchain.hpp"
#include "samples.hpp"
#include "io.hpp"
#include "version.hpp"
