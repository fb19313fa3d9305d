#pragma once

// Umbrella header: the whole library.

#include "framelab/bounds.hpp"
#include "framelab/builder.hpp"
#include "framelab/cli.hpp"
#include "framelab/ext_real.hpp"
#include "framelab/frame_core.hpp"
#include "framelab/io.hpp"
#include "framelab/linalg.hpp"
#include "framelab/objective.hpp"
#include "framelab/optimizer.hpp"
#include "framelab/rng.hpp"
#include "framelab/vector_system.hpp"
