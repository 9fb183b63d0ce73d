#pragma once

#include "timax/analysis.hpp"
#include "timax/diffusion.hpp"
#include "timax/error.hpp"
#include "timax/evaluate.hpp"
#include "timax/generator.hpp"
#include "timax/graph.hpp"
#include "timax/graph_io.hpp"
#include "timax/index_io.hpp"
#include "timax/preprocess.hpp"
#include "timax/query.hpp"
#include "timax/selection.hpp"
